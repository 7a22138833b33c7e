"""Geodesic flow, exponential map and distance by shooting.

States are arrays ``(..., 8)``: position ``(t, x, y, z)`` followed by the
coordinate velocity.  Integration is classical fixed-step RK4 and is
vectorised over the leading axes, which is what makes multi-start shooting
affordable.
"""
from __future__ import annotations

import csv
import functools
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .curvature import christoffel_fd, christoffel_frame
from .groups import DomainError, Geometry, GeometrySpec, check_point
from .metrics import _coframe, _frame, _frame_derivative, inner, metric_at, orthonormal_coefficients

CSV_HEADER = ("s", "t", "x", "y", "z", "vt", "vx", "vy", "vz", "energy")
DEFAULT_EXP_STEPS = 200
DEFAULT_SHOOTING_STEPS = 100


@functools.lru_cache(maxsize=64)
def _frame_constants(spec: GeometrySpec):
    a = orthonormal_coefficients(spec)
    gamma = christoffel_frame(spec).reshape(4, 16).copy()  # [c, (a, b)]
    return a, np.linalg.inv(a), gamma


def _apply(m, x):
    """``m @ x`` over the last axis without BLAS, so every row is computed
    the same way whatever the batch size (thread chunks stay bit-identical)."""
    return (m * x[..., None, :]).sum(axis=-1)


def geodesic_rhs(spec: GeometrySpec, state, route="frame") -> np.ndarray:
    """Time derivative of ``state`` under the geodesic flow.

    The default ``"frame"`` route writes the velocity in the orthonormal
    frame, ``v = F w``, and uses the constant connection coefficients:
    ``dw/ds = -G(w, w)`` and ``dv/ds = (dF[v]) w + F dw/ds``.  The
    ``"christoffel"`` route uses differenced coordinate Christoffel symbols.
    """
    state = np.asarray(state, dtype=float)
    check_point(spec, state[..., :4])
    if route == "frame":
        return _frame_rhs(spec, state)
    p, v = state[..., :4], state[..., 4:]
    if route == "christoffel":
        gamma = christoffel_fd(spec, p, method="complex")
        acc = -np.einsum("...kij,...i,...j->...k", gamma, v, v)
    else:
        raise ValueError(f"unknown route {route!r}")
    return np.concatenate([v, acc], axis=-1)


def _frame_rhs(spec, state):
    p, v = state[..., :4], state[..., 4:]
    a, a_inv, gamma = _frame_constants(spec)
    # frame components u of v, and w = a^-1 u in the orthonormal frame
    u = _apply(_coframe(spec, p), v)
    w = _apply(a_inv, u)
    dw = -_apply(gamma, (w[..., :, None] * w[..., None, :]).reshape(w.shape[:-1] + (16,)))
    # v = E a w  =>  dv/ds = dE[v] u + E a dw
    acc = _apply(_frame_derivative(spec, p, v), u) + _apply(_frame(spec, p), _apply(a, dw))
    return np.concatenate([v, acc], axis=-1)


def _admissible(spec, p):
    ok = np.all(np.isfinite(p), axis=-1)
    if spec.kind is Geometry.SOL41:
        ok &= p[..., 0] > 0
    return ok


def rk4_flow(spec: GeometrySpec, state, h, n, record_every=None):
    """Advance ``state`` by ``n`` RK4 steps of size ``h``.

    Returns ``(final, alive, samples, last_alive_step)`` where ``samples``
    holds every ``record_every``-th state (``None`` if not requested).
    Entries that leave the chart are frozen at their last admissible state.
    """
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        return _rk4_loop(spec, np.array(state, dtype=float), h, n, record_every)


def _rk4_loop(spec, state, h, n, record_every):
    # Stages are evaluated unconditionally (the formulas stay finite off the
    # chart) and validated once per step: a step is accepted only if every
    # stage point and the result are admissible.
    sol41 = spec.kind is Geometry.SOL41
    alive = _admissible(spec, state[..., :4])
    steps_alive = np.zeros(state.shape[:-1], dtype=int)
    samples = [state.copy()] if record_every else None
    for i in range(n):
        k1 = _frame_rhs(spec, state)
        s2 = state + 0.5 * h * k1
        k2 = _frame_rhs(spec, s2)
        s3 = state + 0.5 * h * k2
        k3 = _frame_rhs(spec, s3)
        s4 = state + h * k3
        k4 = _frame_rhs(spec, s4)
        new = state + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        ok = alive & np.isfinite(new).all(axis=-1)
        if sol41:
            ok &= (s2[..., 0] > 0) & (s3[..., 0] > 0) & (s4[..., 0] > 0) & (new[..., 0] > 0)
        if ok.all():
            state = new
        else:
            state = np.where(ok[..., None], new, state)
        alive = ok
        steps_alive += ok
        if record_every and (i + 1) % record_every == 0:
            samples.append(state.copy())
        if not alive.any():
            break
    return state, alive, samples, steps_alive


@dataclass
class Trajectory:
    s: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    energy: np.ndarray
    step: float
    status: str = "ok"
    integrator: str = "rk4"

    @property
    def max_energy_drift(self) -> float:
        return float(np.max(np.abs(self.energy - self.energy[0])))

    @property
    def endpoint(self) -> np.ndarray:
        return self.positions[-1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        rows = np.column_stack([self.s, self.positions, self.velocities, self.energy])
        for row in rows:
            writer.writerow([format(float(v), ".17g") for v in row])
        return buf.getvalue()


def read_trajectory_csv(text: str) -> Trajectory:
    rows = list(csv.reader(io.StringIO(text)))
    if tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"unexpected header {rows[0]}")
    data = np.array([[float(v) for v in r] for r in rows[1:]])
    step = float(data[1, 0] - data[0, 0]) if len(data) > 1 else 0.0
    return Trajectory(data[:, 0], data[:, 1:5], data[:, 5:9], data[:, 9], step)


def integrate_geodesic(spec: GeometrySpec, p, v, T, dt, record_every=1) -> Trajectory:
    """Integrate the geodesic through ``p`` with velocity ``v`` up to ``s = T``.

    The step is adjusted to ``T / round(T / dt)`` so the run ends exactly at
    ``T``.  Leaving the chart stops the run; the partial trajectory is
    returned with ``status == "chart_exit"``.
    """
    if not (T > 0 and dt > 0):
        raise ValueError("T and dt must be positive")
    p = check_point(spec, p)
    v = np.asarray(v, dtype=float)
    n = max(1, int(round(T / dt)))
    h = T / n
    state0 = np.concatenate([p, v])
    _, alive, samples, steps = rk4_flow(spec, state0, h, n, record_every)
    states = np.array(samples)
    s = h * record_every * np.arange(len(states))
    status = "ok"
    if not alive:
        status = "chart_exit"
        keep = steps // record_every + 1
        states, s = states[:keep], s[:keep]
    energy = inner(spec, states[:, :4], states[:, 4:], states[:, 4:])
    return Trajectory(s, states[:, :4], states[:, 4:], energy, h, status)


def exp_map(spec: GeometrySpec, p, v, steps=DEFAULT_EXP_STEPS) -> np.ndarray:
    """``exp_p(v)``; broadcasts over leading axes of ``p`` and ``v``."""
    p = check_point(spec, p)
    v = np.asarray(v, dtype=float)
    p, v = np.broadcast_arrays(p, v)
    final, alive, _, _ = rk4_flow(spec, np.concatenate([p, v], axis=-1), 1.0 / steps, steps)
    if not np.all(alive):
        raise DomainError("geodesic left the chart before s = 1")
    return final[..., :4]


@dataclass(frozen=True)
class ShootingOptions:
    tol: float = 1e-8
    max_iter: int = 40
    steps: int = DEFAULT_SHOOTING_STEPS
    fd_step: float = 1e-7
    max_halvings: int = 12
    #: keep iterating until the residual is below tol * polish (or stalls)
    polish: float = 1e-3
    #: include the chart chord q - p as an extra first start
    chord_start: bool = False
    threads: int = 1


@dataclass
class ShootingResult:
    velocity: np.ndarray
    error: float
    length: float
    iterations: int
    converged: bool
    start_index: int = 0
    candidates: list = field(default_factory=list, repr=False)


def default_starts(p, q, chord=False) -> np.ndarray:
    """Initial velocities: (optionally) the chord, then +-e_i scaled by the
    chart distance."""
    delta = np.asarray(q, dtype=float) - np.asarray(p, dtype=float)
    scale = float(np.linalg.norm(delta)) or 1.0
    axes = np.concatenate([np.eye(4), -np.eye(4)]).reshape(2, 4, 4).transpose(1, 0, 2).reshape(8, 4)
    starts = scale * axes
    if chord:
        starts = np.vstack([delta, starts])
    return starts


def _endpoints(spec, p, velocities, steps):
    states = np.concatenate([np.broadcast_to(p, velocities.shape), velocities], axis=-1)
    final, alive, _, _ = rk4_flow(spec, states, 1.0 / steps, steps)
    return final[..., :4], alive


def _solve_starts(spec, p, q, starts, opts: ShootingOptions):
    # diverging trial geodesics overflow harmlessly; they are marked failed
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        return _newton(spec, p, q, starts, opts)


def _newton(spec, p, q, starts, opts):
    """Damped Newton on ``r(v) = L^T (exp_p(v) - q)`` for every start at once,
    where ``g(q) = L L^T``.  ``p`` and ``q`` hold one row per start."""
    chol_t = np.swapaxes(np.linalg.cholesky(metric_at(spec, q)), -1, -2)

    def residual(rows, velocities):
        end, ok = _endpoints(spec, p[rows], velocities, opts.steps)
        return _apply(chol_t[rows], end - q[rows]), ok

    v = np.array(starts, dtype=float)
    count = len(v)
    everything = np.arange(count)
    r, ok = residual(everything, v)
    err = np.where(ok, np.linalg.norm(r, axis=-1), np.inf)
    target = opts.tol * opts.polish
    active = ok & (err >= target)
    iterations = np.zeros(count, dtype=int)

    for _ in range(opts.max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        iterations[idx] += 1
        h = opts.fd_step * np.maximum(1.0, np.linalg.norm(v[idx], axis=-1))
        probes = v[idx, None, :] + h[:, None, None] * np.eye(4)
        rp, okp = residual(np.repeat(idx, 4), probes.reshape(-1, 4))
        rp = rp.reshape(idx.size, 4, 4)
        okp = okp.reshape(idx.size, 4).all(axis=-1)
        jac = np.swapaxes((rp - r[idx, None, :]) / h[:, None, None], -1, -2)  # [., r_i, v_j]
        solvable = okp & np.all(np.isfinite(jac), axis=(-2, -1))
        solvable[solvable] &= np.abs(np.linalg.det(jac[solvable])) > 0
        delta = np.zeros((idx.size, 4))
        if np.any(solvable):
            delta[solvable] = -np.linalg.solve(jac[solvable], r[idx][solvable][..., None])[..., 0]
        active[idx[~solvable]] = False

        # backtracking: halve the step until the residual decreases
        pending = idx[solvable]
        step_delta = delta[solvable]
        lam = 1.0
        for _ in range(opts.max_halvings + 1):
            if pending.size == 0:
                break
            trial = v[pending] + lam * step_delta
            rt, okt = residual(pending, trial)
            et = np.where(okt, np.linalg.norm(rt, axis=-1), np.inf)
            better = et < err[pending]
            acc = pending[better]
            v[acc], r[acc], err[acc] = trial[better], rt[better], et[better]
            pending, step_delta = pending[~better], step_delta[~better]
            lam *= 0.5
        # stalled starts stop here
        active[pending] = False
        active &= err >= target
    return v, err, iterations


def _run_starts(spec, p, q, starts, opts):
    if opts.threads > 1 and len(starts) > 1:
        chunks = np.array_split(np.arange(len(starts)), min(opts.threads, len(starts)))
        with ThreadPoolExecutor(max_workers=opts.threads) as pool:
            parts = list(pool.map(lambda c: _solve_starts(spec, p[c], q[c], starts[c], opts), chunks))
        return tuple(np.concatenate([part[k] for part in parts]) for k in range(3))
    return _solve_starts(spec, p, q, starts, opts)


def _select(spec, p, v, err, its, opts) -> ShootingResult:
    """Deterministic choice by (converged, length, start index)."""
    lengths = np.sqrt(np.maximum(inner(spec, p, v, v), 0.0))
    converged = err < opts.tol
    candidates = [
        {"start": i, "converged": bool(converged[i]), "error": float(err[i]), "length": float(lengths[i])}
        for i in range(len(v))
    ]
    if np.any(converged):
        best = min(np.flatnonzero(converged), key=lambda i: (lengths[i], i))
    else:
        best = min(range(len(v)), key=lambda i: (err[i], i))
    return ShootingResult(
        v[best].copy(), float(err[best]), float(lengths[best]), int(its[best]), bool(converged[best]), int(best), candidates
    )


def distance_shooting(spec: GeometrySpec, p, q, opts: ShootingOptions | None = None, starts=None) -> ShootingResult:
    """Length of a geodesic from ``p`` to ``q`` found by multi-start shooting.

    The returned length bounds the distance from above and equals it when
    the minimising geodesic is the one found.  Non-convergence is reported
    through ``converged=False`` together with the best candidate.
    """
    if starts is not None:
        opts = opts or ShootingOptions()
        p = check_point(spec, p)
        q = check_point(spec, q)
        starts = np.asarray(starts, dtype=float)
        k = len(starts)
        v, err, its = _run_starts(spec, np.tile(p, (k, 1)), np.tile(q, (k, 1)), starts, opts)
        return _select(spec, p, v, err, its, opts)
    return distance_shooting_batch(spec, np.asarray(p)[None], np.asarray(q)[None], opts)[0]


def distance_shooting_batch(spec: GeometrySpec, ps, qs, opts: ShootingOptions | None = None) -> list[ShootingResult]:
    """:func:`distance_shooting` for many pairs, solved as one batch.

    Each result is identical to the single-pair call.
    """
    opts = opts or ShootingOptions()
    ps = check_point(spec, np.atleast_2d(ps))
    qs = check_point(spec, np.atleast_2d(qs))
    results = [None] * len(ps)
    rows_p, rows_q, starts, owner = [], [], [], []
    for i, (p, q) in enumerate(zip(ps, qs)):
        gap = float(np.linalg.norm(_apply(np.linalg.cholesky(metric_at(spec, q)).T, p - q)))
        if gap < opts.tol:
            results[i] = ShootingResult(np.zeros(4), gap, 0.0, 0, True)
            continue
        s = default_starts(p, q, opts.chord_start)
        starts.append(s)
        rows_p.append(np.tile(p, (len(s), 1)))
        rows_q.append(np.tile(q, (len(s), 1)))
        owner += [i] * len(s)
    if starts:
        v, err, its = _run_starts(spec, np.vstack(rows_p), np.vstack(rows_q), np.vstack(starts), opts)
        owner = np.array(owner)
        for i in np.unique(owner):
            sel = owner == i
            results[i] = _select(spec, ps[i], v[sel], err[sel], its[sel], opts)
    return results
