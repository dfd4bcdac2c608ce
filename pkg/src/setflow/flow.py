"""Volume-coupled linear flows with Minkowski source terms.

The flows integrated here move a planar convex compact by the interplay of
two effects: an exact linear deformation ``exp(A t)`` whose clock runs at a
volume-dependent speed ``phi(V[u])``, and a Minkowski source ``F(V[u], u)``
added at unit rate.  In support-function language one step of the flow
pulls ``h`` back along ``exp(A^T phi dt)`` and adds the source samples.

The stepper is a Strang-type split: half an Euler step of the source, the
exact linear flow over ``dt`` with ``phi`` frozen at a midpoint volume
estimate, then the second source half-step.  A Picard iteration of the
defining integral operator is provided as an independent oracle on short
horizons.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from . import bodies
from .bodies import (SupportFunction2D, area, as_matrix, linear_image,
                     mixed_area, perimeter)
from .errors import BlowupError, ContractionError

OVERFLOW_FACTOR = 1e6
DEFAULT_DT = 1e-3
MAX_STORED_FRAMES = 1000


# ---------------------------------------------------------------------------
# parametric scalar functions (referencable from scenario files)


@dataclass(frozen=True)
class ScalarFunction:
    """Nonnegative scalar function of a nonnegative argument.

    Parametric so that scenario files can name it without embedding code:
    a constant, a rational function p(s)/q(s) (coefficients in ascending
    order), or a linearly interpolated table, assumed locally Lipschitz.
    """

    kind: str
    value: float = 0.0
    num: tuple = ()
    den: tuple = (1.0,)
    s_nodes: tuple = ()
    s_values: tuple = ()

    def __call__(self, s: float) -> float:
        if self.kind == "constant":
            return self.value
        if self.kind == "rational":
            s = float(s)
            return float(np.polyval(self.num[::-1], s)
                         / np.polyval(self.den[::-1], s))
        if self.kind == "table":
            return float(np.interp(float(s), self.s_nodes, self.s_values))
        raise ValueError(f"unknown scalar function kind {self.kind!r}")

    def to_dict(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "value": self.value}
        if self.kind == "rational":
            return {"kind": "rational", "num": list(self.num),
                    "den": list(self.den)}
        return {"kind": "table", "s": list(self.s_nodes),
                "values": list(self.s_values)}


def constant(value: float) -> ScalarFunction:
    if value < 0:
        raise ValueError("scalar functions here map into the nonnegative axis")
    return ScalarFunction(kind="constant", value=float(value))


def rational(num, den) -> ScalarFunction:
    return ScalarFunction(kind="rational", num=tuple(map(float, num)),
                          den=tuple(map(float, den)))


def table(s_nodes, s_values) -> ScalarFunction:
    s_nodes = tuple(map(float, s_nodes))
    s_values = tuple(map(float, s_values))
    if len(s_nodes) != len(s_values) or len(s_nodes) < 2:
        raise ValueError("table needs matching node/value sequences")
    return ScalarFunction(kind="table", s_nodes=s_nodes, s_values=s_values)


# ---------------------------------------------------------------------------
# source terms


@dataclass(frozen=True)
class SourceTerm:
    """The Minkowski source F(V, u) in one of four parametric shapes.

    ``ball``     -- psi(V) * unit disc
    ``linear``   -- psi(V) * (B u) for a fixed 2x2 matrix B
    ``constant`` -- a fixed body, independent of (V, u)
    ``zero``     -- no source
    """

    kind: str
    psi: object = None          # callable for 'ball' / 'linear'
    matrix: np.ndarray = None   # for 'linear'
    body: SupportFunction2D = None  # for 'constant'

    def values(self, volume: float, u_values: np.ndarray) -> np.ndarray | None:
        """Sample array of F(volume, u), or None when the source vanishes."""
        if self.kind == "zero":
            return None
        if self.kind == "ball":
            r = float(self.psi(volume))
            if r < 0:
                raise ValueError("psi must be nonnegative")
            return np.full(u_values.size, r)
        if self.kind == "linear":
            c = float(self.psi(volume))
            if c < 0:
                raise ValueError("psi must be nonnegative")
            return c * bodies._image_values(u_values, self.matrix)
        if self.kind == "constant":
            if self.body.grid_size != u_values.size:
                from .errors import GridMismatchError
                raise GridMismatchError("source body grid does not match state")
            return self.body.values
        raise ValueError(f"unknown source kind {self.kind!r}")

    def __call__(self, volume: float, u: SupportFunction2D):
        vals = self.values(volume, u.values)
        return None if vals is None else SupportFunction2D(vals)


def zero_source() -> SourceTerm:
    return SourceTerm(kind="zero")


def ball_source(psi) -> SourceTerm:
    return SourceTerm(kind="ball", psi=psi)


def linear_source(psi, matrix) -> SourceTerm:
    return SourceTerm(kind="linear", psi=psi, matrix=as_matrix(matrix))


def constant_source(body: SupportFunction2D) -> SourceTerm:
    return SourceTerm(kind="constant", body=body)


@dataclass(frozen=True)
class SemiflowParams:
    """The triple (A, phi, F) defining the flow."""

    A: np.ndarray
    phi: object                 # callable on the nonnegative axis
    source: SourceTerm

    def __post_init__(self):
        object.__setattr__(self, "A", as_matrix(self.A))

    @property
    def trace(self) -> float:
        return float(self.A[0, 0] + self.A[1, 1])


@dataclass
class Trajectory:
    """Stored frames of an orbit plus named scalar series along it."""

    times: np.ndarray
    bodies: list
    tracked: dict

    @property
    def final(self) -> SupportFunction2D:
        return self.bodies[-1]

    def to_csv(self) -> str:
        """CSV record: header ``t, V, perimeter, W0.., dH_ref``, one row per frame."""
        order = ["V", "perimeter"]
        order += sorted((k for k in self.tracked if k.startswith("W")),
                        key=lambda k: int(k[1:]))
        if "dH_ref" in self.tracked:
            order.append("dH_ref")
        cols = [k for k in order if k in self.tracked]
        lines = ["t," + ",".join(cols)]
        for i, t in enumerate(self.times):
            row = [f"{t:.12g}"] + [f"{self.tracked[k][i]:.12g}" for k in cols]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# stepping


def volume_rate(u: SupportFunction2D, params: SemiflowParams) -> float:
    """Instantaneous rate of change of the area along the flow.

    ``dV/dt = tr A * phi(V) * V + 2 * V[u, F(V, u)]`` -- the linear part
    contributes through the Liouville determinant factor, the source through
    the mixed area.
    """
    v = area(u)
    return _volume_rate_from(u, v, params)


def _volume_rate_from(u, v, params, source_vals=None):
    rate = params.trace * float(params.phi(v)) * v
    if source_vals is None:
        source_vals = params.source.values(v, u.values)
    if source_vals is not None:
        rate += 2.0 * mixed_area(u, source_vals)
    return rate


def _add_scaled(u_values: np.ndarray, f_values, factor: float) -> np.ndarray:
    if f_values is None:
        return u_values
    return u_values + factor * f_values


def step(u: SupportFunction2D, params: SemiflowParams, dt: float) -> SupportFunction2D:
    """One Strang-type split step of length dt.

    Source half-step (Minkowski addition of ``dt/2 * F``), exact linear
    flow ``h(exp(A^T phi dt) p)`` with phi frozen at the midpoint volume
    estimate ``V + (dt/2) * dV/dt``, then the second source half-step.
    The result is projected back into the convex cone when needed.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    v0 = area(u)
    f0 = params.source.values(v0, u.values)
    half = _add_scaled(u.values, f0, 0.5 * dt)

    v_mid = max(v0 + 0.5 * dt * _volume_rate_from(u, v0, params, f0), 0.0)
    phi_mid = float(params.phi(v_mid))
    if phi_mid < 0:
        raise ValueError("phi must be nonnegative")
    moved = linear_image(SupportFunction2D(half), expm(params.A * (phi_mid * dt)))

    v1 = area(moved)
    f1 = params.source.values(v1, moved.values)
    out = _add_scaled(moved.values, f1, 0.5 * dt)
    if not np.all(np.isfinite(out)):
        raise BlowupError("non-finite support values produced by step",
                          reached_time=dt)
    return SupportFunction2D(out)


def _tracker_functions(tracked, mixed_op=None, mixed_count=0, reference=None):
    funcs = []
    for name in tracked:
        if name == "V":
            funcs.append(("V", area))
        elif name == "perimeter":
            funcs.append(("perimeter", perimeter))
        elif name == "mixed":
            if mixed_op is None or mixed_count < 1:
                raise ValueError("tracking mixed functionals needs an operator and a count")
            mat = as_matrix(mixed_op)
            powers = [np.linalg.matrix_power(mat, i) for i in range(mixed_count)]
            for i, p in enumerate(powers):
                funcs.append((f"W{i}", lambda u, p=p: mixed_area(u, linear_image(u, p))))
        elif name == "dH_ref":
            if reference is None:
                raise ValueError("tracking dH_ref needs a reference body")
            funcs.append(("dH_ref",
                          lambda u: bodies.hausdorff_distance(u, reference)))
        else:
            raise ValueError(f"unknown tracked functional {name!r}")
    return funcs


def evolve(u0: SupportFunction2D, params: SemiflowParams, horizon: float,
           dt: float = DEFAULT_DT, tracked=("V", "perimeter"),
           mixed_op=None, mixed_count=0, reference=None,
           store_every: int | None = None) -> Trajectory:
    """Integrate the flow over [0, horizon], recording functionals at stored frames.

    Frames are thinned so at most ~1000 are kept unless ``store_every`` is
    given.  Raises :class:`BlowupError` with the reached time when the
    support values leave the overflow guard before the horizon (a lower
    bound for the escape time of the orbit).
    """
    if horizon <= 0 or dt <= 0:
        raise ValueError("horizon and dt must be positive")
    n_steps = max(1, int(np.ceil(horizon / dt - 1e-12)))
    if store_every is None:
        store_every = max(1, int(np.ceil(n_steps / MAX_STORED_FRAMES)))
    funcs = _tracker_functions(tracked, mixed_op, mixed_count, reference)

    guard = OVERFLOW_FACTOR * max(1.0, float(np.max(np.abs(u0.values))))
    times = [0.0]
    frames = [u0]
    series = {name: [fn(u0)] for name, fn in funcs}

    u, t = u0, 0.0
    for i in range(n_steps):
        h = min(dt, horizon - t)
        try:
            u = step(u, params, h)
        except BlowupError as exc:
            raise BlowupError(str(exc), reached_time=t,
                              partial=_finish(times, frames, series)) from None
        t += h
        if np.max(np.abs(u.values)) > guard:
            raise BlowupError(
                f"support values exceeded {guard:.3g} at t={t:.6g}",
                reached_time=t, partial=_finish(times, frames, series))
        if (i + 1) % store_every == 0 or i == n_steps - 1:
            times.append(t)
            frames.append(u)
            for name, fn in funcs:
                series[name].append(fn(u))
    return _finish(times, frames, series)


def _finish(times, frames, series):
    return Trajectory(times=np.asarray(times),
                      bodies=frames,
                      tracked={k: np.asarray(v) for k, v in series.items()})


# ---------------------------------------------------------------------------
# Picard oracle


def _perturbation_scale(u0):
    return max(1.0, float(np.max(np.abs(u0.values))))


def contraction_horizon(u0: SupportFunction2D, params: SemiflowParams) -> float:
    """Estimated horizon on which the integral operator is a contraction.

    Mirrors the constructive existence bound: with local Lipschitz
    estimates L (volume), H (phi) and L1 (source) sampled numerically
    around u0, the operator keeps a ball of radius r invariant as long as
    ``(e^{beta T} - 1)(|u0| + (|F0| + L1 r)/beta) <= r`` with
    ``beta = phi(V0) + L H r``.  A safety factor of 1/2 is applied.
    """
    v0 = area(u0)
    norm0 = float(np.max(np.abs(u0.values)))
    r = 0.5 * _perturbation_scale(u0)

    eps = 1e-4 * max(1.0, v0)
    lip_phi = abs(float(params.phi(v0 + eps)) - float(params.phi(max(v0 - eps, 0.0)))) / (2 * eps)
    # area is Lipschitz in the sup norm with constant <= perimeter of the
    # inflated body: perimeter(u0 + r K) = perimeter(u0) + 2 pi r
    lip_vol = perimeter(u0) + 2 * np.pi * r
    f0 = params.source.values(v0, u0.values)
    f0_norm = 0.0 if f0 is None else float(np.max(np.abs(f0)))

    du = 1e-3 * _perturbation_scale(u0)
    f_pert = params.source.values(area(SupportFunction2D(u0.values + du)),
                                  u0.values + du)
    if f_pert is None and f0 is None:
        lip_src = 0.0
    else:
        a = np.zeros(u0.grid_size) if f0 is None else f0
        b = np.zeros(u0.grid_size) if f_pert is None else f_pert
        lip_src = float(np.max(np.abs(b - a))) / du
    beta = max(float(params.phi(v0)) + lip_vol * lip_phi * r, 1e-12)
    t_ball = np.log1p(r * beta / (norm0 * beta + f0_norm + lip_src * r + 1e-12)) / beta
    return 0.5 * float(t_ball)


def picard_solve(u0: SupportFunction2D, params: SemiflowParams, horizon: float,
                 tol: float = 1e-8, max_iter: int = 60,
                 n_nodes: int = 17) -> Trajectory:
    """Solve the flow on a short horizon by fixed-point iteration.

    Iterates the integral operator

        (G u)(t) = exp(A Phi(t)) u0
                   + int_0^t exp(A (Phi(t) - Phi(s))) F(V[u(s)], u(s)) ds,
        Phi(t) = int_0^t phi(V[u(s)]) ds,

    on a uniform time grid until the sup-distance of successive iterates
    drops below ``tol``.  Independent of the split stepper, so it serves as
    an oracle for it.  Raises ValueError when ``horizon`` exceeds the
    estimated contraction horizon and :class:`ContractionError` when the
    iteration fails to contract.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    if n_nodes < 3:
        raise ValueError("need at least 3 time nodes")
    t_star = contraction_horizon(u0, params)
    if horizon > t_star:
        raise ValueError(
            f"horizon {horizon:.4g} exceeds estimated contraction horizon "
            f"{t_star:.4g}; use the stepper or a smaller horizon")
    times = np.linspace(0.0, horizon, n_nodes)
    dt = times[1] - times[0]

    current = [u0.values.copy() for _ in times]
    prev_dist = None
    a_mat = params.A
    for _ in range(max_iter):
        vols = np.array([max(_mixed_self(v), 0.0) for v in current])
        phis = np.array([float(params.phi(v)) for v in vols])
        big_phi = np.concatenate([[0.0], np.cumsum(0.5 * dt * (phis[1:] + phis[:-1]))])
        sources = [params.source.values(vols[j], current[j]) for j in range(n_nodes)]

        new = [u0.values.copy()]
        for i in range(1, n_nodes):
            acc = bodies._image_values(u0.values, expm(a_mat * big_phi[i]))
            # trapezoid in s over nodes 0..i
            for j in range(i + 1):
                if sources[j] is None:
                    continue
                w = dt if 0 < j < i else 0.5 * dt
                pulled = bodies._image_values(
                    sources[j], expm(a_mat * (big_phi[i] - big_phi[j])))
                acc = acc + w * pulled
            new.append(acc)
        dist = max(float(np.max(np.abs(a - b))) for a, b in zip(new, current))
        current = new
        if dist < tol:
            frames = [SupportFunction2D(v) for v in current]
            return Trajectory(
                times=times, bodies=frames,
                tracked={"V": np.array([area(b) for b in frames]),
                         "perimeter": np.array([perimeter(b) for b in frames])})
        if prev_dist is not None and dist > prev_dist and dist > tol:
            raise ContractionError(
                f"iteration distance grew {prev_dist:.3g} -> {dist:.3g}; "
                "horizon too long for contraction")
        prev_dist = dist
    raise ContractionError(f"no convergence within {max_iter} iterations "
                           f"(last distance {prev_dist:.3g})")


def _mixed_self(values):
    return bodies._mixed_form(values, values)


# ---------------------------------------------------------------------------
# special cases


def reach_set(A, control_body: SupportFunction2D, start: SupportFunction2D,
              horizon: float, dt: float = DEFAULT_DT, **kwargs) -> Trajectory:
    """Attainability sets of ``x' = A x + u`` with controls ranging in a body.

    The support function of the reachable set solves ``dh/dt = A*h + h_U``,
    which is the flow with unit clock and constant source.
    """
    params = SemiflowParams(A=as_matrix(A), phi=constant(1.0),
                            source=constant_source(control_body))
    return evolve(start, params, horizon, dt, **kwargs)


def mixed_functionals(u: SupportFunction2D, op, count: int) -> np.ndarray:
    """Mixed areas of u with the powers of an operator: W_i = V[u, B^i u].

    W_0 is the plain area; higher entries measure the interaction of the
    body with its rotated/sheared images.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    mat = as_matrix(op)
    out = np.empty(count)
    for i in range(count):
        out[i] = mixed_area(u, linear_image(u, np.linalg.matrix_power(mat, i)))
    return out
