"""Comparison ODE systems on the nonnegative cone and stability verdicts.

The scalar functionals tracked along an orbit (area, mixed areas, norms)
satisfy differential inequalities whose right-hand sides form a
finite-dimensional comparison system.  When that system is quasimonotone
(Wazewski condition: off-diagonal monotonicity), its solutions dominate
the functionals, so stability questions about the flow reduce to the ODE.
Everything here is numerical evidence, not proof: quasimonotonicity is
sampled on a box, and stability verdicts are sampled over initial
conditions -- each verdict records the samples and margins it rests on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BlowupError

GUARD_FACTOR = 1e12
SAMPLED_EVIDENCE_NOTE = ("sampled evidence only: quasimonotonicity and cone "
                         "behavior checked on the supplied box, not globally")


@dataclass(frozen=True)
class ComparisonSystem:
    """An ODE ``xi' = g(xi)`` on the nonnegative cone.

    ``rhs`` maps a state vector to its derivative; set ``time_dependent``
    for right-hand sides with signature ``rhs(t, xi)``.
    """

    dim: int
    rhs: object
    name: str = ""
    time_dependent: bool = False

    def __call__(self, t: float, xi: np.ndarray) -> np.ndarray:
        if self.time_dependent:
            return np.asarray(self.rhs(t, xi), dtype=float)
        return np.asarray(self.rhs(xi), dtype=float)


# -- standard families -------------------------------------------------------


def nilpotent_source_system(phi, psi, a: float = -1.0) -> ComparisonSystem:
    """Area/mixed-area pair for a linear-body source with B^2 = 0.

    ``xi0' = 2 a phi(xi0) xi0 + 2 psi(xi0) xi1``,
    ``xi1' = 2 a phi(xi0) xi1``  (a = the scalar part of A, usually -1).
    """
    def rhs(xi):
        p, q = float(phi(xi[0])), float(psi(xi[0]))
        return np.array([2 * a * p * xi[0] + 2 * q * xi[1],
                         2 * a * p * xi[1]])
    return ComparisonSystem(dim=2, rhs=rhs, name="nilpotent_source")


def cyclic_mixed_system(phi, psi, k: int, a: float = -1.0) -> ComparisonSystem:
    """Coupled mixed-area chain for a linear-body source with B^k = identity.

    The chain closes cyclically: each W_i = V[u, B^i u] feeds its
    neighbors, and the last feeds back into W_0.
    """
    if k < 1:
        raise ValueError("k must be >= 1")

    def rhs(xi):
        p, q = float(phi(xi[0])), float(psi(xi[0]))
        out = np.empty(k)
        if k == 1:
            out[0] = 2 * a * p * xi[0] + 2 * q * xi[0]
            return out
        out[0] = 2 * a * p * xi[0] + 2 * q * xi[1]
        for i in range(1, k - 1):
            out[i] = 2 * a * p * xi[i] + q * (xi[i - 1] + xi[i + 1])
        out[k - 1] = 2 * a * p * xi[k - 1] + q * (xi[k - 2] + xi[0])
        return out
    return ComparisonSystem(dim=k, rhs=rhs, name=f"cyclic_mixed_k{k}")


def sde_growth_system(matrix) -> ComparisonSystem:
    """Growth system for the set equation ``D_H u = B u`` (det B < 0, tr B >= 0).

    ``xi0' = 2 xi1``, ``xi1' = 2 |det B| xi0 + tr B xi1``; the right-hand
    sides are quasimonotone since the off-diagonal coefficients are
    nonnegative.
    """
    mat = np.asarray(matrix, dtype=float)
    det = float(np.linalg.det(mat))
    tr = float(np.trace(mat))
    if det >= 0 or tr < 0:
        raise ValueError("requires det B < 0 and tr B >= 0")
    m = np.array([[0.0, 2.0], [2.0 * abs(det), tr]])
    return ComparisonSystem(dim=2, rhs=lambda xi: m @ xi, name="sde_growth")


def linear_system(matrix, name: str = "linear") -> ComparisonSystem:
    mat = np.asarray(matrix, dtype=float)
    return ComparisonSystem(dim=mat.shape[0], rhs=lambda xi: mat @ xi, name=name)


def scalar_system(f, name: str = "scalar", time_dependent: bool = False) -> ComparisonSystem:
    if time_dependent:
        return ComparisonSystem(dim=1, rhs=lambda t, xi: np.array([f(t, xi[0])]),
                                name=name, time_dependent=True)
    return ComparisonSystem(dim=1, rhs=lambda xi: np.array([f(xi[0])]), name=name)


# -- integration -------------------------------------------------------------


@dataclass
class ComparisonTrajectory:
    times: np.ndarray
    states: np.ndarray          # shape (len(times), dim)
    clamp_events: int = 0
    stopped_early: bool = False

    def component(self, i: int) -> np.ndarray:
        return self.states[:, i]


def _rk4(system, t, xi, h):
    k1 = system(t, xi)
    k2 = system(t + 0.5 * h, xi + 0.5 * h * k1)
    k3 = system(t + 0.5 * h, xi + 0.5 * h * k2)
    k4 = system(t + h, xi + h * k3)
    return xi + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate(system: ComparisonSystem, xi0, horizon: float | None = None,
              dt_out: float | None = None, times=None,
              rtol: float = 1e-8, atol: float = 1e-12,
              clamp: bool = True, stop_condition=None) -> ComparisonTrajectory:
    """Adaptive RK4 trajectory on [0, horizon], sampled on a uniform grid.

    Step doubling controls the local error.  Negative undershoots are
    clamped to zero (the cone is the domain of the theory) and counted.
    Raises :class:`BlowupError` when the state escapes the overflow guard;
    an optional ``stop_condition(t, xi)`` terminates the trajectory early
    (used by stability searches once a threshold is crossed).
    """
    xi = np.asarray(xi0, dtype=float).copy()
    if xi.shape != (system.dim,):
        raise ValueError(f"initial state must have dimension {system.dim}")
    if np.any(xi < 0):
        raise ValueError("initial state must lie in the nonnegative cone")
    if times is None:
        if horizon is None or horizon <= 0:
            raise ValueError("horizon must be positive")
        n_out = max(1, int(round(horizon / dt_out))) if dt_out else 200
        times = np.linspace(0.0, horizon, n_out + 1)
    else:
        times = np.asarray(times, dtype=float)
        if times[0] != 0.0 or np.any(np.diff(times) <= 0):
            raise ValueError("output times must increase from 0")

    guard = GUARD_FACTOR * max(1.0, float(np.max(np.abs(xi))))
    states = [xi.copy()]
    clamped = 0
    t = 0.0
    h = (times[-1] / max(len(times) - 1, 1)) / 4.0

    for target in times[1:]:
        while t < target - 1e-14 * max(1.0, target):
            h_try = min(h, target - t)
            big = _rk4(system, t, xi, h_try)
            half = _rk4(system, t, xi, 0.5 * h_try)
            two = _rk4(system, t + 0.5 * h_try, half, 0.5 * h_try)
            err = float(np.max(np.abs(big - two))) / 15.0
            tol = atol + rtol * max(float(np.max(np.abs(xi))),
                                    float(np.max(np.abs(two))), 1e-300)
            if err <= tol:
                t += h_try
                xi = two
                if clamp and np.any(xi < 0):
                    clamped += int(np.sum(xi < 0))
                    xi = np.maximum(xi, 0.0)
                if not np.all(np.isfinite(xi)) or np.max(np.abs(xi)) > guard:
                    raise BlowupError(
                        f"comparison state escaped the guard at t={t:.6g}",
                        reached_time=t,
                        partial=ComparisonTrajectory(
                            np.asarray(times[:len(states)]), np.asarray(states),
                            clamped))
                if stop_condition is not None and stop_condition(t, xi):
                    states.append(xi.copy())
                    return ComparisonTrajectory(
                        np.append(times[:len(states) - 1], t),
                        np.asarray(states), clamped, stopped_early=True)
                h = h_try * min(5.0, max(0.2, 0.9 * (tol / max(err, 1e-300)) ** 0.2))
            else:
                h = h_try * max(0.1, 0.9 * (tol / err) ** 0.2)
            if h < 1e-13 * max(1.0, t):
                raise BlowupError("step size underflow in adaptive RK4",
                                  reached_time=t)
        states.append(xi.copy())
    return ComparisonTrajectory(times=np.asarray(times),
                                states=np.asarray(states),
                                clamp_events=clamped)


# -- measures ----------------------------------------------------------------


@dataclass(frozen=True)
class HahnFunction:
    """Strictly increasing wrapper with value 0 at 0: ``c * s ** p``."""

    coefficient: float = 1.0
    exponent: float = 1.0

    def __post_init__(self):
        if self.coefficient <= 0 or self.exponent <= 0:
            raise ValueError("Hahn-class functions need positive coefficient and exponent")

    def __call__(self, s: float) -> float:
        return self.coefficient * float(s) ** self.exponent

    def inverse(self, y: float) -> float:
        return (float(y) / self.coefficient) ** (1.0 / self.exponent)


IDENTITY = HahnFunction()


@dataclass(frozen=True)
class MeasurePair:
    """Measures of initial (h0) and current (h) deviation with Hahn wrappers.

    ``h0`` and ``h`` are callables on bodies (volume, Hausdorff distance to
    a reference, max of mixed functionals); ``a`` and ``b`` translate
    between measure values and comparison-system coordinates:
    ``W_i[u] <= b(h0[u])`` and ``W_0[u] >= a(h[u])``.
    """

    h0: object
    h: object
    a: HahnFunction = IDENTITY
    b: HahnFunction = IDENTITY


def volume_measure():
    from .bodies import area
    fn = lambda u: area(u)
    fn.name = "volume"
    return fn


def hausdorff_to(reference):
    from .bodies import hausdorff_distance
    fn = lambda u: hausdorff_distance(u, reference)
    fn.name = "hausdorff_to"
    return fn


def max_mixed(op, count: int):
    from .flow import mixed_functionals
    fn = lambda u: float(np.max(mixed_functionals(u, op, count)))
    fn.name = f"max_mixed_{count}"
    return fn


# -- verdicts and checks -----------------------------------------------------


@dataclass(frozen=True)
class StabilityVerdict:
    """Outcome of a sampled stability check, with the evidence it rests on."""

    kind: str                   # stable | asymptotically_stable |
                                # practically_stable | unstable | inconclusive
    witness: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, **_plain(self.witness)}


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


@dataclass(frozen=True)
class WazewskiReport:
    passed: bool
    samples: int
    violation: dict | None = None
    note: str = SAMPLED_EVIDENCE_NOTE

    def to_dict(self) -> dict:
        return _plain({"passed": self.passed, "samples": self.samples,
                       "violation": self.violation, "note": self.note})


def check_wazewski(system: ComparisonSystem, sample_box, n_samples: int = 256,
                   seed: int = 0, tol: float = 1e-9) -> WazewskiReport:
    """Sampled quasimonotonicity check.

    Draws pairs ``xi <= eta`` agreeing in one coordinate and requires the
    corresponding component of the right-hand side not to decrease:
    ``g_i(xi) <= g_i(eta) + tol``.  Reports the first violation found.
    """
    lo, hi = _box_bounds(sample_box, system.dim)
    rng = np.random.default_rng(seed)
    for _ in range(n_samples):
        xi = rng.uniform(lo, hi)
        eta = xi + rng.uniform(0.0, 1.0, system.dim) * (hi - xi)
        for i in range(system.dim):
            eta_i = eta.copy()
            eta_i[i] = xi[i]
            gx = system(0.0, xi)[i]
            ge = system(0.0, eta_i)[i]
            if gx > ge + tol:
                return WazewskiReport(
                    passed=False, samples=n_samples,
                    violation={"component": i, "xi": xi, "eta": eta_i,
                               "g_xi": gx, "g_eta": ge})
    return WazewskiReport(passed=True, samples=n_samples)


def _box_bounds(sample_box, dim):
    box = np.asarray(sample_box, dtype=float)
    if box.shape == (2,):
        lo = np.full(dim, box[0])
        hi = np.full(dim, box[1])
    elif box.shape == (dim, 2):
        lo, hi = box[:, 0], box[:, 1]
    else:
        raise ValueError("sample box must be (lo, hi) or per-dimension rows")
    if np.any(lo < 0) or np.any(hi <= lo):
        raise ValueError("sample box must be a nondegenerate box in the cone")
    return lo, hi


def check_xi0_stability(system: ComparisonSystem, eps_grid=(0.1, 1.0),
                        T_check: float = 50.0, n_directions: int = 64,
                        bisect_iters: int = 40, seed: int = 0,
                        rtol: float = 1e-6,
                        decay_factor: float = 1e-3) -> StabilityVerdict:
    """Sampled first-component stability of the zero solution on the cone.

    For each epsilon a bisection searches for delta such that all sampled
    initial states with sup-norm below delta keep ``xi_0(t) < eps`` on
    [0, T_check].  The asymptotic variant additionally requires the sampled
    ``xi_0(T_check)`` to fall below ``decay_factor * xi_0(0)``.  The
    verdict is evidence, not proof, and says so.
    """
    eps_grid = tuple(eps_grid)
    if not eps_grid or any(e <= 0 for e in eps_grid):
        raise ValueError("eps_grid must hold positive thresholds")
    g0 = system(0.0, np.zeros(system.dim))
    if np.max(np.abs(g0)) > 1e-10:
        raise ValueError("the comparison system must have a trivial solution at 0")

    rng = np.random.default_rng(seed)
    dirs = rng.uniform(0.0, 1.0, size=(n_directions, system.dim))
    dirs[n_directions // 2:] /= np.maximum(
        np.max(dirs[n_directions // 2:], axis=1, keepdims=True), 1e-30)

    def survives(delta, eps, collect=None):
        for d in dirs:
            xi0 = delta * d * (1 - 1e-12)
            stop = lambda t, xi: xi[0] >= eps
            try:
                traj = integrate(system, xi0, horizon=T_check, dt_out=T_check / 32,
                                 rtol=rtol, stop_condition=stop)
            except BlowupError:
                return False
            if traj.stopped_early or np.max(traj.states[:, 0]) >= eps:
                return False
            if collect is not None:
                collect.append((xi0[0], traj.states[-1, 0]))
        return True

    table = []
    floor = 1e-12
    for eps in sorted(eps_grid):
        hi = float(eps)
        if survives(hi, eps):
            table.append((eps, hi))
            continue
        lo = 0.0
        for _ in range(bisect_iters):
            mid = 0.5 * (lo + hi)
            if mid <= floor:
                break
            if survives(mid, eps):
                lo = mid
            else:
                hi = mid
        if lo <= floor:
            return StabilityVerdict(
                kind="unstable",
                witness={"failed_eps": eps, "delta_floor": floor,
                         "samples": n_directions, "T_check": T_check,
                         "delta_table": table, "note": SAMPLED_EVIDENCE_NOTE})
        table.append((eps, lo))

    # decay of the first component from well inside the smallest found delta
    finals = []
    survives(0.5 * min(d for _, d in table), min(e for e, _ in table), collect=finals)
    decays = [f < decay_factor * x0 for x0, f in finals if x0 > 0]
    kind = "asymptotically_stable" if decays and all(decays) else "stable"
    return StabilityVerdict(kind=kind, witness={
        "delta_table": table, "samples": n_directions, "T_check": T_check,
        "decay_checked": len(decays), "note": SAMPLED_EVIDENCE_NOTE})


def check_practical(system: ComparisonSystem, lam: float, bound: float,
                    horizon: float, measures: MeasurePair | None = None,
                    rtol: float = 1e-10) -> StabilityVerdict:
    """Practical stability via the comparison state started at ``b(lam) * e``.

    Integrates from the all-ones profile scaled by ``b(lam)`` and compares
    the first component at the horizon against ``a(bound)``; the flow is
    practically (lam, bound, horizon)-stable when the inequality is strict.
    """
    if not 0 < lam < bound:
        raise ValueError("requires 0 < lam < bound")
    a = measures.a if measures else IDENTITY
    b = measures.b if measures else IDENTITY
    start = float(b(lam)) * np.ones(system.dim)
    threshold = float(a(bound))
    if horizon == 0:
        margin = threshold - start[0]
        kind = "practically_stable" if margin > 0 else "inconclusive"
        return StabilityVerdict(kind=kind, witness={
            "xi0_final": start[0], "threshold": threshold, "margin": margin,
            "lambda": lam, "bound": bound, "horizon": 0.0})
    try:
        traj = integrate(system, start, horizon=horizon, dt_out=horizon / 256,
                         rtol=rtol)
    except BlowupError as exc:
        return StabilityVerdict(kind="unstable", witness={
            "diagnostic": f"comparison system blew up at t={exc.reached_time:.6g}",
            "lambda": lam, "bound": bound, "horizon": horizon,
            "threshold": threshold})
    xi0_final = float(traj.states[-1, 0])
    margin = threshold - xi0_final
    kind = "practically_stable" if margin > 0 else "inconclusive"
    return StabilityVerdict(kind=kind, witness={
        "xi0_final": xi0_final, "xi0_max": float(np.max(traj.states[:, 0])),
        "threshold": threshold, "margin": margin,
        "lambda": lam, "bound": bound, "horizon": horizon,
        "initial_state": start})


@dataclass(frozen=True)
class DominanceReport:
    """Comparison of tracked functionals against the dominating ODE solution."""

    passed: bool
    max_violation: float
    tolerance: float
    margins: dict

    def to_dict(self) -> dict:
        return _plain({"passed": self.passed, "max_violation": self.max_violation,
                       "tolerance": self.tolerance, "margins": self.margins})


def bound_check(trajectory, system: ComparisonSystem, functional_names,
                tol_scale: float = 1e-4, rtol: float = 1e-10) -> DominanceReport:
    """Verify tracked functionals never exceed the comparison solution.

    The comparison system starts from the functional values at the first
    stored frame and is sampled at exactly the stored times; the check is
    ``W_i(t) <= xi_i(t) + tol`` with a tolerance relative to the overall
    scale of the compared quantities.
    """
    names = list(functional_names)
    if len(names) != system.dim:
        raise ValueError("one functional per comparison component is required")
    series = np.column_stack([trajectory.tracked[n] for n in names])
    xi0 = np.maximum(series[0], 0.0)
    comp = integrate(system, xi0, horizon=float(trajectory.times[-1]),
                     times=trajectory.times, rtol=rtol)
    scale = max(1.0, float(np.max(np.abs(comp.states))),
                float(np.max(np.abs(series))))
    tol = tol_scale * scale
    diff = series - comp.states
    margins = {n: float(np.max(diff[:, i])) for i, n in enumerate(names)}
    worst = max(margins.values())
    return DominanceReport(passed=worst <= tol, max_violation=worst,
                           tolerance=tol, margins=margins)


@dataclass(frozen=True)
class QuadraticDecayReport:
    """Sampled negative-definiteness of a quadratic form's orbital derivative."""

    passed: bool
    worst_ratio: float
    worst_point: np.ndarray
    samples: int

    def to_dict(self) -> dict:
        return _plain({"passed": self.passed, "worst_ratio": self.worst_ratio,
                       "worst_point": self.worst_point, "samples": self.samples})


def lyapunov_quadratic_check(system: ComparisonSystem, weights=None,
                             sample_box=(1e-3, 10.0), n_samples: int = 4096,
                             seed: int = 0) -> QuadraticDecayReport:
    """Sample ``d/dt [ (1/2) sum_i beta_i xi_i^2 ]`` on the punctured cone.

    The reported ratio normalizes the derivative by the weighted square
    norm, so homogeneous systems give scale-free numbers; the check passes
    when every sampled ratio is negative.
    """
    beta = (np.ones(system.dim) if weights is None
            else np.asarray(weights, dtype=float))
    if beta.shape != (system.dim,) or np.any(beta <= 0):
        raise ValueError("weights must be positive, one per component")
    lo, hi = _box_bounds(sample_box, system.dim)
    rng = np.random.default_rng(seed)
    pts = rng.uniform(lo, hi, size=(n_samples, system.dim))
    worst = -np.inf
    worst_pt = pts[0]
    for xi in pts:
        dv = float(np.dot(beta * xi, system(0.0, xi)))
        ratio = dv / float(np.dot(beta, xi * xi))
        if ratio > worst:
            worst, worst_pt = ratio, xi
    return QuadraticDecayReport(passed=worst < 0.0, worst_ratio=worst,
                                worst_point=worst_pt, samples=n_samples)
