"""Support-function calculus for planar convex compacts.

A convex compact ``u`` in the plane is stored as samples of its support
function ``h_u(theta) = sup_{x in u} <x, (cos theta, sin theta)>`` on a
uniform angular grid.  In this representation Minkowski sums are pointwise
sums, nonnegative scaling is pointwise scaling, the Hausdorff metric is the
sup norm of the difference, and area / mixed area are quadratic forms that
the FFT evaluates with spectral accuracy.  Degenerate compacts (segments,
single points) are first-class citizens: their support functions satisfy
``h + h'' >= 0`` only distributionally, which the discrete quadrature
handles without special cases.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

DEFAULT_GRID_SIZE = 512
MIN_GRID_SIZE = 16

# Discrete convexity is enforced up to a tolerance proportional to the body
# scale; inequality checks use a looser scale-relative tolerance.  The split
# keeps honest geometric violations distinguishable from discretization noise.
CONVEXITY_RTOL = 1e-8
INEQUALITY_RTOL = 1e-6


@lru_cache(maxsize=32)
def _grid_cache(m: int):
    theta = np.arange(m) * (2.0 * np.pi / m)
    dirs = np.column_stack([np.cos(theta), np.sin(theta)])
    theta.setflags(write=False)
    dirs.setflags(write=False)
    return theta, dirs


def grid_angles(m: int) -> np.ndarray:
    """Angles theta_j = 2*pi*j/m, j = 0..m-1."""
    return _grid_cache(m)[0]


def grid_directions(m: int) -> np.ndarray:
    """Unit direction vectors (cos theta_j, sin theta_j) as an (m, 2) array."""
    return _grid_cache(m)[1]


@dataclass(frozen=True, eq=False)
class SupportFunction2D:
    """A planar convex compact sampled as support values on the angular grid.

    ``values[j]`` is ``h(theta_j)`` with ``theta_j = 2*pi*j/M``.  The grid
    size must be even and at least 16.  Instances are immutable; every
    operation in this module returns a new body.
    """

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1:
            raise ValueError("support values must be a one-dimensional array")
        m = vals.size
        if m < MIN_GRID_SIZE or m % 2 != 0:
            raise ValueError(
                f"grid size must be even and >= {MIN_GRID_SIZE}, got {m}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("support values must be finite")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def grid_size(self) -> int:
        return self.values.size

    @property
    def angles(self) -> np.ndarray:
        return grid_angles(self.grid_size)

    def __repr__(self):
        return (f"SupportFunction2D(grid_size={self.grid_size}, "
                f"max|h|={np.max(np.abs(self.values)):.6g})")


@dataclass(frozen=True)
class LinearOperator2D:
    """A 2x2 real matrix acting on the plane, with finite entries."""

    entries: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.entries, dtype=float)
        if mat.shape != (2, 2):
            raise ValueError("expected a 2x2 matrix")
        if not np.all(np.isfinite(mat)):
            raise ValueError("matrix entries must be finite")
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "entries", mat)

    @property
    def trace(self) -> float:
        return float(self.entries[0, 0] + self.entries[1, 1])

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.entries))

    @classmethod
    def identity(cls):
        return cls(np.eye(2))

    @classmethod
    def zero(cls):
        return cls(np.zeros((2, 2)))

    @classmethod
    def rotation(cls, angle: float):
        c, s = np.cos(angle), np.sin(angle)
        return cls(np.array([[c, -s], [s, c]]))

    @classmethod
    def diagonal(cls, a: float, b: float):
        return cls(np.diag([float(a), float(b)]))


def as_matrix(op) -> np.ndarray:
    """Coerce a LinearOperator2D or any 2x2 array-like to an ndarray."""
    if isinstance(op, LinearOperator2D):
        return op.entries
    mat = np.asarray(op, dtype=float)
    if mat.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    if not np.all(np.isfinite(mat)):
        raise ValueError("matrix entries must be finite")
    return mat


def convexity_tolerance(values) -> float:
    return CONVEXITY_RTOL * max(1.0, float(np.max(np.abs(values))))


def inequality_tolerance(*quantities) -> float:
    scale = max((abs(float(q)) for q in quantities), default=0.0)
    return INEQUALITY_RTOL * max(1.0, scale)


def convexity_defect(values: np.ndarray) -> np.ndarray:
    """Three-point discretization of ``h + h''`` (times dtheta^2).

    Nonnegative entries (up to tolerance) characterize sampled support
    functions; degenerate bodies sit exactly on the boundary of the cone.
    """
    values = np.asarray(values, dtype=float)
    dtheta = 2.0 * np.pi / values.size
    return (np.roll(values, 1) - 2.0 * values + np.roll(values, -1)
            + dtheta * dtheta * values)


def second_derivative(values: np.ndarray) -> np.ndarray:
    """Spectral second derivative of periodic samples (exact for band-limited h)."""
    values = np.asarray(values, dtype=float)
    m = values.size
    k = np.arange(m // 2 + 1, dtype=float)
    return np.fft.irfft(-(k * k) * np.fft.rfft(values), m)


def first_derivative(values: np.ndarray) -> np.ndarray:
    """Spectral first derivative; the Nyquist mode is dropped (its slope is ambiguous)."""
    values = np.asarray(values, dtype=float)
    m = values.size
    k = np.arange(m // 2 + 1, dtype=float)
    coef = 1j * k * np.fft.rfft(values)
    coef[-1] = 0.0
    return np.fft.irfft(coef, m)


def _check_same_grid(u: SupportFunction2D, v: SupportFunction2D):
    if u.grid_size != v.grid_size:
        from .errors import GridMismatchError
        raise GridMismatchError(
            f"grid sizes differ: {u.grid_size} vs {v.grid_size}")


# ---------------------------------------------------------------------------
# constructors


def make_ball(radius: float, center=(0.0, 0.0),
              grid_size: int = DEFAULT_GRID_SIZE) -> SupportFunction2D:
    """Disc of given radius; ``h(theta) = radius + <center, p(theta)>``."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    center = np.asarray(center, dtype=float)
    return SupportFunction2D(radius + grid_directions(grid_size) @ center)


def make_polygon(vertices, grid_size: int = DEFAULT_GRID_SIZE) -> SupportFunction2D:
    """Convex hull of a nonempty point set, as a sampled support function."""
    verts = np.atleast_2d(np.asarray(vertices, dtype=float))
    if verts.size == 0:
        raise ValueError("need at least one vertex")
    if verts.shape[1] != 2:
        raise ValueError("vertices must be points in the plane")
    return SupportFunction2D(np.max(grid_directions(grid_size) @ verts.T, axis=1))


def make_segment(length: float, angle: float = 0.0,
                 grid_size: int = DEFAULT_GRID_SIZE) -> SupportFunction2D:
    """Centered segment of the given length along the given direction."""
    if length < 0:
        raise ValueError("length must be nonnegative")
    tip = 0.5 * length * np.array([np.cos(angle), np.sin(angle)])
    return make_polygon([tip, -tip], grid_size)


# ---------------------------------------------------------------------------
# Minkowski algebra and metric


def minkowski_add(u: SupportFunction2D, v: SupportFunction2D) -> SupportFunction2D:
    """Minkowski sum {x + y}; support functions add pointwise."""
    _check_same_grid(u, v)
    return SupportFunction2D(u.values + v.values)


def scale(u: SupportFunction2D, factor: float) -> SupportFunction2D:
    """Nonnegative dilation {factor * x}."""
    if factor < 0:
        raise ValueError("scale factor must be nonnegative")
    return SupportFunction2D(factor * u.values)


def hausdorff_distance(u: SupportFunction2D, v: SupportFunction2D) -> float:
    """Hausdorff distance: sup-norm of the support-function difference."""
    _check_same_grid(u, v)
    return float(np.max(np.abs(u.values - v.values)))


def hukuhara_difference(u: SupportFunction2D, v: SupportFunction2D):
    """The body ``w`` with ``u = v + w``, or None when no such body exists.

    The candidate ``h_u - h_v`` is a support function iff it passes the
    discrete convexity test; failure is a legitimate outcome, not an error.
    """
    _check_same_grid(u, v)
    w = u.values - v.values
    if np.min(convexity_defect(w)) < -convexity_tolerance(w):
        return None
    return SupportFunction2D(w)


# ---------------------------------------------------------------------------
# area functionals

def _mixed_form(hu: np.ndarray, hv: np.ndarray) -> float:
    # (1/2) * integral of h_u (h_v + h_v'') dtheta by the trapezoid rule,
    # evaluated in Fourier space.  The expression is a symmetric bilinear
    # form with Lorentz signature: the mean mode enters positively, the
    # translation modes (|k| = 1) drop out, all higher modes enter
    # negatively.  Symmetry in (u, v) is exact here, so the symmetrized
    # "mean of both orderings" coincides with the single evaluation.
    m = hu.size
    fu = np.fft.rfft(hu)
    fv = np.fft.rfft(hv)
    k = np.arange(m // 2 + 1, dtype=float)
    weight = np.full(m // 2 + 1, 2.0)
    weight[0] = 1.0
    weight[-1] = 1.0
    s = np.sum(weight * (1.0 - k * k) * (fu * fv.conjugate()).real)
    return float(np.pi * s / (m * m))


def area(u: SupportFunction2D) -> float:
    """Area ``(1/2) * integral h (h + h'') dtheta``, clamped at zero.

    For degenerate bodies the true value is 0 and the quadrature may land a
    hair on either side; tiny negatives are clamped.
    """
    raw = _mixed_form(u.values, u.values)
    return raw if raw > 0.0 else 0.0


def perimeter(u: SupportFunction2D) -> float:
    """Boundary length ``integral h dtheta``, clamped at zero."""
    raw = float(2.0 * np.pi * np.mean(u.values))
    return raw if raw > 0.0 else 0.0


def mixed_area(u: SupportFunction2D, v) -> float:
    """Mixed area V[u, v]: the bilinear symmetric extension of area.

    It is the coefficient structure of the quadratic expansion
    ``area(u + rho v) = V[u] + 2 rho V[u, v] + rho^2 V[v]`` and reduces to
    the area when ``u = v``.  The second argument may be a raw sample array
    (e.g. a directional derivative of a body map), since the form is
    bilinear in the samples.
    """
    hv = v.values if isinstance(v, SupportFunction2D) else np.asarray(v, float)
    if hv.size != u.grid_size:
        from .errors import GridMismatchError
        raise GridMismatchError(
            f"grid sizes differ: {u.grid_size} vs {hv.size}")
    return _mixed_form(u.values, hv)


@dataclass(frozen=True)
class MixedAreaReport:
    """Areas, mixed area, and the Brunn-Minkowski slack of a pair of bodies."""

    area_u: float
    area_v: float
    mixed: float
    bm_slack: float   # mixed^2 - area_u * area_v, nonnegative up to tolerance


def mixed_area_report(u: SupportFunction2D, v: SupportFunction2D) -> MixedAreaReport:
    au, av, m = area(u), area(v), mixed_area(u, v)
    return MixedAreaReport(area_u=au, area_v=av, mixed=m,
                           bm_slack=m * m - au * av)


def steiner_fit(u: SupportFunction2D, v: SupportFunction2D, rho_samples):
    """Least-squares quadratic fit of ``rho -> area(u + rho v)``.

    Returns coefficients (c0, c1, c2) with c0 ~ V[u], c1 ~ 2 V[u,v],
    c2 ~ V[v].  Since the sampled areas are exactly quadratic in rho, any
    three or more distinct sample points recover the coefficients.
    """
    rho = np.unique(np.asarray(rho_samples, dtype=float))
    if rho.size < 3:
        raise ValueError("need at least 3 distinct rho samples")
    if np.any(rho < 0):
        raise ValueError("rho samples must be nonnegative")
    areas = [area(minkowski_add(u, scale(v, float(r)))) for r in rho]
    c2, c1, c0 = np.polyfit(rho, areas, 2)
    return float(c0), float(c1), float(c2)


# ---------------------------------------------------------------------------
# linear images


def _image_values(values: np.ndarray, mat: np.ndarray) -> np.ndarray:
    """Samples of the support function of M u from samples of u.

    Uses the pull-back rule ``h_{Mu}(p) = |M^T p| * h_u(M^T p / |M^T p|)``.
    When every pulled-back direction lands on a grid node the resampling is
    an exact gather (rotations by grid multiples, axis reflections, scalar
    matrices); otherwise a periodic cubic spline interpolates.
    """
    m = values.size
    w = grid_directions(m) @ mat            # rows are M^T p_j
    norms = np.hypot(w[:, 0], w[:, 1])
    out = np.zeros(m)
    nz = norms > 1e-14 * max(1.0, float(np.max(norms)))
    if not np.any(nz):
        return out
    ang = np.arctan2(w[nz, 1], w[nz, 0])
    dtheta = 2.0 * np.pi / m
    idx = (ang / dtheta) % m
    nearest = np.rint(idx)
    if np.max(np.abs(idx - nearest)) < 1e-9:
        out[nz] = norms[nz] * values[nearest.astype(int) % m]
        return out
    from scipy.interpolate import CubicSpline
    theta_ext = np.append(grid_angles(m), 2.0 * np.pi)
    h_ext = np.append(values, values[0])
    spline = CubicSpline(theta_ext, h_ext, bc_type="periodic")
    out[nz] = norms[nz] * spline(idx * dtheta)
    return out


def linear_image(u: SupportFunction2D, op) -> SupportFunction2D:
    """Image of the body under a linear map; area multiplies by |det|.

    Singular maps are allowed and produce degenerate images.  If resampling
    leaves the discrete convexity cone beyond tolerance, the result is
    projected back by :func:`convexify`.
    """
    mat = as_matrix(op)
    if mat[0, 0] == 1.0 and mat[1, 1] == 1.0 and mat[0, 1] == 0.0 and mat[1, 0] == 0.0:
        return u
    vals = _image_values(u.values, mat)
    body = SupportFunction2D(vals)
    if np.min(convexity_defect(vals)) < -convexity_tolerance(vals):
        body = convexify(body)
    return body


def convexify(u: SupportFunction2D) -> SupportFunction2D:
    """Project onto the discretely convex cone.

    Reconstructs the sampled boundary points ``x(theta) = h p + h' p_perp``
    and resamples the support function of their convex hull (the max of
    ``<x_i, p_j>`` over all sample points equals the hull's support).
    """
    h = u.values
    hp = first_derivative(h)
    dirs = grid_directions(u.grid_size)
    perp = np.column_stack([-dirs[:, 1], dirs[:, 0]])
    points = h[:, None] * dirs + hp[:, None] * perp
    return SupportFunction2D(np.max(points @ dirs.T, axis=0))


# ---------------------------------------------------------------------------
# validation


def validate(u: SupportFunction2D) -> list:
    """List of invariant violations (empty when the body is valid).

    Checks grid structure, finiteness, and the discrete convexity
    inequality at its scale-relative tolerance.  Degenerate bodies pass.
    """
    problems = []
    vals = np.asarray(u.values, dtype=float)
    m = vals.size
    if m < MIN_GRID_SIZE or m % 2 != 0:
        problems.append(f"grid size {m} must be even and >= {MIN_GRID_SIZE}")
    if not np.all(np.isfinite(vals)):
        problems.append("support values contain non-finite entries")
        return problems
    defect = convexity_defect(vals)
    tol = convexity_tolerance(vals)
    bad = defect < -tol
    if np.any(bad):
        j = int(np.argmin(defect))
        problems.append(
            f"discrete convexity violated at {int(np.sum(bad))} angles "
            f"(worst {defect[j]:.3e} < -{tol:.3e} at theta={u.angles[j]:.6f})")
    return problems
