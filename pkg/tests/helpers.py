"""Shared generators and independent oracles for the test suite."""

import numpy as np

from setflow import bodies, flow

GRID = 512


def random_polygon(rng, grid_size=GRID, max_vertices=10, spread=1.5):
    """Convex hull of a random point cloud (always a valid convex body)."""
    n = int(rng.integers(3, max_vertices + 1))
    pts = rng.uniform(-spread, spread, size=(n, 2))
    return bodies.make_polygon(pts, grid_size=grid_size)


def random_smooth_body(rng, grid_size=GRID):
    """Random band-limited support function, convex by construction.

    The curvature margin is kept positive: the harmonic amplitudes are small
    enough that h + h'' stays bounded away from zero, so linear images and
    flow pull-backs interpolate it with spectral accuracy.
    """
    theta = bodies.grid_angles(grid_size)
    r0 = rng.uniform(0.6, 1.4)
    h = np.full(grid_size, r0)
    shift = rng.uniform(0.0, 0.3)
    alpha = rng.uniform(0.0, 2 * np.pi)
    h += shift * np.cos(theta - alpha)
    budget = 0.7 * r0
    for k in range(2, 6):
        amp = rng.uniform(0.0, budget / (4 * (k * k - 1)))
        phase = rng.uniform(0.0, 2 * np.pi)
        h += amp * np.cos(k * theta - phase)
    return bodies.SupportFunction2D(h)


def random_mild_params(rng, grid_size=GRID):
    """Flow parameters gentle enough for the Picard contraction horizon."""
    a_mat = rng.uniform(-0.6, 0.6, size=(2, 2))
    phi = flow.constant(rng.uniform(0.3, 1.0))
    kind = rng.integers(0, 4)
    if kind == 0:
        source = flow.zero_source()
    elif kind == 1:
        source = flow.ball_source(flow.constant(rng.uniform(0.1, 0.5)))
    elif kind == 2:
        source = flow.linear_source(flow.constant(rng.uniform(0.1, 0.5)),
                                    rng.uniform(-0.7, 0.7, size=(2, 2)))
    else:
        source = flow.constant_source(
            bodies.scale(random_smooth_body(rng, grid_size), 0.3))
    return flow.SemiflowParams(A=a_mat, phi=phi, source=source)


def square_plus_disc_area(rho, half=0.5, n=3001):
    """Point-sampling oracle for the area of [−half, half]^2 + rho * disc.

    Counts midpoints of a uniform grid whose distance to the square is at
    most rho.  Independent of the support-function quadrature.
    """
    reach = half + rho + 0.05
    xs = np.linspace(-reach, reach, n)
    cell = xs[1] - xs[0]
    x, y = np.meshgrid(xs, xs, sparse=True)
    dx = np.maximum(np.abs(x) - half, 0.0)
    dy = np.maximum(np.abs(y) - half, 0.0)
    inside = dx * dx + dy * dy <= rho * rho + 1e-15
    return float(np.count_nonzero(inside)) * cell * cell
