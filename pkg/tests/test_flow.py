"""Split-step integrator, Picard oracle, volume rates, reachable sets."""

import numpy as np
import pytest
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from setflow import bodies as B, flow as F
from setflow.errors import BlowupError

import helpers

RNG = np.random.default_rng(77)

MINUS_I = -np.eye(2)
QUARTER_TURN = np.array([[0.0, -1.0], [1.0, 0.0]])


def zero_params():
    return F.SemiflowParams(A=np.zeros((2, 2)), phi=F.constant(1.0),
                            source=F.zero_source())


def contraction_params(psi=0.0):
    src = F.ball_source(F.constant(psi)) if psi else F.zero_source()
    return F.SemiflowParams(A=MINUS_I, phi=F.constant(1.0), source=src)


class TestStep:
    def test_zero_params_is_identity(self):
        u = helpers.random_polygon(RNG)
        assert B.hausdorff_distance(F.step(u, zero_params(), 0.01), u) == 0.0

    def test_contraction_of_ball(self):
        k = B.make_ball(1.0)
        traj = F.evolve(k, contraction_params(), horizon=1.0, dt=1e-3)
        assert B.hausdorff_distance(traj.final, B.make_ball(np.exp(-1.0))) < 1e-5

    def test_driftless_step_is_minkowski_euler(self):
        # with A = 0 one step equals u + dt * B u up to O(dt^2)
        u = B.make_polygon([[0.5, 0.5], [-0.5, 0.5], [-0.5, -0.5], [0.5, -0.5]])
        mat = np.array([[0.0, 1.0], [1.0, 0.0]])
        params = F.SemiflowParams(A=np.zeros((2, 2)), phi=F.constant(1.0),
                                  source=F.linear_source(F.constant(1.0), mat))
        dt = 1e-3
        stepped = F.step(u, params, dt)
        euler = B.minkowski_add(u, B.scale(B.linear_image(u, mat), dt))
        assert B.hausdorff_distance(stepped, euler) < dt * dt

    def test_nonpositive_dt_rejected(self):
        with pytest.raises(ValueError):
            F.step(B.make_ball(1.0), zero_params(), 0.0)


class TestEvolve:
    def test_constant_trajectory(self):
        u = helpers.random_smooth_body(RNG)
        traj = F.evolve(u, zero_params(), horizon=0.5, dt=0.01)
        assert B.hausdorff_distance(traj.final, u) == 0.0
        assert np.allclose(traj.tracked["V"], B.area(u))

    def test_blowup_reports_reached_time(self):
        params = F.SemiflowParams(A=np.eye(2), phi=F.constant(1.0),
                                  source=F.zero_source())
        with pytest.raises(BlowupError) as err:
            F.evolve(B.make_ball(1.0), params, horizon=30.0, dt=0.01)
        assert 0 < err.value.reached_time < 30.0
        assert err.value.partial is not None

    def test_linear_part_matches_single_pullback(self):
        u = helpers.random_smooth_body(RNG)
        a_mat = np.array([[0.2, 0.5], [-0.4, 0.1]])
        params = F.SemiflowParams(A=a_mat, phi=F.constant(0.8),
                                  source=F.zero_source())
        traj = F.evolve(u, params, horizon=1.0, dt=0.01)
        exact = B.linear_image(u, expm(a_mat * 0.8))
        assert B.hausdorff_distance(traj.final, exact) < 1e-6

    def test_liouville_area_ratio(self):
        # with F = 0 and constant phi the area grows exactly like the
        # determinant of the flow map
        for _ in range(3):
            u = helpers.random_smooth_body(RNG)
            a_mat = RNG.uniform(-0.5, 0.5, size=(2, 2))
            c = RNG.uniform(0.4, 1.2)
            params = F.SemiflowParams(A=a_mat, phi=F.constant(c),
                                      source=F.zero_source())
            traj = F.evolve(u, params, horizon=1.0, dt=0.01)
            ratio = traj.tracked["V"][-1] / B.area(u)
            assert ratio == pytest.approx(np.exp(np.trace(a_mat) * c), rel=1e-4)

    def test_semigroup_law(self):
        u = helpers.random_smooth_body(RNG)
        params = helpers.random_mild_params(RNG)
        dt = 1e-3
        once = F.evolve(u, params, horizon=0.05, dt=dt).final
        half = F.evolve(u, params, horizon=0.02, dt=dt).final
        chained = F.evolve(half, params, horizon=0.03, dt=dt).final
        assert B.hausdorff_distance(once, chained) <= 10 * dt

    def test_continuity_in_initial_data(self):
        params = F.SemiflowParams(A=MINUS_I, phi=F.constant(1.0),
                                  source=F.ball_source(F.constant(0.5)))
        u0 = B.make_ball(1.0)
        u1 = B.make_ball(1.0, center=(0.01, 0.0))
        d0 = B.hausdorff_distance(u0, u1)
        dT = B.hausdorff_distance(F.evolve(u0, params, 0.5, 1e-3).final,
                                  F.evolve(u1, params, 0.5, 1e-3).final)
        assert dT <= 5.0 * d0

    def test_reflection_orbit_of_asymmetric_body(self):
        # a body that is not reflection-symmetric drives both decay modes of
        # the two-mode closed form (the acceptance square only drives one)
        from setflow.certificates import reflection_area_profile
        u0 = B.make_polygon([[1.0, 0.1], [-0.3, 0.8], [-0.9, -0.2], [0.2, -0.6]])
        reflection = np.array([[1.0, 0.0], [0.0, -1.0]])
        params = F.SemiflowParams(
            A=MINUS_I, phi=F.constant(1.0),
            source=F.linear_source(F.constant(0.5), reflection))
        w = F.mixed_functionals(u0, reflection, 2)
        assert abs(w[0] - w[1]) > 0.05      # genuinely two-mode data
        traj = F.evolve(u0, params, horizon=2.0, dt=1e-3)
        ref = reflection_area_profile(traj.times, w[0], w[1])
        assert np.max(np.abs(traj.tracked["V"] - ref) / np.abs(ref)) < 1e-3

    def test_tracked_series_and_csv(self):
        q = B.make_polygon([[0.5, 0.5], [-0.5, 0.5], [-0.5, -0.5], [0.5, -0.5]])
        params = F.SemiflowParams(
            A=MINUS_I, phi=F.constant(1.0),
            source=F.linear_source(F.constant(0.5), QUARTER_TURN))
        traj = F.evolve(q, params, horizon=0.2, dt=0.01,
                        tracked=("V", "perimeter", "mixed", "dH_ref"),
                        mixed_op=QUARTER_TURN, mixed_count=2,
                        reference=B.make_ball(1.0))
        csv = traj.to_csv()
        header = csv.splitlines()[0]
        assert header == "t,V,perimeter,W0,W1,dH_ref"
        assert len(csv.splitlines()) == len(traj.times) + 1
        assert traj.tracked["W0"][0] == pytest.approx(B.area(q))


class TestVolumeRate:
    def test_pure_contraction_rate(self):
        k = B.make_ball(1.0)
        rate = F.volume_rate(k, contraction_params())
        assert rate == pytest.approx(-2 * np.pi, abs=1e-10)

    def test_linear_body_source_rate_formula(self):
        # rate = -2 phi(W0) W0 + 2 psi(W0) W1 for the shear source
        q = helpers.random_polygon(RNG)
        mat = np.array([[0.0, 1.0], [0.0, 0.0]])
        phi = F.rational([1.0], [1.0, 1.0])
        psi = F.constant(0.5)
        params = F.SemiflowParams(A=MINUS_I, phi=phi,
                                  source=F.linear_source(psi, mat))
        w0 = B.area(q)
        w1 = B.mixed_area(q, B.linear_image(q, mat))
        expected = -2 * phi(w0) * w0 + 2 * psi(w0) * w1
        assert F.volume_rate(q, params) == pytest.approx(expected, rel=1e-12)

    def test_finite_difference_richardson(self):
        u = helpers.random_smooth_body(RNG)
        params = helpers.random_mild_params(RNG)
        rate = F.volume_rate(u, params)

        def v_at(t):
            return F.evolve(u, params, horizon=t, dt=t / 40).tracked["V"][-1]

        v0 = B.area(u)
        h = 1e-3
        d1 = (v_at(h) - v0) / h
        d2 = (v_at(h / 2) - v0) / (h / 2)
        richardson = 2 * d2 - d1
        assert richardson == pytest.approx(rate, rel=2e-3, abs=2e-5)


class TestPicard:
    def test_linear_flow_oracle(self):
        k = B.make_ball(1.0)
        traj = F.picard_solve(k, contraction_params(), horizon=0.1, tol=1e-10)
        for t, body in zip(traj.times, traj.bodies):
            assert B.hausdorff_distance(body, B.make_ball(np.exp(-t))) < 1e-9

    def test_constant_source_is_affine(self):
        u0 = B.make_ball(0.5)
        control = B.make_ball(1.0)
        params = F.SemiflowParams(A=np.zeros((2, 2)), phi=F.constant(1.0),
                                  source=F.constant_source(control))
        traj = F.picard_solve(u0, params, horizon=0.05, tol=1e-12)
        for t, body in zip(traj.times, traj.bodies):
            expected = B.minkowski_add(u0, B.scale(control, t))
            assert B.hausdorff_distance(body, expected) < 1e-10

    def test_agreement_with_evolve_on_shear_source(self):
        q = B.make_polygon([[0.5, 0.5], [-0.5, 0.5], [-0.5, -0.5], [0.5, -0.5]])
        params = F.SemiflowParams(
            A=MINUS_I, phi=F.rational([1.0], [1.0, 1.0]),
            source=F.linear_source(F.constant(0.5), [[0.0, 1.0], [0.0, 0.0]]))
        horizon = 0.02
        pic = F.picard_solve(q, params, horizon, tol=1e-10, n_nodes=11)
        ev = F.evolve(q, params, horizon, dt=horizon / 10)
        # frames line up: picard node spacing is a multiple of evolve dt
        matches = 0
        for t, body in zip(pic.times, pic.bodies):
            idx = np.argmin(np.abs(ev.times - t))
            if abs(ev.times[idx] - t) < 1e-12:
                assert B.hausdorff_distance(body, ev.bodies[idx]) < 1e-4
                matches += 1
        assert matches >= 5

    def test_horizon_guard(self):
        with pytest.raises(ValueError):
            F.picard_solve(B.make_ball(1.0), contraction_params(psi=1.0),
                           horizon=10.0)


class TestReachSet:
    def test_growing_disc(self):
        origin = B.make_ball(0.0)
        traj = F.reach_set(np.zeros((2, 2)), B.make_ball(1.0), origin,
                           horizon=1.0, dt=1e-3)
        for t, v in zip(traj.times, traj.tracked["V"]):
            assert v == pytest.approx(np.pi * t * t, abs=1e-4)

    def test_contractive_system_radius(self):
        # oracle: the radius solves r' = 1 - r from r(0) = 0
        sol = solve_ivp(lambda t, r: 1.0 - r, (0.0, 1.0), [0.0],
                        rtol=1e-10, atol=1e-12, dense_output=True)
        origin = B.make_ball(0.0)
        traj = F.reach_set(MINUS_I, B.make_ball(1.0), origin,
                           horizon=1.0, dt=1e-3)
        for t in (0.25, 0.5, 1.0):
            idx = np.argmin(np.abs(traj.times - t))
            body = traj.bodies[idx]
            expected = B.make_ball(float(sol.sol(traj.times[idx])[0]))
            assert B.hausdorff_distance(body, expected) < 1e-5

    def test_trivial_control_is_linear_flow(self):
        d0 = helpers.random_smooth_body(RNG)
        a_mat = np.array([[0.1, 0.3], [-0.2, 0.2]])
        traj = F.reach_set(a_mat, B.make_ball(0.0), d0, horizon=0.5, dt=1e-2)
        exact = B.linear_image(d0, expm(a_mat * 0.5))
        assert B.hausdorff_distance(traj.final, exact) < 1e-6


class TestMixedFunctionals:
    def test_ball_is_rotation_invariant(self):
        k = B.make_ball(1.0)
        w = F.mixed_functionals(k, QUARTER_TURN, 4)
        assert np.allclose(w, np.pi, atol=1e-10)

    def test_segment_alternation(self):
        for n in (4.0, 8.0, 16.0):
            seg = B.make_segment(n)
            w = F.mixed_functionals(seg, QUARTER_TURN, 4)
            assert abs(w[0]) < 0.05 * n * n / 2
            assert w[1] == pytest.approx(n * n / 2, rel=1e-5)
            assert abs(w[2]) < 0.05 * n * n / 2
            assert w[3] == pytest.approx(n * n / 2, rel=1e-5)

    def test_identity_operator(self):
        q = B.make_polygon([[0.5, 0.5], [-0.5, 0.5], [-0.5, -0.5], [0.5, -0.5]])
        w = F.mixed_functionals(q, np.eye(2), 2)
        assert w[0] == pytest.approx(B.area(q), abs=1e-12)
        assert w[1] == pytest.approx(B.area(q), abs=1e-12)

    def test_count_must_be_positive(self):
        with pytest.raises(ValueError):
            F.mixed_functionals(B.make_ball(1.0), np.eye(2), 0)
