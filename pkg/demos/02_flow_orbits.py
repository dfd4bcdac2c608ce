"""Orbits of the volume-coupled flow against their closed forms.

The flow contracts bodies through exp(-t) while a linear-body source feeds
rotated or reflected copies back in.  For unit clock and half-strength
source the tracked area solves a small linear ODE system exactly, so the
simulated orbit can be compared with a two- or four-mode closed form.
"""

import numpy as np

from setflow import SemiflowParams, constant, evolve, linear_source, make_polygon, mixed_functionals
from setflow.certificates import quarter_turn_area_profile, reflection_area_profile

square = make_polygon([[0.5, 0.5], [-0.5, 0.5], [-0.5, -0.5], [0.5, -0.5]])
reflection = [[1.0, 0.0], [0.0, -1.0]]
params = SemiflowParams(A=-np.eye(2), phi=constant(1.0),
                        source=linear_source(constant(0.5), reflection))

w = mixed_functionals(square, reflection, 2)
traj = evolve(square, params, horizon=3.0, dt=1e-3)
print("reflection-fed square: area vs two-mode closed form")
print(f"{'t':>5} {'simulated':>12} {'closed form':>12} {'rel err':>10}")
for t_probe in (0.0, 0.5, 1.0, 2.0, 3.0):
    i = int(np.argmin(np.abs(traj.times - t_probe)))
    sim = traj.tracked["V"][i]
    ref = reflection_area_profile(traj.times[i], w[0], w[1])
    print(f"{traj.times[i]:5.2f} {sim:12.8f} {ref:12.8f} {abs(sim - ref) / ref:10.2e}")

rect = make_polygon([[1.0, 0.5], [-1.0, 0.5], [-1.0, -0.5], [1.0, -0.5]])
quarter_turn = [[0.0, -1.0], [1.0, 0.0]]
params4 = SemiflowParams(A=-np.eye(2), phi=constant(1.0),
                         source=linear_source(constant(0.5), quarter_turn))
w4 = mixed_functionals(rect, quarter_turn, 4)
traj4 = evolve(rect, params4, horizon=3.0, dt=1e-3)
print("\nquarter-turn-fed rectangle: area vs four-mode closed form")
print(f"{'t':>5} {'simulated':>12} {'closed form':>12} {'rel err':>10}")
for t_probe in (0.0, 1.0, 2.0, 3.0):
    i = int(np.argmin(np.abs(traj4.times - t_probe)))
    sim = traj4.tracked["V"][i]
    ref = quarter_turn_area_profile(traj4.times[i], w4)
    print(f"{traj4.times[i]:5.2f} {sim:12.8f} {ref:12.8f} {abs(sim - ref) / ref:10.2e}")
