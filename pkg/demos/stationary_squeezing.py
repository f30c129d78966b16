"""Single-homodyne filtering of a squeezed field.

Two trajectories with different seeds produce different mean fields, but
their covariances (and therefore the quadrature dispersions) are identical:
the Riccati part of the filter never sees the noise.  Both settle on the
stationary state, whose X dispersion drops below the vacuum value of 1 when
the local oscillator phase matches the squeezing.
"""

import numpy as np

from squeezed_trajectories import (
    BathSpec,
    GaussianMoments,
    ModelParams,
    SingleHomodyneConfig,
    dispersions,
    simulate_trajectory,
    stationary_state,
)

bath = BathSpec(n=0.4, m=-0.5, beta=0.3)
params = ModelParams(delta=0.0, mu=1.0, theta=0.0)
init = GaussianMoments(alpha=0.5 + 0.5j, zeta=0.0, nu=0.0)

runs = [simulate_trajectory(SingleHomodyneConfig(bath, params, init, 8.0, seed=s)) for s in (1, 2)]
stat = stationary_state(bath, params)
sx, sp = dispersions(stat)

print("   t     alpha (seed 1)      alpha (seed 2)      dX^2     dP^2")
for k in np.linspace(0, len(runs[0].t) - 1, 9).astype(int):
    a1, a2 = runs[0].alpha[k], runs[1].alpha[k]
    print(f"{runs[0].t[k]:5.2f}  {a1.real:+.3f}{a1.imag:+.3f}i    {a2.real:+.3f}{a2.imag:+.3f}i"
          f"    {runs[0].dx2[k]:.4f}   {runs[0].dp2[k]:.4f}")

same = np.array_equal(runs[0].dx2, runs[1].dx2) and np.array_equal(runs[0].dp2, runs[1].dp2)
print(f"\ndispersions identical across seeds: {same}")
print(f"stationary state: zeta={stat.zeta:.5f}  nu={stat.nu:.5f}  dX^2={sx:.5f}  dP^2={sp:.5f}")
print(f"final filter:     dX^2={runs[0].dx2[-1]:.5f}  dP^2={runs[0].dp2[-1]:.5f}")
