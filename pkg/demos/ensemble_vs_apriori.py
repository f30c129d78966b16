"""Averaging conditional states recovers the unconditional dynamics.

Each trajectory carries a Gaussian state conditioned on its own record.
The equal-weight mixture of many such states must reproduce the a priori
(unconditioned) state: the means agree within the sampling error and the
mixture covariance equals the a priori covariance.
"""

import numpy as np

from squeezed_trajectories import (
    AprioriSolution,
    BathSpec,
    EnsembleAccumulator,
    GaussianMoments,
    ModelParams,
    SingleHomodyneConfig,
    simulate_batch,
)

bath = BathSpec(n=0.3, m=0.2 + 0.1j, beta=0.4 - 0.2j)
params = ModelParams(delta=0.5, mu=1.0, theta=0.3)
init = GaussianMoments(alpha=1.0 + 0.5j, zeta=0.05, nu=0.1)
cfg = SingleHomodyneConfig(bath, params, init, t_final=4.0, seed=2024)

acc = EnsembleAccumulator()
for start in range(0, 800, 200):
    for record in simulate_batch(cfg, range(start, start + 200)):
        acc.add(record)
avg = acc.result()
prior = AprioriSolution(init, bath, params)

print("   t    <alpha> ensemble       a priori            z(Re)  z(Im)   nu mix   nu prior")
for k in np.linspace(0, len(avg.t) - 1, 9).astype(int):
    t = avg.t[k]
    g = prior(t)
    a, se = avg.alpha[k], avg.alpha_stderr[k]
    zr = abs(a.real - g.alpha.real) / se.real if se.real > 0 else 0.0
    zi = abs(a.imag - g.alpha.imag) / se.imag if se.imag > 0 else 0.0
    print(f"{t:5.2f}  {a.real:+.4f}{a.imag:+.4f}i   {g.alpha.real:+.4f}{g.alpha.imag:+.4f}i"
          f"    {zr:5.2f}  {zi:5.2f}   {avg.nu[k]:.4f}   {g.nu:.4f}")
print(f"\ntrajectories: {avg.count}")
