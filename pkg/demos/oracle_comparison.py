"""Gaussian filter against a brute-force density-matrix integrator.

The same Wiener path drives the three-number Gaussian filter and the
stochastic master equation in a truncated Fock space.  Halving the step
shows how fast the two converge: the Milstein step of the master equation
halves the deviation each time, while plain Euler-Maruyama, whose error
shrinks only like the square root of the step for multiplicative noise,
gives no steady halving.
"""

import logging
import math

import numpy as np

from squeezed_trajectories import BathSpec, GaussianMoments, ModelParams, SingleHomodyneConfig, kappa
from squeezed_trajectories.fock import build_operators, gaussian_state, run_sme_single
from squeezed_trajectories.single import filter_innovations
from squeezed_trajectories.trajectory import substream

logging.getLogger("squeezed_trajectories.fock").setLevel(logging.ERROR)

bath = BathSpec(n=0.2, m=0.1 + 0.1j, beta=0.5)
params = ModelParams(delta=0.3, mu=1.0, theta=0.4)
init = GaussianMoments(alpha=0.5 + 0.2j)
dim, t_final, dt = 24, 1.0, 4e-4

ops = build_operators(dim)
rho0 = gaussian_state(init, dim)
fine_steps = int(round(t_final / (dt / 4)))
seeds = (11, 12, 13, 14)
paths = np.stack([substream(s, 0).standard_normal(fine_steps) for s in seeds], axis=1)
paths *= math.sqrt(dt / 4)
rho0 = np.broadcast_to(rho0, (len(seeds), dim, dim))

print("scheme      dt        mean over paths of max |alpha_filter - alpha_oracle|   ratio")
for scheme in ("euler", "milstein"):
    previous = None
    for level in (1, 2, 4):
        h = dt / level
        dw = paths.reshape(-1, 4 // level, len(seeds)).sum(axis=1)
        alpha = filter_innovations(SingleHomodyneConfig(bath, params, init, t_final, h),
                                   math.sqrt(kappa(bath, params.theta)) * dw.T)[0]
        orc = run_sme_single(rho0, ops, bath, params, dw, h, scheme=scheme)
        err = float(np.mean(np.max(np.abs(orc.alpha - alpha.T), axis=0)))
        ratio = "" if previous is None else f"{previous / err:.2f}"
        print(f"{scheme:9s}  {h:.1e}   {err:.3e}                                             {ratio}")
        previous = err
