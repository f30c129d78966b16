"""Double homodyne with a coherent first field.

For vacuum or coherent light in field 1 the covariance equations have an
exact solution.  The script compares it with a plain RK4 integration of the
same equations and with the stationary state of the filter.
"""

import numpy as np

from squeezed_trajectories import (
    BathSpec,
    ModelParams,
    closed_form_coherent,
    double_rhs,
    rk4_step,
    stationary_state_double,
)

field1 = BathSpec(beta=0.4)
field2 = BathSpec(n=0.3, m=0.2 + 0.15j)
params = ModelParams(delta=0.7, mu=1.0)
zeta0, nu0 = 0.1 - 0.05j, 0.4

dt, t_final = 1e-3, 6.0
steps = int(round(t_final / dt))
y = np.array([zeta0, nu0], dtype=complex)


def rhs(_t, v):
    dz, dn = double_rhs(v[0], v[1].real, field1, field2, params)
    return np.array([dz, dn], dtype=complex)


print("   t      zeta (exact)           |zeta err|   nu (exact)   |nu err|")
worst = 0.0
for k in range(steps + 1):
    t = k * dt
    if k % 1000 == 0:
        z, n = closed_form_coherent((zeta0, nu0), field2, params, t)
        ez, en = abs(y[0] - z), abs(y[1].real - n)
        worst = max(worst, ez, en)
        print(f"{t:5.2f}   {z.real:+.6f}{z.imag:+.6f}i   {ez:.1e}     {n:.6f}     {en:.1e}")
    if k < steps:
        y = rk4_step(rhs, y, t, dt)

stat = stationary_state_double(field1, params)
print(f"\nlargest RK4 deviation from the closed form: {worst:.1e}")
print(f"stationary state of the filter: zeta={stat.zeta:.6f} nu={stat.nu:.6f}")
