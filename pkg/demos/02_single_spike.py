"""One spike in a ball.

Places the Nehari-projected bump at the deepest node of a ball, descends
to a critical point and reports where it concentrated.  Output files go
to ./out_spike (report.csv, summary.json, class_0.smsf, ...).
"""

from smspike import driver
from smspike.concentration import boundary_ratio
from smspike.config import SolverConfig
from smspike.mesh import cube_partition

cfg = SolverConfig(shape="ball:radius=0.48", resolution=64, eps=0.048, r=0.32,
                   cache_dir="gs_cache")

rep = driver.solve(cfg)
s = rep.runs[0]
cp = s.point
print("converged      :", cp.converged, "after", cp.iterations, "iterations")
print("energy         :", cp.energy.total, " (m_inf =", rep.m_inf, ")")
print("barycenter     :", s.beta)
print("start centre   :", s.xi)
print("ball fraction  :", s.conc.ball_fraction)
print("in Omega+      :", s.conc.in_omega_plus)

# how deep the heaviest eps-cube sits, in units of eps
part = cube_partition(cp.u.grid, cfg.eps)
print("boundary dist/eps:", boundary_ratio(cp.u, part, cp.u.grid, cfg.eps, cfg.p))

# the three Nehari forms of the energy agree on a critical point
print("Nehari forms   :", cp.energy.nehari_forms())

print(rep.write("out_spike"))
