"""Why spikes stay where they are put.

Moves the centre of a Nehari-projected bump across one lattice cell and
prints its energy for a few values of eps/h.  With eps of only a few
lattice spacings the energy depends strongly on where the peak sits
relative to the nodes, and the modulation shrinks as eps/h grows.  The
force that pulls a spike towards the middle of the domain decays like
exp(-2 d/eps), so on practical grids the cell-scale modulation wins and a
descent ends near the cell it started in.
"""

import numpy as np

from smspike.energy import DomainFunctional
from smspike.limit import ground_state, make_bump, project_field
from smspike.mesh import build_domain

gs = ground_state(18.0, 128, 1.0, cache_dir="gs_cache")
grid = build_domain("ball", 64, radius=0.48)
r = 0.32
xi0 = grid.points[grid.node_of([0.5, 0.5, 0.5])]

for ratio in (2, 3, 4):
    eps = ratio * grid.h
    F = DomainFunctional(grid, eps)
    energies = []
    for f in np.linspace(0, 0.5, 5):
        xi = xi0 + np.array([f * grid.h, 0.0, 0.0])
        energies.append(project_field(F, make_bump(gs, xi, eps, grid, r, check_scale=False)).energy.total)
    e = np.array(energies)
    print(f"eps = {ratio} h: energies {np.round(e, 4)}  "
          f"modulation {(e.max() - e.min()) / e.min():.2%}")
