"""Multistart census on a solid torus.

Twelve bumps spread over the torus core are descended independently and
grouped into classes (energy, barycenter and field distance must all be
close).  A ball run with the same settings is shown for comparison.

On the lattice every start tends to stay close to where it was put: the
spike sits in a cell-scale well (see 04_lattice_pinning.py), and moving it
across the domain costs an energy exponentially small in dist/eps.  So the
class count reflects how many separated starts were used as much as the
topology.  Both censuses take a few minutes each at 64^3.
"""

from smspike import driver
from smspike.config import SolverConfig

TORUS = SolverConfig(shape="torus:major=0.3,minor=0.17", resolution=64, eps=0.03125,
                     r=0.125, multistart=12, cache_dir="gs_cache")
BALL = SolverConfig(shape="ball:radius=0.48", resolution=64, eps=0.032, r=0.32,
                    multistart=12, cache_dir="gs_cache")

for name, cfg in (("torus", TORUS), ("ball", BALL)):
    rep = driver.multiplicity_census(cfg)
    print(f"{name}: {len(rep.classes)} classes, {rep.n_low} low-energy, m_inf = {rep.m_inf:.5f}")
    for k, c in enumerate(rep.classes):
        print(f"  class {k}: E = {c.energy:.6f}  beta = {c.beta.round(3)}  "
              f"members = {c.members}")
    rep.write(f"out_census_{name}")
