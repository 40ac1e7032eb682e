"""
Command line entry point (``python -m smspike``).

Exit codes: 0 success, 2 invalid configuration, 3 non-convergence in a
mandatory phase.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import driver
from .config import ConfigError, SolverConfig
from .fieldio import FieldFormatError, read_field, write_mask
from .limit import BoundaryContaminationError, ground_state, save_ground_state
from .mesh import DomainError
from .nehari import DescentError, NehariError

EXIT_OK, EXIT_CONFIG, EXIT_NONCONV = 0, 2, 3

log = logging.getLogger("smspike")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value configuration file")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--resolution", type=int)
    common.add_argument("--eps", type=float)
    common.add_argument("--shape", help="tag:params, e.g. torus:major=0.3,minor=0.17")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="smspike", description=__doc__.splitlines()[1])
    sub = ap.add_subparsers(dest="cmd", required=True)
    sub.add_parser("ground-state", parents=[common], help="limit-problem ground state")
    sub.add_parser("solve", parents=[common], help="one descent from the deepest node")
    sub.add_parser("census", parents=[common], help="multistart census with dedup")
    s = sub.add_parser("sweep", parents=[common], help="census along an eps ladder")
    s.add_argument("--factors", default="0.3,0.2,0.15,0.1",
                   help="eps as fractions of r, descending")
    t = sub.add_parser("teps-bound", parents=[common], help="max energy over the T_eps family")
    t.add_argument("--factors", default="0.3,0.2,0.15,0.1")
    sub.add_parser("higher", parents=[common], help="search above the low-energy band")
    sub.add_parser("slab-probe", parents=[common], help="bump near a slab face")
    e = sub.add_parser("export", parents=[common], help="re-export an SMSF field")
    e.add_argument("--field", required=True, help="SMSF file to read")
    e.add_argument("--format", choices=("csv", "npy", "mask"), default="csv")
    return ap


def make_config(args) -> SolverConfig:
    cfg = SolverConfig.load(args.config) if args.config else SolverConfig()
    over = {k: getattr(args, k) for k in ("seed", "workers", "resolution", "eps", "shape")
            if getattr(args, k) is not None}
    return cfg.with_(**over).validate()


def _factors(text) -> list[float]:
    try:
        return [float(f) for f in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad factor list {text!r}") from exc


def run(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = Path(args.out)
    try:
        cfg = make_config(args)
        if args.cmd == "ground-state":
            gs = ground_state(cfg.gs_box, cfg.gs_resolution, cfg.omega, cfg.q, cfg.p,
                              cache_dir=cfg.cache_dir or None)
            path = save_ground_state(gs, out, "ground_state")
            (out / "config.txt").write_text(cfg.to_text() + f"# hash={cfg.config_hash()}\n")
            print(json.dumps(gs.scalars(), sort_keys=True))
            print(path)
            return EXIT_OK
        if args.cmd == "export":
            return _export(args, out)
        if args.cmd == "census":
            rep = driver.multiplicity_census(cfg)
        elif args.cmd == "solve":
            rep = driver.solve(cfg)
        elif args.cmd in ("sweep", "teps-bound"):
            grid, r = driver.prepare(cfg)
            eps = [f * r for f in _factors(args.factors)]
            fn = driver.epsilon_sweep if args.cmd == "sweep" else driver.teps_bound
            rep = fn(cfg, eps, grid=grid)
        elif args.cmd == "higher":
            gs = driver.load_ground_state(cfg)
            grid, r = driver.prepare(cfg)
            census = driver.multiplicity_census(cfg, gs=gs, grid=grid)
            teps = driver.teps_bound(cfg, [cfg.eps], gs=gs, grid=grid)
            rep = driver.higher_energy_search(cfg, census=census, gs=gs, grid=grid, teps=teps)
        else:
            rep = driver.slab_repulsion_probe(cfg)
    except driver.NonConvergenceError as exc:
        log.error("%s", exc)
        if exc.report is not None:
            exc.report.write(out)
        return EXIT_NONCONV
    except (DescentError, NehariError, BoundaryContaminationError) as exc:
        log.error("%s", exc)
        return EXIT_NONCONV
    except (ConfigError, DomainError, FieldFormatError, OSError) as exc:
        print(f"smspike: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    path = rep.write(out)
    print(path)
    return EXIT_OK


def _export(args, out: Path) -> int:
    import numpy as np

    u = read_field(args.field)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.field).stem
    if args.format == "mask":
        write_mask(out / f"{stem}.smsm", u.grid)
    elif args.format == "npy":
        np.save(out / f"{stem}.npy", u.full())
    else:
        pts = u.grid.points
        np.savetxt(out / f"{stem}.csv", np.column_stack([pts, u.values]), delimiter=",",
                   header="x,y,z,u", comments="", fmt="%.17g")
    return EXIT_OK


def main():
    sys.exit(run())
