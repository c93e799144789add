"""Scenario driver and study harnesses.

``sldc run`` advances one configuration and writes a diagnostics CSV, the
resolved configuration, and snapshots at requested times; ``sldc converge``
produces an error/order table against a reference solution; ``sldc
stability`` emits the CFL upper-bound table of the linear schemes.  Config
files are flat ``key = value`` text with ``#`` comments and command-line
flags override file values.  Identical configurations produce bit-identical
CSV output: there are no seeds and all reductions run in a fixed order.

The CFL number fixes the sub-interval through
``dtau = cfl / (|c1|/d1 + |c2|/d2)`` with the direction speeds evaluated on
the initial state (so order studies see one fixed dtau); pass
``refresh_speeds`` to re-derive it each interval instead.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from .diagnostics import (
    gc_diagnostics,
    l1_error_mean,
    observed_order,
    vp_diagnostics,
    with_deviations,
    write_diagnostics_csv,
)
from .grid import ScalarField, write_snapshot
from .idc_split import IdcPdeConfig, make_stepper
from .scenarios import get_scenario, initial_field
from .splitting import gc_field, vp_field
from . import stability

WORKERS_ENV = "SLDC_WORKERS"


@dataclass
class RunConfig:
    scenario: str = "landau_strong"
    n1: int = 0            # 0: scenario default
    n2: int = 0
    cfl: float = 0.0       # 0: scenario default
    tfinal: float = -1.0   # <0: scenario default
    nodes: int = 2         # sub-interval count M
    corrections: int = 2
    split: str = "lie"
    recon: str = ""        # empty: scenario default
    out: str = "out"
    snap: tuple = ()
    snap_format: str = "txt"
    refresh_speeds: bool = False
    strang_source: str = "midpoint"

    def resolve(self) -> "RunConfig":
        scen = get_scenario(self.scenario)
        return replace(
            self,
            n1=self.n1 or scen.default_n[0],
            n2=self.n2 or scen.default_n[1],
            cfl=self.cfl if self.cfl > 0 else scen.default_cfl,
            tfinal=self.tfinal if self.tfinal >= 0 else scen.default_T,
            recon=self.recon or scen.default_recon,
        )


def scheme_config(config: RunConfig) -> IdcPdeConfig:
    scen = get_scenario(config.scenario)
    return IdcPdeConfig(
        M=config.nodes, K=config.corrections, split=config.split,
        model=scen.model, recon=config.recon, velocity_sign=scen.velocity_sign,
        strang_source=config.strang_source,
    )


def derive_dtau(f: ScalarField, model: str, cfl: float, velocity_sign: float = 1.0) -> float:
    """Sub-interval size from the summed per-direction speed bounds."""
    g = f.grid
    if model == "vlasov_poisson":
        c1 = max(abs(g.lo2), abs(g.hi2))
        c2 = float(np.max(np.abs(vp_field(f).E)))
    else:
        a1, a2 = gc_field(f).perp(velocity_sign)
        c1 = float(np.max(np.abs(a1)))
        c2 = float(np.max(np.abs(a2)))
    rate = c1 / g.d1 + c2 / g.d2
    if rate == 0.0:
        raise ValueError("zero propagation speed; CFL cannot fix a time step")
    return cfl / rate


def advance_to(stepper, f: ScalarField, t_span: float, dt_interval: float,
               on_interval=None) -> ScalarField:
    """March whole IDC intervals, shrinking the last to land on t_span."""
    t = 0.0
    tol = 1e-12 * max(t_span, dt_interval)
    while t < t_span - tol:
        dt = min(dt_interval, t_span - t)
        f = stepper.interval(f, dt)
        t += dt
        peak = np.max(np.abs(f.values))
        if not np.isfinite(peak) or peak > 1e100:
            raise FloatingPointError(f"solution blew up at t = {t:.6g}")
        if on_interval is not None:
            on_interval(t, f)
    return f


def _diag(f: ScalarField, model: str):
    return vp_diagnostics(f) if model == "vlasov_poisson" else gc_diagnostics(f)


def write_config_echo(path, config: RunConfig):
    with open(path, "w") as fh:
        fh.write("# resolved run configuration\n")
        for key, value in asdict(config).items():
            if isinstance(value, tuple):
                value = ",".join(f"{v:g}" for v in value)
            fh.write(f"{key} = {value}\n")


def run(config: RunConfig) -> int:
    """Advance one configured scenario, writing diagnostics and snapshots."""
    config = config.resolve()
    scen = get_scenario(config.scenario)
    os.makedirs(config.out, exist_ok=True)
    write_config_echo(os.path.join(config.out, "config.txt"), config)

    f = initial_field(scen, config.n1, config.n2)
    cfg = scheme_config(config)
    stepper = make_stepper(f.grid, cfg)
    initial = _diag(f, scen.model)
    records = [with_deviations(_diag(f, scen.model), initial, 0.0)]

    def snap_path(t):
        return os.path.join(config.out, f"snapshot_t{t:.6f}.{config.snap_format}")

    snaps = sorted(set(float(t) for t in config.snap))
    if (0.0 in snaps) or config.tfinal == 0.0:
        write_snapshot(snap_path(0.0), f, 0.0)
    targets = sorted({t for t in snaps if 0.0 < t <= config.tfinal} | {config.tfinal})

    t_done = 0.0
    dtau = derive_dtau(f, scen.model, config.cfl, scen.velocity_sign)
    try:
        for target in targets:
            if target <= t_done:
                continue

            def record_interval(t_local, fld, base=t_done):
                records.append(
                    with_deviations(_diag(fld, scen.model), initial, base + t_local))

            if config.refresh_speeds:
                dtau = derive_dtau(f, scen.model, config.cfl, scen.velocity_sign)
            f = advance_to(stepper, f, target - t_done, cfg.M * dtau, record_interval)
            t_done = target
            if target in snaps:
                write_snapshot(snap_path(target), f, target)
    except (FloatingPointError, RuntimeError) as exc:
        write_diagnostics_csv(os.path.join(config.out, "diagnostics.csv"), records)
        print(f"run failed: {exc}", file=sys.stderr)
        return 1
    write_diagnostics_csv(os.path.join(config.out, "diagnostics.csv"), records)
    return 0


# ---------------------------------------------------------------------------
# convergence study
# ---------------------------------------------------------------------------

REFERENCE_CFL = 0.01
REFERENCE_SCHEME = dict(nodes=2, corrections=3, split="lie")


def _solution_at_T(config: RunConfig):
    config = config.resolve()
    scen = get_scenario(config.scenario)
    f = initial_field(scen, config.n1, config.n2)
    cfg = scheme_config(config)
    stepper = make_stepper(f.grid, cfg)
    dtau = derive_dtau(f, scen.model, config.cfl, scen.velocity_sign)
    return advance_to(stepper, f, config.tfinal, cfg.M * dtau)


def reference_solution(template: RunConfig, mode: str = "auto") -> ScalarField:
    """Reference for error tables: exact steady state when the scenario has
    one (and mode allows), otherwise a small-CFL high-order computed run."""
    template = template.resolve()
    scen = get_scenario(template.scenario)
    if mode not in ("auto", "exact", "computed"):
        raise ValueError("reference mode must be auto, exact or computed")
    if mode == "exact" and not scen.has_exact_steady_state:
        raise ValueError(f"scenario {scen.tag} has no exact solution")
    use_exact = scen.has_exact_steady_state if mode == "auto" else mode == "exact"
    if use_exact:
        return initial_field(scen, template.n1, template.n2)
    return _solution_at_T(replace(template, cfl=REFERENCE_CFL, **REFERENCE_SCHEME))


def _converge_one(args):
    template, cfl = args
    sol = _solution_at_T(replace(template, cfl=cfl))
    return cfl, sol.values


def convergence_study(template: RunConfig, cfl_list, reference_mode: str = "auto",
                      parallel: bool = False, reference: ScalarField | None = None):
    """Error/order table rows [(cfl, l1, order-or-None), ...] at fixed mesh."""
    template = template.resolve()
    if reference is None:
        reference = reference_solution(template, reference_mode)
    jobs = [(template, float(c)) for c in cfl_list]
    if parallel and len(jobs) > 1:
        workers = int(os.environ.get(WORKERS_ENV, "0")) or None
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_converge_one, jobs))
    else:
        results = [_converge_one(j) for j in jobs]
    errors = [l1_error_mean(ScalarField(reference.grid, vals), reference)
              for _, vals in results]
    cfls = [c for c, _ in results]
    orders = [None] + observed_order(errors, cfls) if len(errors) > 1 else [None]
    return list(zip(cfls, errors, orders))


def write_convergence_csv(path, rows, label=""):
    with open(path, "w", newline="") as fh:
        if label:
            fh.write(f"# {label}\n")
        writer = csv.writer(fh)
        writer.writerow(["cfl", "l1_error", "order"])
        for cfl, err, order in rows:
            writer.writerow([f"{cfl:g}", f"{err:.6e}",
                             "" if order is None else f"{order:.4f}"])


# ---------------------------------------------------------------------------
# stability study
# ---------------------------------------------------------------------------

_RECON_LABEL = {"linear3": "SL3", "linear5": "SL5"}


def stability_study(recon_list=("linear3", "linear5"),
                    schemes=((1, 0), (1, 1), (2, 0), (2, 1), (2, 2)), **kwargs):
    return stability.stability_table(recon_list, schemes, **kwargs)


def write_stability_csv(path, table):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        first = next(iter(table.values()))
        writer.writerow(["scheme"] + list(first))
        for recon, row in table.items():
            cells = ["no restriction" if np.isinf(v) else f"{v:.2f}"
                     for v in row.values()]
            writer.writerow([_RECON_LABEL.get(recon, recon)] + cells)


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------

def _parse_floats(text):
    return tuple(float(t) for t in text.split(",") if t.strip())


def read_config_file(path) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key] = value
    return out


_CONFIG_CASTS = {
    "n1": int, "n2": int, "nodes": int, "corrections": int,
    "cfl": float, "tfinal": float,
    "snap": _parse_floats,
    "refresh_speeds": lambda s: s.lower() in ("1", "true", "yes"),
}


def config_from_sources(file_values: dict, flag_values: dict) -> RunConfig:
    config = RunConfig()
    merged = dict(file_values)
    merged.update({k: v for k, v in flag_values.items() if v is not None})
    for key, value in merged.items():
        if not hasattr(config, key):
            raise ValueError(f"unknown config key {key!r}")
        if isinstance(value, str) and key in _CONFIG_CASTS:
            value = _CONFIG_CASTS[key](value)
        setattr(config, key, value)
    return config


def _add_run_flags(p):
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--scenario")
    p.add_argument("--n1", type=int)
    p.add_argument("--n2", type=int)
    p.add_argument("--cfl", type=float)
    p.add_argument("--tfinal", type=float)
    p.add_argument("--nodes", type=int, help="IDC sub-interval count M")
    p.add_argument("--corrections", type=int, help="correction sweep count K")
    p.add_argument("--split", choices=["lie", "strang"])
    p.add_argument("--recon", choices=["linear3", "linear5", "weno5"])
    p.add_argument("--out")
    p.add_argument("--snap", type=_parse_floats, help="comma-separated snapshot times")
    p.add_argument("--snap-format", dest="snap_format", choices=["txt", "bin"])
    p.add_argument("--refresh-speeds", dest="refresh_speeds", action="store_const",
                   const=True)
    p.add_argument("--strang-source", dest="strang_source",
                   choices=["midpoint", "node"])


def _collect_config(args) -> RunConfig:
    file_values = read_config_file(args.config) if args.config else {}
    keys = ("scenario", "n1", "n2", "cfl", "tfinal", "nodes", "corrections",
            "split", "recon", "out", "snap", "snap_format", "refresh_speeds",
            "strang_source")
    flag_values = {k: getattr(args, k, None) for k in keys}
    return config_from_sources(file_values, flag_values)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sldc",
        description="semi-Lagrangian transport solver with deferred-correction "
                    "time stepping")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="advance one scenario")
    _add_run_flags(p_run)

    p_conv = sub.add_parser("converge", help="error/order table over CFL numbers")
    _add_run_flags(p_conv)
    p_conv.add_argument("--cfl-list", type=_parse_floats, required=True)
    p_conv.add_argument("--reference", choices=["auto", "computed", "exact"],
                        default="auto")
    p_conv.add_argument("--parallel", action="store_true")

    p_stab = sub.add_parser("stability", help="CFL upper bounds of the linear schemes")
    p_stab.add_argument("--recon-list", default="linear3,linear5")
    p_stab.add_argument("--schemes", default="IDC2J0,IDC2J1,IDC3J0,IDC3J1,IDC3J2")
    p_stab.add_argument("--lambda-max", type=float, default=10.0)
    p_stab.add_argument("--out", default="out")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return run(_collect_config(args))
        if args.command == "converge":
            config = _collect_config(args).resolve()
            os.makedirs(config.out, exist_ok=True)
            rows = convergence_study(config, args.cfl_list,
                                     reference_mode=args.reference,
                                     parallel=args.parallel)
            label = (f"scenario={config.scenario} scheme={scheme_config(config).name} "
                     f"recon={config.recon} n={config.n1}x{config.n2} "
                     f"T={config.tfinal:g} reference={args.reference}")
            write_convergence_csv(os.path.join(config.out, "convergence.csv"),
                                  rows, label)
            return 0
        # stability
        schemes = []
        for name in args.schemes.split(","):
            name = name.strip()
            if not (name.startswith("IDC") and "J" in name):
                raise ValueError(f"bad scheme name {name!r}; expected e.g. IDC3J1")
            nodes, corrections = name[3:].split("J")
            schemes.append((int(nodes) - 1, int(corrections)))
        recons = [r.strip() for r in args.recon_list.split(",") if r.strip()]
        os.makedirs(args.out, exist_ok=True)
        table = stability_study(recons, schemes, lam_scan_max=args.lambda_max)
        write_stability_csv(os.path.join(args.out, "stability.csv"), table)
        return 0
    except (ValueError, FloatingPointError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
