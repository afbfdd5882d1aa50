"""Command-line interface: ``ductpinn {solve,sweep,oracle,validate}``.

The thread count of the numerical backend is taken from the environment
variable ``DUCTPINN_THREADS`` (default 1); nothing else is read from the
environment.
"""
from __future__ import annotations

import argparse
import contextlib
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import oracle
from .analysis import find_velocity_nodes, oracle_profile
from .artifacts import atomic_write_text, write_fields_csv, write_report
from .config import dump_config, load_config
from .errors import DuctPinnError, NumericError, SingularConfigurationError
from .network import save_checkpoint
from .optimizer import Termination
from .solver import RunConfig, reduced_profile, solve
from .validation import FAULTS, run_validation

log = logging.getLogger("ductpinn")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_SINGULAR = 4
EXIT_LINE_SEARCH = 5

THREADS_ENV = "DUCTPINN_THREADS"


class UsageError(Exception):
    pass


def _threads():
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be >= 1")
    return n


@contextlib.contextmanager
def _thread_limit(n):
    from threadpoolctl import threadpool_limits

    with threadpool_limits(limits=n):
        yield


def _build_config(args, freq=None, mach=None) -> RunConfig:
    try:
        return _config_from_args(args, freq, mach)
    except (DuctPinnError, ValueError) as exc:
        raise UsageError(f"invalid configuration: {exc}") from exc


def _config_from_args(args, freq, mach) -> RunConfig:
    cfg = RunConfig()
    if args.profile == "reduced":
        cfg = reduced_profile(cfg)
    if args.config:
        cfg = load_config(args.config, cfg)
    problem, network, output = {}, {}, {}
    if freq is not None:
        problem["f"] = float(freq)
    if mach is not None:
        problem["M"] = float(mach)
    if args.seed is not None:
        network["seed"] = args.seed
    if args.out is not None:
        output["directory"] = args.out
    return cfg.replace(problem=problem, network=network, output=output)


def _re_z0(profile):
    if not profile.valid_Z[0]:
        return float("nan")
    return float(profile.Z[0].real)


def _sign(v):
    if not np.isfinite(v):
        return "?"
    return "+" if v > 0 else "-" if v < 0 else "0"


def _run_solve(cfg: RunConfig) -> tuple[dict, int]:
    out = Path(cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    result = solve(cfg)
    write_fields_csv(out / "fields.csv", result.profile)
    ckpt = {"pressure": str(save_checkpoint(out / "pressure.npz", result.pressure.params,
                                            cfg.network.seed, kind=result.pressure.kind.value))}
    if result.velocity is not None:
        ckpt["velocity"] = str(save_checkpoint(out / "velocity.npz", result.velocity.params,
                                               cfg.network.seed + 1, kind=result.velocity.kind.value))
    atomic_write_text(out / "config.txt", dump_config(cfg))
    report = result.report()
    report["checkpoints"] = ckpt
    nodes = find_velocity_nodes(result.profile) if np.all(np.isfinite(result.profile.xi)) else []
    report["nodes"] = [float(v) for v in nodes]
    report["re_z0"] = _re_z0(result.profile)
    write_report(out / "report.json", report)
    terms = [result.pressure_result.termination]
    if result.velocity_result is not None:
        terms.append(result.velocity_result.termination)
    code = EXIT_LINE_SEARCH if Termination.LINE_SEARCH_FAILED in terms else EXIT_OK
    return report, code


def cmd_solve(args):
    cfg = _build_config(args, args.freq, args.mach)
    report, code = _run_solve(cfg)
    for key in ("pressure.termination", "pressure.iterations", "velocity.termination",
                "error.delta_psi", "error.delta_mag", "error.delta_phase",
                "error.delta_Z_re", "error.delta_Z_im"):
        if report.get(key) is not None:
            print(f"{key} = {report[key]}")
    print(f"wrote {cfg.output.directory}")
    return code


_SWEEP_COLS = ("value", "status", "pressure.iterations", "error.delta_psi", "error.delta_mag",
               "error.delta_phase", "error.delta_Z_re", "error.delta_Z_im", "re_z0", "re_z0_sign",
               "oracle_re_z0_sign", "nodes")


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return "%.17g" % v
    return str(v)


def cmd_sweep(args):
    if args.freq is not None and args.mach is not None and len(args.freq) > 1 and len(args.mach) > 1:
        raise UsageError("sweep over one axis at a time")
    if args.freq is not None and len(args.freq) != 1:
        axis, values = "freq", args.freq
        fixed_mach = args.mach[0] if args.mach else None
    elif args.mach is not None and len(args.mach) != 1:
        axis, values = "mach", args.mach
        fixed_freq = args.freq[0] if args.freq else None
    else:
        raise UsageError("sweep needs a non-empty axis: --freq F1 F2 ... or --mach M1 M2 ...")
    if not values:
        raise UsageError(f"empty --{axis} axis")
    base = _build_config(args)
    root = Path(base.output.directory)
    rows, worst = [], EXIT_OK
    for v in values:
        if axis == "freq":
            cfg = _build_config(args, v, fixed_mach)
        else:
            cfg = _build_config(args, fixed_freq, v)
        cfg = cfg.replace(output={"directory": str(root / f"{axis}_{v:g}")})
        row = {"value": v}
        try:
            with np.errstate(all="ignore"):
                oracle_sign = _sign(oracle.re_z0_closed_form(cfg.problem))
        except DuctPinnError:
            oracle_sign = "?"
        row["oracle_re_z0_sign"] = oracle_sign
        try:
            report, code = _run_solve(cfg)
            row.update(report)
            row["status"] = "ok" if code == EXIT_OK else "line_search_failed"
            row["re_z0_sign"] = _sign(report["re_z0"])
            row["nodes"] = ";".join("%.6f" % n for n in report["nodes"])
        except DuctPinnError as exc:
            log.error("%s=%g failed: %s", axis, v, exc)
            row["status"] = f"error: {type(exc).__name__}"
            code = EXIT_FAILED
        worst = max(worst, code)
        rows.append(row)
    lines = [",".join(_SWEEP_COLS)]
    lines += [",".join(_fmt(r.get(c)) for c in _SWEEP_COLS) for r in rows]
    atomic_write_text(root / "sweep.csv", "\n".join(lines) + "\n")
    summary = {"axis": axis, "values": list(values), "rows": [{c: r.get(c) for c in _SWEEP_COLS} for r in rows]}
    if axis == "mach":
        summary["sign_change_intervals"] = _sign_changes(values, rows)
        for lo, hi in summary["sign_change_intervals"]:
            print(f"Re Z(0) changes sign for M in ({lo:g}, {hi:g})")
    write_report(root / "sweep.json", summary)
    for r in rows:
        print(",".join(_fmt(r.get(c)) for c in _SWEEP_COLS[:4]) + f",{r.get('re_z0_sign', '')}")
    print(f"wrote {root / 'sweep.csv'}")
    return worst


def _sign_changes(values, rows):
    pairs = sorted((v, r.get("re_z0_sign")) for v, r in zip(values, rows))
    out = []
    for (m0, s0), (m1, s1) in zip(pairs, pairs[1:]):
        if s0 in ("+", "-") and s1 in ("+", "-") and s0 != s1:
            out.append([m0, m1])
    return out


def cmd_oracle(args):
    cfg = _build_config(args, args.freq, args.mach)
    N_t = args.n_t or cfg.output.N_t
    prof = oracle_profile(cfg.problem, N_t)
    path = write_fields_csv(Path(cfg.output.directory) / "oracle.csv", prof)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_validate(args):
    results = run_validation(faults=tuple(args.fault))
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
    n_fail = sum(not r.passed for r in results)
    print(f"{len(results) - n_fail}/{len(results)} checks passed")
    return EXIT_OK if n_fail == 0 else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ductpinn", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log training progress")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, multi=False):
        sp.add_argument("--config", help="flat block.key = value config file")
        sp.add_argument("--seed", type=int, help="network seed (velocity uses seed + 1)")
        sp.add_argument("--out", help="output directory")
        nargs = "*" if multi else None
        sp.add_argument("--freq", type=float, nargs=nargs, help="frequency in Hz")
        sp.add_argument("--mach", type=float, nargs=nargs, help="mean-flow Mach number")
        sp.add_argument("--profile", choices=("full", "reduced"), default="full",
                        help="full-size network and budget, or the reduced quick profile")

    sp = sub.add_parser("solve", help="train and write fields.csv, report.json, checkpoints")
    common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("sweep", help="one solve per frequency or Mach value")
    common(sp, multi=True)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("oracle", help="write the closed-form fields as oracle.csv")
    common(sp)
    sp.add_argument("--n-t", type=int, help="number of samples (default output.N_t)")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("validate", help="run the invariant checks")
    sp.add_argument("--fault", action="append", default=[], choices=FAULTS,
                    help="inject a known defect (negative control)")
    sp.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        with _thread_limit(_threads()):
            return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except SingularConfigurationError as exc:
        print(f"error: singular configuration: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except NumericError as exc:
        where = "".join(f" {k} {v}" for k, v in (("iteration", exc.iteration), ("index", exc.index))
                        if v is not None)
        where = f" ({where.strip()})" if where else ""
        print(f"error: numeric failure{where}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DuctPinnError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, ValueError) else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
