"""Command-line front end.

    subordination bernstein   --config CFG [--lambdas 0.1,1,10]
    subordination jump-kernel --config CFG
    subordination criterion   --config CFG
    subordination mc          --config CFG [--dump-samples]
    subordination gallery

``--config`` takes a path or the name of a built-in preset.  Exit codes:
0 success, 1 usage or configuration error, 2 mathematical divergence (the
certificate is printed), 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from .bernstein import BernsteinFunction, check_levy_integrability
from .config import GridConfig, MCConfig, load_config, load_preset, preset_names
from .errors import ConfigError, DivergenceError, NumericalError
from .montecarlo import SubordinatorSampler, sample_path, validate_laplace
from .subordinate import comparability_verify, criterion_check

EXIT_OK, EXIT_USAGE, EXIT_DIVERGENCE, EXIT_NUMERICAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def atomic_write(path, text):
    """Write text with LF line endings via a temp file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def _grid_decades(text):
    try:
        a, b = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A:B, got {text!r}") from None
    if not b > a:
        raise argparse.ArgumentTypeError("need A < B")
    return a, b


def _u64(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (np.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _float_list(text):
    if not text.strip():
        return ()
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--out", default="out", help="output directory (default: ./out)")
    common.add_argument("--format", choices=("csv", "json", "both"), default="both")
    common.add_argument("--grid-decades", type=_grid_decades, metavar="A:B",
                        help="radius grid 10^A..10^B; write as --grid-decades=-3:3")
    common.add_argument("--points-per-decade", type=_positive_int, metavar="N")
    common.add_argument("--seed", type=_u64, metavar="U64")
    common.add_argument("--tol", type=_positive_float, metavar="REAL", help="relative quadrature tolerance")
    with_config = _Parser(add_help=False, parents=[common])
    with_config.add_argument("--config", required=True, metavar="PATH",
                             help="config file, or the name of a built-in preset")

    parser = _Parser(prog="subordination", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    b = sub.add_parser("bernstein", parents=[with_config], help="tabulate phi_bar(lambda)")
    b.add_argument("--lambdas", type=_float_list, help="comma-separated lambda values")
    sub.add_parser("jump-kernel", parents=[with_config], help="jump kernel bounds vs target estimate")
    sub.add_parser("criterion", parents=[with_config], help="finiteness of the scale criterion")
    m = sub.add_parser("mc", parents=[with_config], help="Monte Carlo Laplace validation")
    m.add_argument("--dump-samples", action="store_true", help="also write samples.csv")
    sub.add_parser("gallery", parents=[common], help="run every built-in preset")
    return parser


def apply_overrides(cfg, args):
    kw = {}
    if args.grid_decades is not None or args.points_per_decade is not None:
        kw["grid"] = GridConfig(args.grid_decades or cfg.grid.decades,
                                args.points_per_decade or cfg.grid.points_per_decade)
    if args.seed is not None:
        kw["seed"] = args.seed
    if args.tol is not None:
        kw["tol"] = args.tol
    if getattr(args, "lambdas", None) is not None:
        kw["lambdas"] = args.lambdas
    if getattr(args, "dump_samples", False):
        m = cfg.mc
        kw["mc"] = MCConfig(m.eps, m.T, m.n_paths, m.lambdas, True)
    return cfg.override(**kw) if kw else cfg


def _wants(fmt, kind):
    return fmt in (kind, "both")


def run_bernstein(cfg, out, fmt, echo=print):
    if not cfg.lambdas:
        raise UsageError("empty lambda grid")
    if any(not lam > 0 for lam in cfg.lambdas):
        raise UsageError("lambda values must be positive")
    levy = cfg.levy()
    f = BernsteinFunction(levy, rel_tol=min(cfg.tol, 1e-9))
    rows = []
    for lam in cfg.lambdas:
        q = f.integrate(lam)
        if not q.converged:
            raise NumericalError(f"quadrature did not converge at lambda={lam:g}")
        rows.append({"lambda": lam, "phi_bar": q.value, "error": q.error})
    doc = {"command": "bernstein", "name": cfg.name, "rho0": levy.rho0, "rho_inf": levy.rho_inf, "rows": rows}
    if _wants(fmt, "csv"):
        atomic_write(out / "bernstein.csv", to_csv(["lambda", "phi_bar", "error"],
                                                   [(r["lambda"], r["phi_bar"], r["error"]) for r in rows]))
    if _wants(fmt, "json"):
        atomic_write(out / "bernstein.json", dumps(doc))
    for r in rows:
        echo(f"lambda={r['lambda']:<10.6g} phi_bar={r['phi_bar']:.12g}  (+/- {r['error']:.2g})")
    return doc


def run_jump_kernel(cfg, out, fmt, echo=print):
    rep = comparability_verify(cfg.problem(), cfg.grid.radii(), target=cfg.target, against=cfg.against)
    doc = {"command": "jump-kernel", "name": cfg.name, **rep.to_dict()}
    if _wants(fmt, "csv"):
        atomic_write(out / "report.csv", rep.to_csv())
    if _wants(fmt, "json"):
        atomic_write(out / "report.json", dumps(doc))
    mid = np.sqrt(rep.ratio_lo * rep.ratio_hi)
    lines = ["# r ratio (geometric mean of the lower and upper ratio)"]
    lines += [f"{r:.17g} {v:.17g}" for r, v in zip(rep.radii, mid)]
    atomic_write(out / "ratio.dat", "\n".join(lines) + "\n")
    if rep.comparable:
        echo(f"{cfg.name}: comparable C={rep.C:.6g} (against {rep.against}, target {rep.target_name})")
    else:
        s = rep.slopes[rep.diverging_regime]
        echo(f"{cfg.name}: not_comparable in the {rep.diverging_regime}-r regime "
             f"(ratio slopes {s['ratio_lo']:.4g}, {s['ratio_hi']:.4g})")
    return doc


def run_criterion(cfg, out, fmt, echo=print):
    levy = cfg.levy()
    cert = criterion_check(levy.phi, levy.psi)
    doc = {"command": "criterion", "name": cfg.name, **cert.to_dict(),
           "levy_integrability": check_levy_integrability(levy).to_dict()}
    if _wants(fmt, "json"):
        atomic_write(out / "criterion.json", dumps(doc))
    echo(cert.verdict_line)
    return doc


def run_mc(cfg, out, fmt, echo=print):
    m = cfg.mc
    s = SubordinatorSampler(cfg.levy(), m.eps, cfg.seed)
    rep = validate_laplace(s, m.T, m.lambdas, m.n_paths)
    doc = {"command": "mc", "name": cfg.name, **rep}
    if _wants(fmt, "json"):
        atomic_write(out / "mc.json", dumps(doc))
    if m.dump_samples:
        samples = sample_path(s, m.T, m.n_paths)
        atomic_write(out / "samples.csv", "S_T\n" + "".join(f"{x!r}\n" for x in samples.tolist()))
    for r in rep["rows"]:
        echo(f"lambda={r['lambda']:<6g} empirical={r['empirical']:.6g} expected={r['expected']:.6g} "
             f"z={r['z']:.3f} {'pass' if r['pass'] else 'FAIL'}")
    if not rep["pass"]:
        raise NumericalError("Laplace validation failed: a deviation exceeds 4 standard errors")
    return doc


def run_gallery(args, out, fmt, echo=print):
    index = []
    for name in preset_names():
        cfg = apply_overrides(load_preset(name), args)
        sub = out / name
        entry = {"name": name, "description": cfg.description, "directory": name}
        entry["criterion"] = run_criterion(cfg, sub, fmt, echo=lambda *_: None)["verdict"]
        try:
            run_bernstein(cfg, sub, fmt, echo=lambda *_: None)
            rep = run_jump_kernel(cfg, sub, fmt, echo=echo)
            entry.update(status="ok", verdict=rep["verdict"], C=rep["C"],
                         diverging_regime=rep["diverging_regime"])
        except DivergenceError as exc:
            cert = exc.certificate.to_dict() if hasattr(exc.certificate, "to_dict") else exc.certificate
            atomic_write(sub / "divergence.json", dumps({"message": str(exc), "certificate": cert}))
            entry.update(status="divergent", verdict="no_subordinator", C=None, diverging_regime=None)
            echo(f"{name}: divergent ({entry['criterion']})")
        index.append(entry)
    atomic_write(out / "gallery.json", dumps({"command": "gallery", "presets": index}))
    return index


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        out = Path(args.out)
        if args.command == "gallery":
            run_gallery(args, out, args.format)
            return EXIT_OK
        cfg = apply_overrides(load_config(args.config), args)
        run = {"bernstein": run_bernstein, "jump-kernel": run_jump_kernel,
               "criterion": run_criterion, "mc": run_mc}[args.command]
        doc = run(cfg, out, args.format)
        if args.command == "criterion":
            print(dumps(doc), end="")
        return EXIT_OK
    except DivergenceError as exc:
        cert = exc.certificate.to_dict() if hasattr(exc.certificate, "to_dict") else exc.certificate
        print(f"divergence: {exc}", file=sys.stderr)
        print(dumps({"message": str(exc), "certificate": cert}), end="")
        return EXIT_DIVERGENCE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (UsageError, ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
