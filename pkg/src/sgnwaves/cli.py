"""Command-line front end: wave construction, eigenvalue reports, region
scans, and time-domain simulations.

Exit codes: 0 success, 2 validation failure, 3 numerical degeneracy,
4 solver failure.
"""

from __future__ import annotations

import argparse
import pathlib
import sys

import numpy as np

from .errors import (
    DegeneratePencilError,
    DomainError,
    EllipticSolveError,
    PositivityError,
    QuadratureError,
    SgnError,
)
from .modulation import (
    ModulationState,
    assemble_AB,
    characteristic_eigenvalues,
    scan_region,
    state_at_rest,
    write_scan_csv,
)
from .solver import WaveTrainConfig, run_experiment
from .waves import (
    RootTriple,
    averaged_h,
    averaged_hinv,
    build_wave,
    profile,
    velocity_from_depth,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DEGENERATE = 3
EXIT_SOLVER = 4


def _parse_roots(text: str) -> RootTriple:
    parts = text.split(",")
    if len(parts) != 3:
        raise DomainError(f"--roots needs three comma-separated depths, got {text!r}")
    h0, h1, h2 = (float(p) for p in parts)
    return RootTriple(h0, h1, h2)


def _fmt(x: float) -> str:
    return repr(float(x))


# --- wave ------------------------------------------------------------------

def cmd_wave(args) -> int:
    roots = _parse_roots(args.roots)
    if args.samples < 16:
        raise DomainError(f"--samples must be >= 16, got {args.samples}")
    wave = build_wave(roots, args.g, args.sign)
    xi = np.linspace(0.0, wave.L, args.samples)
    h = profile(wave, xi)
    u = velocity_from_depth(h, wave.constants, wave.D)
    lines = ["xi,h,u"]
    for j in range(args.samples):
        lines.append(f"{float(xi[j])!r},{float(h[j])!r},{float(u[j])!r}")
    out = pathlib.Path(args.out)
    out.write_text("\n".join(lines) + "\n")
    c = wave.constants
    print(f"wavelength L = {_fmt(wave.L)}")
    print(f"phase speed D = {_fmt(wave.D)}  (zero mean velocity frame)")
    print(f"m = {_fmt(c.m)}")
    print(f"i = {_fmt(c.i)}")
    print(f"epsilon = {_fmt(c.epsilon)}")
    print(f"h_bar = {_fmt(averaged_h(roots))}")
    print(f"hinv_bar = {_fmt(averaged_hinv(roots))}")
    print(f"k = {_fmt(wave.k)}")
    print(f"n = {_fmt(roots.characteristic)}")
    print(f"profile written to {out}")
    return EXIT_OK


# --- eigen -----------------------------------------------------------------

def cmd_eigen(args) -> int:
    roots = _parse_roots(args.roots)
    if args.D is not None and args.galilean_U is not None:
        raise DomainError("give at most one of --D and --galilean-U")
    if args.D is not None:
        state = ModulationState(
            D=args.D, h0=roots.h0, h1=roots.h1, h2=roots.h2, g=args.g, sign_m=args.sign
        )
    else:
        state = state_at_rest(roots, args.g, args.sign)
        if args.galilean_U is not None:
            state = ModulationState(
                D=state.D + args.galilean_U, h0=roots.h0, h1=roots.h1, h2=roots.h2,
                g=args.g, sign_m=args.sign,
            )
    cls = characteristic_eigenvalues(assemble_AB(state))
    print(f"D = {_fmt(state.D)}")
    for j, lam in enumerate(cls.roots, start=1):
        print(f"lambda{j} = {_fmt(lam.real)}  (imag {_fmt(lam.imag)})")
    print(f"n_positive = {cls.n_positive}, n_negative = {cls.n_negative}")
    print(f"resultant = {_fmt(cls.resultant)}")
    verdict = "yes" if (cls.all_real and cls.distinct) else "no"
    print(f"strictly hyperbolic: {verdict}")
    return EXIT_OK


# --- scan ------------------------------------------------------------------

_GNUPLOT_MAP = """\
# render with: gnuplot {name}
set datafile separator ","
set terminal pngcairo size 900,700
set output "{png}"
set xlabel "s"
set ylabel "tau"
set title "{title}"
set palette maxcolors 2
set cbrange [{lo}:{hi}]
plot "{csv}" skip 1 using 1:2:{expr} with points pt 5 ps 1.2 palette notitle
"""


def _write_plot_scripts(out_csv: pathlib.Path) -> list[pathlib.Path]:
    base = out_csv.with_suffix("")
    scripts = []
    spec = [
        ("resultant_sign", "sign of Res(p, p')", "(column(8) < 0 ? -1 : 1)", -1, 1),
        ("sign_pattern", "positive eigenvalue count", "(column(9))", 2, 3),
    ]
    for tag, title, expr, lo, hi in spec:
        path = base.parent / f"{base.name}_{tag}.gnuplot"
        path.write_text(
            _GNUPLOT_MAP.format(
                name=path.name, png=f"{base.name}_{tag}.png", title=title,
                csv=out_csv.name, expr=expr, lo=lo, hi=hi,
            )
        )
        scripts.append(path)
    return scripts


def cmd_scan(args) -> int:
    lo = args.window.split(",")
    if len(lo) != 4:
        raise DomainError(f"--window needs smin,smax,taumin,taumax, got {args.window!r}")
    s_min, s_max, t_min, t_max = (float(v) for v in lo)
    result = scan_region(
        s_min, s_max, t_min, t_max, args.grid, args.g, args.sign, n_workers=args.workers
    )
    out = pathlib.Path(args.out)
    write_scan_csv(result, out)
    scripts = _write_plot_scripts(out)
    n_pts = len(result.points)
    n_fail = len(result.errors)
    for s, tau, msg in result.errors:
        print(f"point (s={s}, tau={tau}) failed: {msg}", file=sys.stderr)
    print(f"scan: {n_pts} points, {n_fail} failures -> {out}")
    print(f"all strictly hyperbolic: {'yes' if result.all_hyperbolic else 'no'}")
    print(
        "resultant sign constant: "
        f"{'yes' if result.resultant_sign_constant else 'no'}"
    )
    for s in scripts:
        print(f"plot script: {s}")
    if n_fail > 0.01 * n_pts:
        print(f"error: {n_fail}/{n_pts} points failed", file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


# --- simulate ----------------------------------------------------------------

CONFIG_KEYS = (
    "roots", "g", "sign_m", "n_waves", "amplitude", "cells_per_wavelength",
    "t_end", "checkpoints", "cfl", "limiter",
)


def _read_config(path: pathlib.Path) -> dict:
    if not path.is_file():
        raise FileNotFoundError(f"config file not found: {path}")
    cfg = {}
    for ln, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DomainError(f"{path}:{ln}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise DomainError(f"{path}:{ln}: unknown key {key!r}")
        cfg[key] = val.strip()
    return cfg


def cmd_simulate(args) -> int:
    cfg = _read_config(pathlib.Path(args.config))
    # flags override file values
    if args.t_end is not None:
        cfg["t_end"] = repr(args.t_end)
    if args.checkpoints is not None:
        cfg["checkpoints"] = args.checkpoints
    if "roots" not in cfg or "t_end" not in cfg:
        raise DomainError("config must define at least 'roots' and 't_end'")
    roots = _parse_roots(cfg["roots"])
    config = WaveTrainConfig(
        roots=roots,
        g=float(cfg.get("g", "9.81")),
        sign_m=int(cfg.get("sign_m", "-1")),
        n_waves=int(cfg.get("n_waves", "5")),
        amplitude=float(cfg.get("amplitude", "0")),
        cells_per_wavelength=int(cfg.get("cells_per_wavelength", "400")),
    )
    t_end = float(cfg["t_end"])
    checkpoints = None
    if cfg.get("checkpoints"):
        checkpoints = [float(v) for v in cfg["checkpoints"].replace(";", ",").split(",")]
    result = run_experiment(
        config,
        t_end,
        output_times=checkpoints,
        out_dir=args.out_dir,
        cfl=float(cfg.get("cfl", "0.45")),
        limiter=cfg.get("limiter", "mc"),
    )
    print(f"simulated {result.n_steps} steps to t = {_fmt(result.checkpoints[-1][0])}")
    print(f"depth envelope: [{_fmt(result.h_min)}, {_fmt(result.h_max)}]")
    print(f"artifacts in {args.out_dir}")
    return EXIT_OK


# --- csv round-trip helper ---------------------------------------------------

def reemit_csv(path) -> str:
    """Parse one of our CSVs and re-serialize it cell by cell.

    Numeric cells were written with repr(), so float() -> repr() must
    reproduce them byte for byte; integer and boolean cells pass through
    int() and literal matching.  Used to demonstrate round-trip fidelity.
    """
    text = pathlib.Path(path).read_text()
    out_lines = []
    for idx, line in enumerate(text.splitlines()):
        if idx == 0:
            out_lines.append(line)
            continue
        cells = []
        for cell in line.split(","):
            if cell in ("true", "false"):
                cells.append(cell)
            else:
                try:
                    cells.append(str(int(cell)))
                except ValueError:
                    cells.append(repr(float(cell)))
        out_lines.append(",".join(cells))
    return "\n".join(out_lines) + "\n"


# --- dispatcher ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sgnwaves",
        description="Cnoidal SGN waves: profiles, modulation eigenvalues, scans, simulations",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    w = sub.add_parser("wave", help="construct one periodic wave, write its profile")
    w.add_argument("--roots", required=True, help="h0,h1,h2")
    w.add_argument("--g", type=float, default=9.81)
    w.add_argument("--sign", type=int, choices=(-1, 1), default=-1)
    w.add_argument("--samples", type=int, default=512)
    w.add_argument("--out", default="wave_profile.csv")
    w.set_defaults(func=cmd_wave)

    e = sub.add_parser("eigen", help="modulation eigenvalues for one wave")
    e.add_argument("--roots", required=True, help="h0,h1,h2")
    e.add_argument("--g", type=float, default=9.81)
    e.add_argument("--sign", type=int, choices=(-1, 1), default=-1)
    e.add_argument("--D", type=float, default=None, help="phase speed (default: U=0)")
    e.add_argument(
        "--galilean-U", type=float, default=None, dest="galilean_U",
        help="mean velocity of the frame (shifts D from the U=0 value)",
    )
    e.set_defaults(func=cmd_eigen)

    s = sub.add_parser("scan", help="hyperbolicity scan over the (s,tau) plane")
    s.add_argument("--window", default="1,100,0,100", help="smin,smax,taumin,taumax")
    s.add_argument("--grid", type=int, default=50)
    s.add_argument("--g", type=float, default=9.81)
    s.add_argument("--sign", type=int, choices=(-1, 1), default=-1)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", default="scan.csv")
    s.set_defaults(func=cmd_scan)

    m = sub.add_parser("simulate", help="run a wave-train experiment from a config file")
    m.add_argument("--config", required=True)
    m.add_argument("--t-end", type=float, default=None, dest="t_end")
    m.add_argument("--checkpoints", default=None, help="comma-separated times")
    m.add_argument("--out-dir", default="run_out", dest="out_dir")
    m.set_defaults(func=cmd_simulate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PositivityError, EllipticSolveError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (DegeneratePencilError, QuadratureError) as exc:
        print(f"numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (DomainError, SgnError, FileNotFoundError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
