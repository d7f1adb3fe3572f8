"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage
errors and unreadable input.  Output goes to ``--out``, falling back to
``$HORORADON_OUT`` and then ``./hororadon_out``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io as hio
from .cfunction import multiplier, plancherel_weight
from .errors import HoroRadonError
from .horocycle import HoroFunction
from .ranges import check_flat, check_range_cc, check_sharp, reducibility_witness
from .suites import DEFAULT_TOLS, SuiteConfig, run_all
from .transforms import (VertexFunction, freq_norm_sq, helgason_fourier,
                         hf_invert, phi_v, q_invert, q_transform, radon)
from .tree import ROOT, Isometry, Tree

OUT_ENV = "HORORADON_OUT"
EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    q: int | None = None
    radius: int = 3
    depth: int | None = None
    M: int = 4096
    seed: int = 42
    tols: dict = field(default_factory=dict)
    inp: Path | None = None
    out: Path = Path("hororadon_out")
    n_isometries: int = 20
    max_displacement: int = 2

    @property
    def tree(self) -> Tree:
        return Tree(self.q or 2)

    @property
    def cyl_depth(self) -> int:
        return self.radius if self.depth is None else self.depth

    def validate(self) -> None:
        if self.q is not None and self.q < 2:
            raise UsageError(f"--q must be >= 2 (got {self.q})")
        if self.radius < 0:
            raise UsageError("--radius must be >= 0")
        if self.M < 4 or self.M & (self.M - 1):
            raise UsageError(f"--grid must be a power of two >= 4 (got {self.M})")
        if self.depth is not None and self.depth < self.radius:
            raise UsageError(f"--depth {self.depth} is below --radius {self.radius}")
        for key in self.tols:
            if key != "*" and key not in DEFAULT_TOLS:
                raise UsageError(f"unknown tolerance {key!r}; known: {', '.join(DEFAULT_TOLS)}")

    def tol(self, name: str) -> float:
        return self.tols.get(name, self.tols.get("*", DEFAULT_TOLS[name]))

    def suite_config(self) -> SuiteConfig:
        tols = {k: self.tol(k) for k in DEFAULT_TOLS}
        return SuiteConfig(q=self.q or 2, radius=self.radius, M=self.M, seed=self.seed,
                           max_displacement=self.max_displacement, tols=tols)


def _parse_tol(text: str) -> tuple[str, float]:
    name, sep, val = text.rpartition("=")
    try:
        return (name if sep else "*"), float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE or VALUE, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=int, default=None,
                        help="branching number; each vertex has q+1 neighbours (default 2, "
                             "or the value stored in the input file)")
    common.add_argument("--radius", type=int, default=3, help="support radius R of f")
    common.add_argument("--depth", type=int, default=None,
                        help="boundary cylinder depth (default: R)")
    common.add_argument("--grid", type=int, default=4096, help="frequency grid size M")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--tol", type=_parse_tol, action="append", default=[],
                        metavar="[NAME=]VALUE",
                        help="tolerance override; a bare value applies to every check")
    common.add_argument("--in", dest="inp", type=Path, default=None, help="input file")
    common.add_argument("--out", type=Path, default=None,
                        help=f"output directory (default ${OUT_ENV} or ./hororadon_out)")

    parser = argparse.ArgumentParser(
        prog="hororadon",
        description="Horocyclic Radon transform on homogeneous trees: transforms, "
                    "inversion and verification suites.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("selftest", parents=[common], help="run every verification suite")
    sub.add_parser("transform", parents=[common],
                   help="Radon table, Helgason-Fourier coefficients and Q f on the grid")
    sub.add_parser("invert", parents=[common],
                   help="reconstruct f from q_grid.csv or hf_laurent.json")
    sub.add_parser("verify", parents=[common],
                   help="range and symmetry checks of a horofunction file")
    sub.add_parser("plotdata", parents=[common],
                   help="plot-ready columns for w(t), m(t) and |Hf|")
    sub.add_parser("demo-reducibility", parents=[common],
                   help="band-split witness that pi is reducible")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    out = args.out or Path(os.environ.get(OUT_ENV) or "hororadon_out")
    return RunConfig(command=args.command, q=args.q, radius=args.radius, depth=args.depth,
                     M=args.grid, seed=args.seed, tols=dict(args.tol), inp=args.inp,
                     out=out)


# -- helpers -----------------------------------------------------------------


def _read(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write_all(out: Path, files: dict[str, str]) -> None:
    """Everything is rendered before the first write, and each write is atomic."""
    for name, text in files.items():
        hio.atomic_write(out / name, text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _input_function(cfg: RunConfig) -> tuple[VertexFunction, bool]:
    """f from --in, or a seeded random integer function on ball(o, R)."""
    if cfg.inp is not None:
        f = hio.load_vertex_function(_read(cfg.inp), q=cfg.q, path=str(cfg.inp))
        if f.support_radius > cfg.radius:
            raise UsageError(f"support radius {f.support_radius} of {cfg.inp} exceeds "
                             f"--radius {cfg.radius}")
        return f, False
    rng = np.random.default_rng(cfg.seed)
    return VertexFunction.random(cfg.tree, cfg.radius, rng), True


def _grid_warning(cfg: RunConfig) -> None:
    need = 2 * (cfg.radius + cfg.max_displacement)
    if cfg.M <= need:
        print(f"warning: --grid {cfg.M} does not exceed 2(R + displacement) = {need}; "
              "quadrature is under-resolved", file=sys.stderr)


# -- subcommands -------------------------------------------------------------


def cmd_selftest(cfg: RunConfig) -> int:
    _grid_warning(cfg)
    reports = run_all(cfg.suite_config())
    failed = [r for r in reports if not r.passed]
    for r in reports:
        print(r.summary())
    doc = {
        "config": {"q": cfg.q or 2, "radius": cfg.radius, "M": cfg.M, "seed": cfg.seed},
        "pass": not failed,
        "first_failure": failed[0].condition if failed else None,
        "failed": [r.condition for r in failed],
        "reports": [r.to_dict() for r in reports],
    }
    _write_all(cfg.out, {"selftest_report.json": json.dumps(doc, indent=2, sort_keys=True,
                                                            default=float) + "\n"})
    if failed:
        print(f"FAIL: first failing condition: {failed[0].condition}", file=sys.stderr)
        return EXIT_FAIL
    print(f"all {len(reports)} conditions passed")
    return EXIT_PASS


def cmd_transform(cfg: RunConfig) -> int:
    f, generated = _input_function(cfg)
    depth = max(cfg.cyl_depth, f.support_radius)
    F = radon(f, depth)
    H = helgason_fourier(f, ROOT, depth)
    Q = q_transform(f, ROOT, cfg.M, depth)
    files = {"horofunction.json": hio.dump_horofunction(F) + "\n",
             "hf_laurent.json": hio.dump_laurent(H) + "\n",
             "q_grid.csv": hio.dump_grid_csv(Q, cfg.M)}
    if generated:
        files["f.json"] = hio.dump_vertex_function(f) + "\n"
    _write_all(cfg.out, files)
    print(f"wrote {', '.join(sorted(files))} to {cfg.out}")
    return EXIT_PASS


def _nearest_int_residual(values: np.ndarray) -> float:
    if values.size == 0:
        return 0.0
    return float(max(np.abs(values.real - np.round(values.real)).max(),
                     np.abs(values.imag).max()))


def cmd_invert(cfg: RunConfig) -> int:
    if cfg.inp is None:
        raise UsageError("invert needs --in q_grid.csv or --in hf_laurent.json")
    text = _read(cfg.inp)
    if cfg.inp.suffix == ".csv":
        G = hio.load_grid_csv(text, q=cfg.q, path=str(cfg.inp))
        M, kind = G.M, "q_grid"
        f = q_invert(G, G.tree.ball(ROOT, cfg.radius), M)
        input_norm = freq_norm_sq(G, M)  # Q is unitary
    else:
        G = hio.load_laurent(text, q=cfg.q, path=str(cfg.inp))
        M, kind = cfg.M, "hf_laurent"
        f = hf_invert(G, G.tree.ball(ROOT, cfg.radius), M)
        input_norm = freq_norm_sq(G, M, weighted=True)
    ball = G.tree.ball(ROOT, cfg.radius)
    vals = f.to_array(ball)
    rec_norm = float(np.sum(np.abs(vals) ** 2))
    rounded = VertexFunction(G.tree, {x: int(round(v.real)) for x, v in zip(ball, vals)
                                      if round(v.real) != 0})
    summary = {
        "source": kind,
        "q": G.tree.q,
        "M": M,
        "radius": cfg.radius,
        "input_norm_sq": input_norm,
        "reconstructed_norm_sq": rec_norm,
        # a nonzero gap means part of the energy lies outside ball(o, R)
        "norm_residual": abs(input_norm - rec_norm),
        "nearest_integer_residual": _nearest_int_residual(vals),
        "residuals": [{"word": list(x), "value_re": float(v.real), "value_im": float(v.imag),
                       "rounded": int(round(v.real))} for x, v in zip(ball, vals)],
    }
    cleaned = VertexFunction(G.tree, {x: complex(v) for x, v in zip(ball, vals)
                                      if abs(v) > 1e-12})
    files = {"f_reconstructed.json": hio.dump_vertex_function(cleaned) + "\n",
             "f_rounded.json": hio.dump_vertex_function(rounded) + "\n",
             "invert_summary.json": _dumps(summary)}
    _write_all(cfg.out, files)
    print(f"reconstructed {len(cleaned.entries)} nonzero values; norm residual "
          f"{summary['norm_residual']:.3e}, nearest-integer residual "
          f"{summary['nearest_integer_residual']:.3e}")
    return EXIT_PASS


def cmd_verify(cfg: RunConfig) -> int:
    if cfg.inp is None:
        raise UsageError("verify needs --in horofunction.json")
    F: HoroFunction = hio.load_horofunction(_read(cfg.inp), q=cfg.q, path=str(cfg.inp))
    reports = [
        check_range_cc(F, tol=cfg.tol("range_cc"), seed=cfg.seed),
        check_flat(F, M=cfg.M, tol=cfg.tol("flat"), seed=cfg.seed),
        check_sharp(phi_v(F, F.base), test_ball_radius=min(cfg.radius, F.depth - len(F.base)),
                    M=cfg.M, tol=cfg.tol("sharp"), seed=cfg.seed),
    ]
    files = {f"{r.condition}_report.json": r.to_json() + "\n" for r in reports}
    _write_all(cfg.out, files)
    for r in reports:
        print(r.summary())
    return EXIT_PASS if all(r.passed for r in reports) else EXIT_FAIL


def _columns(header: str, *cols: np.ndarray) -> str:
    lines = [f"# {header}"]
    lines += [" ".join(repr(float(c)) for c in row) for row in zip(*cols)]
    return "\n".join(lines) + "\n"


def cmd_plotdata(cfg: RunConfig) -> int:
    f, generated = _input_function(cfg)
    tree, M = f.tree, cfg.M
    # M rows closing the period, so the trapezoid rule over the rows is periodic
    t = np.linspace(0.0, tree.T, M)
    files = {"w.csv": _columns("t w", t, plancherel_weight(t, tree.q)),
             "m.csv": _columns("t m", t, multiplier(t, tree.q))}
    depth = max(cfg.cyl_depth, f.support_radius)
    H = helgason_fourier(f, ROOT, depth)
    n = np.arange(H.n_min, H.n_max + 1)
    S = np.abs(H.coeffs @ np.exp(1j * np.log(tree.q) * np.outer(n, t)))
    for i, u in enumerate(tree.words(depth)):
        tag = "_".join(str(a) for a in u) or "root"
        files[f"hf_abs_{tag}.csv"] = _columns(f"t |Hf| cylinder={list(u)}", t, S[i])
    if generated:
        files["f.json"] = hio.dump_vertex_function(f) + "\n"
    _write_all(cfg.out, files)
    print(f"wrote {len(files)} files to {cfg.out}")
    return EXIT_PASS


def cmd_demo_reducibility(cfg: RunConfig) -> int:
    f, _ = _input_function(cfg)
    rng = np.random.default_rng([cfg.seed, 1])
    gs = [Isometry.random(f.tree, rng, cfg.max_displacement) for _ in range(cfg.n_isometries)]
    r = reducibility_witness(f, gs, ROOT, cfg.M, tol=cfg.tol("witness"),
                             energy_tol=cfg.tol("witness_energy"), seed=cfg.seed)
    r.metadata["isometries"] = [repr(g) for g in gs]
    _write_all(cfg.out, {"reducibility_report.json": r.to_json() + "\n"})
    print(r.summary())
    m = r.metadata
    print(f"||h1||^2 = {m['h1_norm_sq']:.6g}, ||h2||^2 = {m['h2_norm_sq']:.6g}, "
          f"||f||^2 = {m['f_norm_sq']:.6g}; <h1, h1> control = {m['control_h1_h1']:.6g}")
    return EXIT_PASS if r.passed else EXIT_FAIL


COMMANDS = {
    "selftest": cmd_selftest,
    "transform": cmd_transform,
    "invert": cmd_invert,
    "verify": cmd_verify,
    "plotdata": cmd_plotdata,
    "demo-reducibility": cmd_demo_reducibility,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # argparse exits with status 2 on bad flags
    cfg = config_from_args(args)
    try:
        cfg.validate()
        return COMMANDS[cfg.command](cfg)
    except (UsageError, HoroRadonError) as exc:
        print(f"hororadon {cfg.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
