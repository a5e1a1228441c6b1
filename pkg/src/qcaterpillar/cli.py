"""Command-line interface.

    python -m qcaterpillar gen --stalk 5,3,2,4 --out shape.json
    python -m qcaterpillar forward --shape shape.json --windows 50 --out spec
    python -m qcaterpillar recover spec_neumann.csv spec_dirichlet.csv --out report.json
    python -m qcaterpillar paper-example

Exit codes: 0 ok, 1 usage error, 2 domain failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .cfrac import RealRatio, cf_build, cf_expand_exact, cf_expand_rounded
from .errors import CaterpillarError, InvalidShape
from .pencil import build_pencil, psi_theta_ratio
from .poly import RationalFunction, RationalPoly
from .recover import RecoverOptions, recover
from .spectra import TWO_PI, NoiseModel, Spectrum, forward_spectra
from .tree import CaterpillarShape, enumerate_shapes, random_shape, shape_to_tree, shapes_up_to

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


@dataclass
class Config:
    command: str
    inputs: tuple[str, ...] = ()
    out: Optional[str] = None
    l: float = 1.0
    windows: int = 50
    noise: float = 0.0
    decay: str = "const"
    seed: int = 0
    tol: Optional[float] = None
    gap: float = 0.05
    fmt: str = "json"

    def validate(self) -> "Config":
        if not (self.l > 0 and math.isfinite(self.l)):
            raise UsageError("--l must be a positive finite number")
        if self.windows < 1:
            raise UsageError("--windows must be >= 1")
        if not self.noise >= 0:
            raise UsageError("--noise must be >= 0")
        if not self.gap > 0:
            raise UsageError("--gap must be > 0")
        if self.tol is not None and not self.tol > 0:
            raise UsageError("--tol must be > 0")
        paths = [os.path.abspath(p) for p in self.inputs if p and p != "-"]
        if self.out and self.out != "-" and os.path.abspath(self.out) in paths:
            raise UsageError("--out must differ from the input files")
        if len(set(paths)) != len(paths):
            raise UsageError("input files must be distinct")
        return self


# -- io helpers -------------------------------------------------------------


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _write_text(path: Optional[str], text: str) -> None:
    if not path or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _parse_stalk(text: str) -> CaterpillarShape:
    try:
        return CaterpillarShape.parse(text)
    except InvalidShape as exc:
        raise UsageError(f"--stalk: {exc}") from exc


def _load_shape(args) -> CaterpillarShape:
    if getattr(args, "stalk", None) is not None:
        return _parse_stalk(args.stalk)
    if getattr(args, "shape", None):
        try:
            obj = json.loads(_read_text(args.shape))
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.shape}: not JSON ({exc})") from exc
        return CaterpillarShape.from_json(obj)
    raise UsageError("give --stalk or --shape")


def _shape_doc(shape: CaterpillarShape) -> dict:
    return {"interior_degrees": list(shape.interior_degrees), "p": shape.vertex_count,
            "tree": shape_to_tree(shape).to_json()}


# -- commands ---------------------------------------------------------------


def cmd_gen(args) -> int:
    if args.stalk is not None:
        shape = _parse_stalk(args.stalk)
    elif args.p is not None:
        if args.p < 2:
            raise UsageError("--p must be >= 2")
        shape = random_shape(args.p, args.seed)
    else:
        raise UsageError("give --stalk or --p")
    _write_text(args.out, _dump(_shape_doc(shape)))
    return EXIT_OK


def cmd_forward(args) -> int:
    cfg = Config("forward", (args.shape or "",), args.out, args.l, args.windows, args.noise,
                 args.decay, args.seed, fmt=args.format).validate()
    shape = _load_shape(args)
    noise = NoiseModel(cfg.noise, cfg.decay, cfg.seed) if cfg.noise > 0 else None
    neu, dir_ = forward_spectra(shape_to_tree(shape), cfg.l, cfg.windows, noise)
    ext = "csv" if cfg.fmt == "csv" else "json"
    prefix = cfg.out or "spectrum"
    paths = {}
    for name, spec in (("neumann", neu), ("dirichlet", dir_)):
        paths[name] = f"{prefix}_{name}.{ext}"
        _write_text(paths[name], spec.dumps(cfg.fmt))
    print(_dump({"shape": list(shape.interior_degrees), "files": paths,
                 "entries": {"neumann": len(neu), "dirichlet": len(dir_)}}), end="")
    return EXIT_OK


def cmd_polys(args) -> int:
    shape = _load_shape(args)
    tree = shape_to_tree(shape)
    pair = build_pencil(tree)
    doc = {"shape": list(shape.interior_degrees), **pair.to_json(),
           "ratio": psi_theta_ratio(tree, pair).to_json()}
    _write_text(args.out, _dump(doc))
    return EXIT_OK


def _is_exact_coeffs(cs) -> bool:
    return all(isinstance(c, (int, str)) for c in cs)


def cmd_expand(args) -> int:
    try:
        obj = json.loads(_read_text(args.ratio))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.ratio}: not JSON ({exc})") from exc
    if "ratio" in obj and "num" not in obj:  # accept the output of `polys`
        obj = obj["ratio"]
    try:
        coeffs = [c for key in ("num", "den") for c in
                  (obj[key]["coeffs"] if isinstance(obj[key], dict) else obj[key])]
    except (KeyError, TypeError) as exc:
        raise UsageError("ratio JSON needs num and den coefficient lists") from exc
    mode = args.mode
    if mode == "auto":
        mode = "exact" if _is_exact_coeffs(coeffs) else "rounded"
    if mode == "exact":
        f = RationalFunction.from_json(obj)
        shape, trace = cf_expand_exact(f)
    else:
        shape, trace = cf_expand_rounded(RealRatio.from_json(obj), args.tol if args.tol else 1e-9)
    _write_text(args.out, _dump({"interior_degrees": list(shape.interior_degrees), "mode": mode,
                                 "trace": trace.to_json()}))
    return EXIT_OK


def _load_spectrum(path: str, l: float) -> Spectrum:
    text = _read_text(path)
    if text.lstrip().startswith("{"):
        return Spectrum.from_json(json.loads(text))
    return Spectrum.from_csv(text, l)


def plot_data_csv(rep, neumann: Spectrum, dirichlet: Spectrum, l: float, windows: int) -> str:
    """Residues with their cluster index, then the estimated roots."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["series", "spectrum", "sqrt_lambda", "residue", "cluster", "value"])
    for name, spec, cs in (("neumann", neumann, rep.neumann_clusters),
                           ("dirichlet", dirichlet, rep.dirichlet_clusters)):
        centers = np.array(cs.centers) if cs is not None and cs.clusters else None
        for s in spec.sqrt_values:
            y = s * l
            if y >= TWO_PI * (windows + 1):
                continue
            r = y % TWO_PI
            idx = ""
            if centers is not None:
                idx = int(np.argmin(np.abs((r - centers + math.pi) % TWO_PI - math.pi)))
            w.writerow(["residue", name, repr(float(s)), repr(float(r)), idx, ""])
    for name, roots in (("alpha", rep.alphas), ("beta", rep.betas)):
        if roots is None:
            continue
        for v in roots.expanded():
            w.writerow(["root", name, "", repr(math.acos(max(-1.0, min(1.0, v)))), "", repr(v)])
    return buf.getvalue()


def cmd_recover(args) -> int:
    cfg = Config("recover", (args.neumann, args.dirichlet), args.out, args.l, args.windows,
                 tol=args.tol, gap=args.gap).validate()
    if args.plot_data and args.plot_data in (args.neumann, args.dirichlet, args.out):
        raise UsageError("--plot-data must differ from the other files")
    neu = _load_spectrum(args.neumann, cfg.l)
    dir_ = _load_spectrum(args.dirichlet, cfg.l)
    opts = RecoverOptions(windows=cfg.windows, gap=cfg.gap, tol=cfg.tol, match_factor=args.match_factor,
                          verify=not args.no_verify)
    rep = recover(neu, dir_, cfg.l, opts)
    _write_text(args.out, _dump(rep.to_json()))
    if args.plot_data:
        _write_text(args.plot_data, plot_data_csv(rep, neu, dir_, cfg.l, cfg.windows))
    if not rep.ok:
        print(f"recovery failed: {rep.reason}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


def check_unique(p_max: int) -> tuple[bool, int, list]:
    """Compare cf_build ratios of all shapes with 2 <= p <= p_max; returns (unique, count, collisions)."""
    seen: dict[RationalFunction, CaterpillarShape] = {}
    collisions = []
    count = 0
    for s in shapes_up_to(p_max):
        count += 1
        f = cf_build(s)
        if f in seen:
            collisions.append((seen[f], s))
        else:
            seen[f] = s
    return not collisions, count, collisions


def cmd_enumerate(args) -> int:
    if args.p < 2:
        raise UsageError("--p must be >= 2")
    shapes = enumerate_shapes(args.p)
    doc = {"p": args.p, "count": len(shapes), "shapes": [list(s.interior_degrees) for s in shapes]}
    status = EXIT_OK
    if args.check_unique:
        unique, checked, coll = check_unique(args.p)
        doc.update({"unique": unique, "checked_shapes": checked,
                    "collisions": [[list(a.interior_degrees), list(b.interior_degrees)] for a, b in coll]})
        print(f"unique: {str(unique).lower()} ({checked} shapes with p <= {args.p})", file=sys.stderr)
        status = EXIT_OK if unique else EXIT_DOMAIN
    if args.format == "csv":
        text = "p,interior_degrees\n" + "".join(f"{args.p},\"{','.join(map(str, s))}\"\n" for s in doc["shapes"])
    else:
        text = _dump(doc)
    _write_text(args.out, text)
    return status


# the worked example: reduced psi/theta of the caterpillar with stalk degrees 5,3,2,4
EXAMPLE_PSI = (0, 40, 0, -189, 0, 269, 0, -120)
EXAMPLE_THETA = (-30, 0, 156, 0, -245, 0, 120)
EXAMPLE_SHAPE = (5, 3, 2, 4)
# residuals G after each stage, as (num, den) ascending; the second one is
# 24z^4 - 33z^2 + 10 by the surrounding algebra
EXAMPLE_STAGES = (
    ((0, 7, 0, -8), (10, 0, -33, 0, 24)),
    ((3, 0, -4), (0, -7, 0, 8)),
    ((0, -1), (-3, 0, 4)),
    ((-1,), (0, 1)),
)


def run_worked_example() -> list[tuple[str, bool, str]]:
    checks = []
    ratio = RationalFunction(RationalPoly(EXAMPLE_PSI), RationalPoly(EXAMPLE_THETA))
    shape, trace = cf_expand_exact(ratio)
    checks.append(("expansion gives (5,3,2,4)", shape.interior_degrees == EXAMPLE_SHAPE, str(shape)))
    for (num, den), st in zip(EXAMPLE_STAGES, trace.stages):
        want = RationalFunction(RationalPoly(num), RationalPoly(den))
        checks.append((f"stage {st.index} residual", st.residual == want, str(st.residual)))
    checks.append(("stage count", len(trace.stages) == len(EXAMPLE_STAGES), str(len(trace.stages))))
    built = cf_build(CaterpillarShape(EXAMPLE_SHAPE))
    checks.append(("continued fraction rebuilds psi/theta", built == ratio, str(built)))
    exact = (built.num.coeffs == tuple(Fraction(c) for c in EXAMPLE_PSI)
             and built.den.coeffs == tuple(Fraction(c) for c in EXAMPLE_THETA))
    checks.append(("polynomials match coefficient-wise", exact, ""))
    from_det = psi_theta_ratio(shape_to_tree(CaterpillarShape(EXAMPLE_SHAPE)))
    checks.append(("pencil determinants give the same ratio", from_det == ratio, str(from_det)))
    return checks


def cmd_paper_example(args) -> int:
    t0 = time.perf_counter()
    checks = run_worked_example()
    for name, ok, detail in checks:
        print(f"{'ok  ' if ok else 'FAIL'} {name}" + (f"  [{detail}]" if detail and not ok else ""))
    passed = all(ok for _, ok, _ in checks)
    print(f"{'PASS' if passed else 'FAIL'} ({time.perf_counter() - t0:.3f}s)")
    return EXIT_OK if passed else EXIT_DOMAIN


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qcaterpillar", description="Caterpillar shapes from two spectra.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def shape_args(p):
        p.add_argument("--stalk", help='interior stalk degrees, e.g. "5,3,2,4"')
        p.add_argument("--shape", help="shape JSON file (from gen)")

    p = sub.add_parser("gen", help="write a shape file")
    p.add_argument("--stalk")
    p.add_argument("--p", type=int, help="vertex count for a random shape")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("forward", help="Neumann and Dirichlet spectra of a shape")
    shape_args(p)
    p.add_argument("--l", type=float, default=1.0)
    p.add_argument("--windows", type=int, default=50)
    p.add_argument("--noise", type=float, default=0.0, help="perturbation amplitude on sqrt(lambda)")
    p.add_argument("--decay", choices=("const", "1/k"), default="const")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output prefix; writes PREFIX_neumann.csv and PREFIX_dirichlet.csv")
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("polys", help="psi, theta, omega and the reduced ratio")
    shape_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_polys)

    p = sub.add_parser("expand", help="continued-fraction expansion of a ratio JSON")
    p.add_argument("ratio")
    p.add_argument("--mode", choices=("auto", "exact", "rounded"), default="auto")
    p.add_argument("--tol", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("recover", help="recover a shape from two spectrum files")
    p.add_argument("neumann")
    p.add_argument("dirichlet")
    p.add_argument("--l", type=float, default=1.0)
    p.add_argument("--windows", type=int, default=RecoverOptions.windows)
    p.add_argument("--gap", type=float, default=RecoverOptions.gap)
    p.add_argument("--tol", type=float, help="expansion tolerance (default: derived from cluster spread)")
    p.add_argument("--match-factor", type=float, default=RecoverOptions.match_factor)
    p.add_argument("--no-verify", action="store_true")
    p.add_argument("--plot-data", help="CSV of residues, clusters and roots")
    p.add_argument("--out")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("enumerate", help="list shapes on p vertices")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--check-unique", action="store_true", help="compare ratios of all shapes up to p")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("paper-example", help="run the worked 12-vertex example")
    p.set_defaults(func=cmd_paper_example)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qcaterpillar: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CaterpillarError, ValueError, ArithmeticError) as exc:
        print(f"qcaterpillar: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
