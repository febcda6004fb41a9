"""Command-line pipeline: parse, embed, reduce, solve, verify, certify, roundtrip, render."""
from __future__ import annotations

import argparse
import colorsys
import hashlib
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import catalog
from .exact_cover import BudgetExceeded
from .formula import FormulaError, load_formula, one_in_three_oracle, serialize_formula, incidence_graph
from .gadget import certify_gadget
from .matcher import Matching, Verdict, exact_decide, greedy_local_search, verdict_json, verify_matching
from .planar_embed import GridEmbedding, NonPlanarError, embedding_from_json, embedding_to_json, orthogonal_embed
from .reduction import (DecodeError, PlacementConflict, ReductionOutput, WitnessError, decode_assignment,
                        dumps_points, dumps_provenance, loads_points, loads_provenance, reduce)

# exit codes
OK = 0
ERROR = 1  # usage or I/O problems
PARSE_FAILURE = 2
NONPLANAR = 3
PLACEMENT_CONFLICT = 4
MISMATCH = 5
PRECISION = 6
BUDGET_EXCEEDED = 75  # not a failure: the answer is unknown, not wrong


@dataclass
class PipelineConfig:
    k: int = 3
    mode: str = "grid"
    budget: float | None = None
    seed: int = 0
    out: Path = Path(".")
    max_digits: int = 30

    def __post_init__(self):
        if self.k < 3:
            raise ValueError("k must be at least 3")
        if self.budget is not None and self.budget <= 0:
            raise ValueError("budget must be positive")


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _config(a) -> PipelineConfig:
    return PipelineConfig(getattr(a, "k", 3), getattr(a, "mode", "grid"), getattr(a, "budget", None),
                          getattr(a, "seed", 0), Path(getattr(a, "out", ".")),
                          getattr(a, "precision_policy", 30))


def _formula(path):
    try:
        return load_formula(path)
    except FormulaError as e:
        raise CliError(PARSE_FAILURE, f"parse failure: {e}") from None
    except OSError as e:
        raise CliError(ERROR, str(e)) from None


def _embed(f):
    try:
        return orthogonal_embed(incidence_graph(f))
    except NonPlanarError as e:
        raise CliError(NONPLANAR, f"nonplanar: {e}") from None


def _reduce(f, emb, cfg: PipelineConfig) -> ReductionOutput:
    digits = None
    if cfg.mode == "path" and cfg.k % 2 == 1 and cfg.k >= 7:
        from .path_variant import PrecisionError, choose_precision, triangle_count
        try:
            digits = choose_precision(triangle_count(f), cfg.k, cfg.max_digits)[0]
        except PrecisionError as e:
            raise CliError(PRECISION, str(e)) from None
    try:
        return reduce(f, emb, cfg.k, mode=cfg.mode, digits=digits)
    except PlacementConflict as e:
        raise CliError(PLACEMENT_CONFLICT, f"placement conflict: {e}") from None


def _write(cfg: PipelineConfig, name: str, text: str) -> Path:
    cfg.out.mkdir(parents=True, exist_ok=True)
    path = cfg.out / name
    path.write_text(text, encoding="utf-8")
    return path


def _stem(path) -> str:
    return Path(path).name.split(".")[0]


def _weight_label(k: int, W: Fraction, m: int) -> str:
    extra = W - (k - 1) * m
    return f"{k - 1}m" + (f" + {extra}" if extra else "")


# ---------------------------------------------------------------------------
# subcommands

def cmd_parse(a) -> int:
    cfg = _config(a)
    f = _formula(a.formula)
    p = _write(cfg, f"{_stem(a.formula)}.m1in3", serialize_formula(f))
    print(f"parsed: {f.num_vars} variables, {len(f.clauses)} clauses -> {p}")
    return OK


def cmd_embed(a) -> int:
    cfg = _config(a)
    f = _formula(a.formula)
    emb = _embed(f)
    p = _write(cfg, f"{_stem(a.formula)}.embedding.json", embedding_to_json(emb))
    x0, y0, x1, y1 = emb.bbox
    print(f"embedded: {len(emb.vertex_pos)} vertices on a {x1 - x0 + 1} x {y1 - y0 + 1} grid -> {p}")
    return OK


def cmd_reduce(a) -> int:
    cfg = _config(a)
    f = _formula(a.formula)
    red = _reduce(f, _embed(f), cfg)
    stem = f"{_stem(a.formula)}.k{cfg.k}.{cfg.mode}"
    p = _write(cfg, f"{stem}.points", dumps_points(red))
    _write(cfg, f"{stem}.provenance", dumps_provenance(red))
    print(f"reduced: {len(red.points)} points, k={red.k}, m={red.m}, refinement {red.refinement}"
          + (f", t={red.digits}" if red.digits else "") + f" -> {p}")
    return OK


def _load_points(path):
    try:
        return loads_points(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        raise CliError(PARSE_FAILURE, f"cannot read point set: {e}") from None


def cmd_solve(a) -> int:
    cfg = _config(a)
    ps = _load_points(a.points)
    mode = "path" if ps.mode == "path" else "mst"
    stem = Path(a.points).name.removesuffix(".points")
    if a.heuristic:
        match = greedy_local_search(ps.points, ps.k, seed=cfg.seed, mode=mode)
    else:
        t0 = time.time()
        try:
            match = exact_decide(ps.points, ps.k, ps.target, mode=mode, budget=cfg.budget)
        except BudgetExceeded as e:
            print(f"budget exceeded after {time.time() - t0:.1f} s: {e}")
            return BUDGET_EXCEEDED
        if match is None:
            print(f"no k-matching of weight <= {_weight_label(ps.k, ps.target, ps.m)} = {ps.target}")
            return OK
    verdict, weight = verify_matching(ps.points, match, ps.target, mode=mode, k=ps.k)
    p = _write(cfg, f"{stem}.matching", match.dumps())
    print(f"matching weight {weight} ({float(weight):.6f}); {verdict.value} {ps.target} -> {p}")
    if not a.heuristic and verdict is not Verdict.le:
        return MISMATCH
    return OK


def cmd_verify(a) -> int:
    ps = _load_points(a.points)
    try:
        match = Matching.loads(Path(a.matching).read_text(encoding="utf-8"))
        verdict, weight = verify_matching(ps.points, match, ps.target,
                                          mode="path" if ps.mode == "path" else "mst", k=ps.k)
    except (OSError, ValueError) as e:
        raise CliError(PARSE_FAILURE, f"cannot verify: {e}") from None
    print(verdict_json(verdict, weight, ps.target))
    return OK if verdict is Verdict.le else MISMATCH


def cmd_certify(a) -> int:
    cfg = _config(a)
    try:
        t = catalog.build(a.gadget)
    except KeyError as e:
        raise CliError(ERROR, str(e.args[0])) from None
    try:
        cert = certify_gadget(t, mode=a.weight, budget=cfg.budget)
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}")
        return BUDGET_EXCEEDED
    lines = [f"certification {t.kind} k={cert.k} mode={cert.mode} checksum={cert.checksum}",
             f"ports {' '.join(cert.port_names)}",
             f"feasible states: {len(cert.feasible)}"]
    lines += [f"  {' '.join(map(str, s))}  ({n} matchings)" for s, n in sorted(cert.feasible.items())]
    lines.append(f"admissible but infeasible: {len(cert.infeasible)}")
    lines += [f"  {' '.join(map(str, s))}" for s in sorted(cert.infeasible)]
    if cert.nonpath_only:
        lines.append(f"feasible only through non-path blocks: {len(cert.nonpath_only)}")
        lines += [f"  {' '.join(map(str, s))}" for s in cert.nonpath_only]
    report = "\n".join(lines) + "\n"
    p = _write(cfg, f"{a.gadget}.{a.weight}.cert", report)
    sys.stdout.write(report)
    print(f"-> {p}")
    return OK


def cmd_roundtrip(a) -> int:
    cfg = _config(a)
    f = _formula(a.formula)
    red = _reduce(f, _embed(f), cfg)
    oracle = one_in_three_oracle(f)
    mode = "path" if cfg.mode == "path" else "mst"
    W = red.target_weight + (Fraction(1, 5) if cfg.mode == "path" else 0)
    label = _weight_label(cfg.k, W, red.m)
    try:
        match = exact_decide(red.points, cfg.k, W, mode=mode, budget=cfg.budget)
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}")
        return BUDGET_EXCEEDED
    if match is None:
        if oracle is not None:
            print(f"MISMATCH: no matching of weight <= {label}, but the oracle finds {oracle}")
            return MISMATCH
        print(f"unsatisfiable; no matching of weight <= {label} (m={red.m})")
        return OK
    verdict, weight = verify_matching(red.points, match, W, mode=mode, k=cfg.k)
    try:
        values = decode_assignment(red, match)
    except DecodeError as e:
        print(f"MISMATCH: decoding failed: {e}")
        return MISMATCH
    if oracle is None or not f.satisfied(values) or verdict is not Verdict.le:
        print(f"MISMATCH: matching found, oracle={oracle}, decoded={values}, verdict={verdict.value}")
        return MISMATCH
    stem = f"{_stem(a.formula)}.k{cfg.k}.{cfg.mode}"
    _write(cfg, f"{stem}.matching", match.dumps())
    if weight.is_rational and weight.rational_value() == (cfg.k - 1) * red.m:
        print(f"satisfiable; matching weight = {cfg.k - 1}m (m={red.m}, weight {weight})")
    else:
        print(f"satisfiable; matching weight {weight} <= {label} (m={red.m})")
    print("assignment: " + " ".join(f"x{i + 1}={int(v)}" for i, v in enumerate(values)))
    return OK


# ---------------------------------------------------------------------------
# SVG

def _colour(name: str) -> str:
    if name == "pad":
        return "#000000"
    base = {"x": 0.6, "C": 0.0}.get(name[:1], None)
    h = int(hashlib.md5(name.encode()).hexdigest()[:4], 16) / 65535
    if base is None:  # wires: muted
        r, g, b = colorsys.hls_to_rgb(h, 0.55, 0.25)
    else:
        r, g, b = colorsys.hls_to_rgb((base + 0.08 * h) % 1, 0.45, 0.8)
    return "#%02x%02x%02x" % (int(r * 255), int(g * 255), int(b * 255))


def _svg(elems: list[str], bbox, pad: float = 2) -> str:
    x0, y0, x1, y1 = (float(c) for c in bbox)
    w, h = x1 - x0 + 2 * pad, y1 - y0 + 2 * pad
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0 - pad:g} {-(y1 + pad):g} {w:g} {h:g}" '
            f'width="{min(2000, max(200, 8 * w)):.0f}" height="{min(2000, max(200, 8 * w)) * h / w:.0f}">')
    # y axis points up in the construction; flip by negating y in element coordinates
    return "\n".join([head, '<rect x="%g" y="%g" width="%g" height="%g" fill="white"/>' % (x0 - pad, -(y1 + pad), w, h)]
                     + elems + ["</svg>"]) + "\n"


def render_points(points, provenance=None, match: Matching | None = None) -> str:
    from .matcher import _mst_edges
    elems = []
    if match is not None:
        for block in match.blocks:
            pts = [points[i] for i in block]
            for i, j in _mst_edges(pts):
                (ax, ay), (bx, by) = pts[i], pts[j]
                elems.append(f'<line x1="{float(ax):g}" y1="{-float(ay):g}" x2="{float(bx):g}" '
                             f'y2="{-float(by):g}" stroke="#333" stroke-width="0.25"/>')
    for i, (x, y) in enumerate(points):
        col = _colour(provenance[i]) if provenance else "#1f4e9a"
        elems.append(f'<circle cx="{float(x):g}" cy="{-float(y):g}" r="0.3" fill="{col}"/>')
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return _svg(elems, (min(xs), min(ys), max(xs), max(ys)))


def render_embedding(emb: GridEmbedding) -> str:
    elems = []
    for path in emb.edge_path.values():
        d = " ".join(f"{x},{-y}" for x, y in path)
        elems.append(f'<polyline points="{d}" fill="none" stroke="#555" stroke-width="0.08"/>')
    for node, (x, y) in emb.vertex_pos.items():
        col = "#1f4e9a" if node[0] == "v" else "#b22222"
        label = f"x{node[1] + 1}" if node[0] == "v" else f"C{node[1] + 1}"
        elems.append(f'<circle cx="{x}" cy="{-y}" r="0.3" fill="{col}"/>')
        elems.append(f'<text x="{x + 0.35}" y="{-y - 0.35}" font-size="0.6">{label}</text>')
    return _svg(elems, emb.bbox, pad=1)


def cmd_render(a) -> int:
    cfg = _config(a)
    src = Path(a.input)
    try:
        text = src.read_text(encoding="utf-8")
        if src.suffix == ".json":
            svg = render_embedding(embedding_from_json(text))
        elif src.suffix == ".points":
            ps = loads_points(text)
            side = src.with_suffix(".provenance")
            prov = loads_provenance(side.read_text(encoding="utf-8")) if side.exists() else None
            match = Matching.loads(Path(a.matching).read_text(encoding="utf-8")) if a.matching else None
            svg = render_points(ps.points, prov, match)
        else:
            f = _formula(src)
            cfg_r = PipelineConfig(a.k, a.mode, None, 0, cfg.out, cfg.max_digits)
            red = _reduce(f, _embed(f), cfg_r)
            svg = render_points(red.points, red.provenance)
    except (OSError, ValueError) as e:
        raise CliError(PARSE_FAILURE, f"cannot render {src}: {e}") from None
    p = _write(cfg, f"{src.name}.svg", svg)
    print(f"rendered -> {p}")
    return OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kmatching", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, k=False, budget=False):
        p.add_argument("--out", default=".", help="output directory (default: current)")
        if k:
            p.add_argument("--k", type=int, default=3)
            p.add_argument("--mode", choices=("grid", "path"), default="grid")
            p.add_argument("--precision-policy", type=int, default=30, metavar="MAX_DIGITS",
                           help="largest decimal digit count for off-grid coordinates (path mode)")
        if budget:
            p.add_argument("--budget", type=float, default=None, help="solver time cap in seconds")
            p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("parse", help="validate a formula and write it in canonical form")
    p.add_argument("formula")
    common(p)
    p.set_defaults(func=cmd_parse)
    p = sub.add_parser("embed", help="planar orthogonal grid drawing of the incidence graph")
    p.add_argument("formula")
    common(p)
    p.set_defaults(func=cmd_embed)
    p = sub.add_parser("reduce", help="build the k-matching point set")
    p.add_argument("formula")
    common(p, k=True)
    p.set_defaults(func=cmd_reduce)
    p = sub.add_parser("solve", help="decide a point-set file against its target weight")
    p.add_argument("points")
    p.add_argument("--heuristic", action="store_true", help="seeded greedy + local search instead")
    common(p, budget=True)
    p.set_defaults(func=cmd_solve)
    p = sub.add_parser("verify", help="check a matching file against a point-set file")
    p.add_argument("points")
    p.add_argument("matching")
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("certify", help="enumerate a gadget's feasible boundary states")
    p.add_argument("--gadget", required=True, choices=catalog.names())
    p.add_argument("--weight", choices=("mst", "path"), default="mst")
    common(p, budget=True)
    p.set_defaults(func=cmd_certify)
    p = sub.add_parser("roundtrip", help="formula -> points -> exact decision -> decode -> oracle check")
    p.add_argument("formula")
    common(p, k=True, budget=True)
    p.set_defaults(func=cmd_roundtrip)
    p = sub.add_parser("render", help="SVG of an embedding (.json), point set (.points) or formula")
    p.add_argument("input")
    p.add_argument("--matching", help="matching file to outline (point sets only)")
    common(p, k=True)
    p.set_defaults(func=cmd_render)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _config(args)
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except (WitnessError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
