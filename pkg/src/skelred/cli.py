"""Command-line interface: ``skelred <command> ...``.

Exit codes: 0 ok, 2 invalid input, 3 refused because the input is wild,
4 no matching template.  ``--json`` prints one object carrying
``"schema": "skelred/1"``; ``SKELRED_COLOR=1`` colours the text output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from . import annuli, elliptic, galois, sncgraph, triangulate
from .errors import SkelredError
from .exactmath import ContinuedFraction, cf_expand, format_rational, parse_rational
from .sncgraph import id_key

SCHEMA = "skelred/1"
EXIT_CODES = {"ok": 0, "invalid_input": 2, "wild_refusal": 3, "no_match": 4}
FILE_COMMANDS = ("validate", "genus", "triangulate", "saito", "basechange", "quotient", "mintr", "dot")


@dataclass
class CommandResult:
    status: str
    payload: dict[str, Any] = field(default_factory=dict)
    diagnostics: list[str] = field(default_factory=list)
    text: list[str] = field(default_factory=list)
    command: str = ""

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def to_json(self) -> str:
        obj = {
            "schema": SCHEMA,
            "command": self.command,
            "status": self.status,
            "payload": self.payload,
            "diagnostics": self.diagnostics,
        }
        return json.dumps(obj, indent=2, sort_keys=True)

    def render(self, color: bool = False) -> str:
        lines = list(self.text)
        for d in self.diagnostics:
            lines.append(_paint(d, "33", color))
        if self.status != "ok":
            lines.append(_paint(f"status: {self.status}", "31", color))
        return "\n".join(lines)


def _paint(s: str, code: str, color: bool) -> str:
    return f"\x1b[{code}m{s}\x1b[0m" if color else s


def _color_enabled() -> bool:
    return os.environ.get("SKELRED_COLOR", "").lower() in ("1", "true", "yes", "always")


class _UsageError(Exception):
    def __init__(self, message: str, usage: str):
        super().__init__(message)
        self.usage = usage


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        raise _UsageError(message, self.format_usage())


def _q(x: Fraction) -> str:
    return format_rational(x)


def _table(rows: Sequence[Sequence[str]]) -> list[str]:
    if not rows:
        return []
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]


def _ids(xs) -> list[str]:
    return sorted(xs, key=id_key)


# --- commands --------------------------------------------------------------------


def cmd_cf(a) -> CommandResult:
    text = a.value.strip()
    if text.startswith("["):
        cf = ContinuedFraction.parse(text)
        q = cf.value
    else:
        q = parse_rational(text)
        cf = cf_expand(q)
    return CommandResult("ok", {"rational": _q(q), "cf": str(cf), "terms": list(cf.terms)},
                         text=[str(cf) if not text.startswith("[") else _q(q)])


def _annulus(a) -> annuli.FractionalAnnulus:
    return annuli.FractionalAnnulus(parse_rational(a.inner), parse_rational(a.outer))


def cmd_annulus(a) -> CommandResult:
    if a.action == "regular":
        x = _annulus(a)
        reg = annuli.is_regular(x)
        return CommandResult("ok", {"annulus": str(x), "regular": reg,
                                    "end_multiplicities": list(x.end_multiplicities)},
                             text=[f"{x}: {'regular' if reg else 'not regular'}"])
    if a.action == "resolve":
        x = _annulus(a)
        cuts = annuli.minimal_regular_subdivision(x)
        return CommandResult("ok", {"annulus": str(x), "cuts": [_q(c) for c in cuts],
                                    "pieces": len(cuts) + 1},
                             text=[f"{x}: {len(cuts) + 1} pieces",
                                   "cuts: " + (", ".join(_q(c) for c in cuts) or "none")])
    if a.action == "blowups":
        steps = annuli.blowup_resolution(parse_rational(a.target))
        return CommandResult("ok", {"steps": [{"direction": s.direction, "exponent": _q(s.new_exp)}
                                              for s in steps]},
                             text=_table([[str(i), s.direction, _q(s.new_exp)]
                                          for i, s in enumerate(steps, 1)]) or ["no blowups"])
    if a.action == "witness":
        x = annuli.coprime_regular_witness(a.m, a.m2)
        return CommandResult("ok", {"inner": _q(x.inner_exp), "outer": _q(x.outer_exp),
                                    "end_multiplicities": list(x.end_multiplicities)},
                             text=[str(x)])
    if a.action == "fiber":
        f = annuli.formal_fiber_type(a.mults, a.p)
        return CommandResult("ok", {"kind": f.kind, "constants_degree": f.constants_degree},
                             text=[f"{f.kind}, constants of degree {f.constants_degree}"])
    raise AssertionError(a.action)  # pragma: no cover


def _graph(path: str) -> sncgraph.SncGraph:
    return sncgraph.load(path)


def cmd_validate(a) -> CommandResult:
    g = _graph(a.path)
    diags = sncgraph.validate(g)
    for c in sncgraph.chains(g):
        diags += sncgraph.chain_gcd_check(g, c)
    errors = [d for d in diags if d.level == "error"]
    res = CommandResult("ok" if not errors else "invalid_input",
                        {"valid": not errors, "diagnostics": [d.__dict__ for d in diags]},
                        [str(d) for d in diags])
    res.text = [f"{a.path}: {'ok' if not errors else 'invalid'}"]
    return res


def cmd_genus(a) -> CommandResult:
    n = sncgraph.genus_semistable(_graph(a.path))
    return CommandResult("ok", {"genus": n}, text=[str(n)])


def _report(r: triangulate.SaitoReport) -> dict[str, Any]:
    return {"lcm": r.lcm, "residue_char": r.residue_char, "tame": r.tame, "degree": r.degree}


def cmd_triangulate(a) -> CommandResult:
    g = _graph(a.path)
    t = triangulate.minimal_strong_triangulation_tame(g, a.p)
    comps = [{"kind": c.kind, "boundary": list(c.boundary), "vertices": list(c.vertices)}
             for c in t.components]
    rows = [["kind", "boundary", "vertices"]]
    rows += [[c.kind, ",".join(c.boundary), ",".join(c.vertices) or "-"] for c in t.components]
    return CommandResult(
        "ok", {"principal": list(t.vertices), "components": comps, "saito": _report(t.report)},
        text=[f"principal: {', '.join(t.vertices)}", f"degree: {t.report.degree}", *_table(rows)],
    )


def cmd_saito(a) -> CommandResult:
    g = _graph(a.path)
    pr = _ids(triangulate.principalize(g))
    r = triangulate.saito_report((g.multiplicity(v) for v in pr), a.p)
    text = [f"principal: {', '.join(pr)}", f"lcm: {r.lcm}",
            f"tame: {'yes' if r.tame else 'no'}", f"degree: {r.degree if r.tame else '-'}"]
    return CommandResult("ok", {"principal": pr, **_report(r)}, text=text)


def cmd_basechange(a) -> CommandResult:
    g = _graph(a.path)
    new = triangulate.base_change_tame(g, a.degree, a.p)
    rows = [[v, str(g.multiplicity(v)), str(m)] for v, m in new.items()]
    return CommandResult("ok", {"multiplicities": new},
                         text=_table([["vertex", "m", "new m"], *rows]))


def _q_payload(q: galois.QuotientSkeleton) -> dict[str, Any]:
    return {
        "vertices": [{"id": v.id, "genus": v.genus, "s": v.s, "fold": v.fold,
                      "midpoint": v.midpoint, "witness": v.witness,
                      "lifts": list(v.lifts), "marks": list(v.marks)} for v in q.vertices],
        "edges": [{"id": e.id, "u": e.u, "w": e.w, "s": e.s, "lifts": list(e.lifts)}
                  for e in q.edges],
    }


def cmd_quotient(a) -> CommandResult:
    q = galois.quotient(galois.load(a.path))
    prof = galois.splitting_profile(q)
    rows = [["vertex", "g", "s", "fold", "lifts"]]
    rows += [[v.id, str(v.genus), str(v.s), "yes" if v.fold else "", ",".join(v.lifts)]
             for v in q.vertices]
    erows = [["edge", "ends", "s"]] + [[e.id, f"{e.u}-{e.w}", str(e.s)] for e in q.edges]
    payload = _q_payload(q)
    payload["discontinuous"] = _ids(prof.discontinuous)
    return CommandResult("ok", payload, text=[*_table(rows), "", *_table(erows)])


def cmd_mintr(a) -> CommandResult:
    q = galois.quotient(galois.load(a.path))
    marks = None
    if a.mark:
        marks = {}
        for item in a.mark:
            label, sep, vid = item.partition("=")
            if not sep:
                raise _UsageError(f"--mark expects LABEL=VERTEX, got {item!r}", "")
            marks[label] = vid
        q = q.with_marks(marks)
    n = _ids(galois.nodes(q))
    b = _ids(galois.bending_points(q))
    v = _ids(galois.minimal_triangulation_marked(q))
    return CommandResult("ok", {"nodes": n, "bending_points": b, "minimal_triangulation": v},
                         text=[f"nodes: {', '.join(n)}", f"bending points: {', '.join(b) or '-'}",
                               f"minimal triangulation: {', '.join(v)}"])


def cmd_elliptic(a) -> CommandResult:
    if a.action == "type":
        m = elliptic.type_from_graph(_graph(a.arg))
        return CommandResult("ok", {"type": str(m.type), "witness": m.witness}, text=[str(m.type)])
    if a.action == "graph":
        t = elliptic.KodairaType.parse(a.arg, a.n)
        record = sncgraph.dumps(elliptic.graph_from_type(t))
        return CommandResult("ok", {"type": str(t), "graph": record}, text=[record.rstrip()])
    if a.action == "invariants":
        t = elliptic.KodairaType.parse(a.arg, a.n)
        if t.potentially_good:
            inv = elliptic.invariants_from_type(t)
            return CommandResult("ok", {"type": str(t), "m": inv.m, "alpha": _q(inv.alpha),
                                        "alpha_display": inv.alpha_display},
                                 text=[f"m = {inv.m}", f"alpha = {inv.alpha_display} mod Z"])
        r = elliptic.multiplicative_report(t)
        payload = {"type": str(t), "min_strong_size": r.min_strong_size, "min_size": r.min_size,
                   "annulus": r.annulus, "modulus": r.modulus,
                   "trivializing_degree": r.trivializing_degree}
        return CommandResult("ok", payload,
                             text=[f"minimal strong triangulation: {r.min_strong_size} vertices",
                                   f"minimal triangulation: {r.min_size} vertex",
                                   f"annulus: {r.annulus}"])
    if a.action == "alpha":
        try:
            mults = [int(x) for x in a.arg.split(",")]
        except ValueError:
            raise _UsageError(f"expected comma-separated integers, got {a.arg!r}", "") from None
        al = elliptic.alpha_from_chain(mults)
        return CommandResult("ok", {"alpha": _q(al), "alpha_display": elliptic.display_alpha(al)},
                             text=[f"{elliptic.display_alpha(al)} mod Z"])
    raise AssertionError(a.action)  # pragma: no cover


def cmd_dot(a) -> CommandResult:
    g = _graph(a.path)
    if a.highlight == "principal":
        hl = sncgraph.principal_vertices(g)
    elif a.highlight == "triangulation":
        hl = frozenset(triangulate.minimal_strong_triangulation_tame(g, a.p).vertices)
    else:
        hl = frozenset()
    dot = sncgraph.to_dot(g, hl)
    return CommandResult("ok", {"dot": dot}, text=[dot.rstrip()])


# --- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one JSON object")
    batch = _Parser(add_help=False)
    batch.add_argument("--batch", metavar="FILE_LIST",
                       help="run on every path listed in FILE_LIST (one per line)")

    p = _Parser(prog="skelred", description="Skeletons, snc graphs and Kodaira types.")
    p.add_argument("--json", action="store_true", help="emit one JSON object")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("cf", parents=[common], help="continued fraction of a rational, or its value")
    s.add_argument("value", help="a/b, or [a0;a1,...]")
    s.set_defaults(func=cmd_cf)

    s = sub.add_parser("annulus", parents=[common], help="fractional annuli")
    asub = s.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, helptext in (("regular", "regularity test"), ("resolve", "minimal regular subdivision")):
        t = asub.add_parser(name, parents=[common], help=helptext)
        t.add_argument("inner")
        t.add_argument("outer")
    t = asub.add_parser("blowups", parents=[common], help="blowups reaching an exponent")
    t.add_argument("target")
    t = asub.add_parser("witness", parents=[common], help="regular annulus with coprime end multiplicities")
    t.add_argument("m", type=int)
    t.add_argument("m2", type=int)
    t = asub.add_parser("fiber", parents=[common], help="tame formal fibre type")
    t.add_argument("mults", type=int, nargs="+")
    t.add_argument("--p", type=int, default=1)
    s.set_defaults(func=cmd_annulus)

    def file_cmd(name: str, func: Callable, helptext: str) -> argparse.ArgumentParser:
        s = sub.add_parser(name, parents=[common, batch], help=helptext)
        s.add_argument("path", nargs="?")
        s.set_defaults(func=func)
        return s

    file_cmd("validate", cmd_validate, "check the chain calculus of a graph")
    file_cmd("genus", cmd_genus, "genus of a semi-stable graph")
    file_cmd("triangulate", cmd_triangulate, "tame minimal strong triangulation").add_argument(
        "--p", type=int, default=1)
    file_cmd("saito", cmd_saito, "degree of the minimal semi-stabilizing extension").add_argument(
        "--p", type=int, default=1)
    s = file_cmd("basechange", cmd_basechange, "multiplicities after tame base change")
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--p", type=int, default=1)
    file_cmd("quotient", cmd_quotient, "quotient of a skeleton by a group action")
    file_cmd("mintr", cmd_mintr, "nodes, bending points and marked minimal triangulation").add_argument(
        "--mark", action="append", metavar="LABEL=VERTEX", help="place a mark on a quotient vertex")
    s = file_cmd("dot", cmd_dot, "Graphviz rendering")
    s.add_argument("--highlight", choices=("principal", "triangulation", "none"), default="principal")
    s.add_argument("--p", type=int, default=1)

    s = sub.add_parser("elliptic", parents=[common], help="Kodaira types")
    s.add_argument("action", choices=("type", "graph", "invariants", "alpha"))
    s.add_argument("arg", help="graph file, type label, or comma-separated multiplicities")
    s.add_argument("--n", type=int)
    s.set_defaults(func=cmd_elliptic)
    return p


def _run_one(args) -> CommandResult:
    try:
        res = args.func(args)
    except _UsageError as exc:
        res = CommandResult("invalid_input", diagnostics=[str(exc)])
    except SkelredError as exc:
        res = CommandResult(exc.status, diagnostics=[str(exc)])
    except OSError as exc:
        res = CommandResult("invalid_input", diagnostics=[f"{exc.filename}: {exc.strerror}"])
    res.command = args.command
    return res


def dispatch(argv: Sequence[str]) -> CommandResult:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except _UsageError as exc:
        return CommandResult("invalid_input", diagnostics=[exc.usage.rstrip(), f"error: {exc}"])
    if args.command not in FILE_COMMANDS:
        return _run_one(args)
    if (args.path is None) == (args.batch is None):
        return CommandResult("invalid_input", command=args.command,
                             diagnostics=["give exactly one of a path or --batch FILE_LIST"])
    if args.batch is None:
        return _run_one(args)
    try:
        with open(args.batch, encoding="utf-8") as fh:
            paths = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    except OSError as exc:
        return CommandResult("invalid_input", command=args.command,
                             diagnostics=[f"{args.batch}: {exc.strerror}"])

    def one(path: str) -> CommandResult:
        ns = argparse.Namespace(**{**vars(args), "path": path})
        return _run_one(ns)

    with ThreadPoolExecutor() as pool:
        results = list(pool.map(one, paths))
    status = next((r.status for r in results if r.status != "ok"), "ok")
    text = []
    for path, r in zip(paths, results):
        text.append(f"== {path} [{r.status}]")
        text += r.text + r.diagnostics
    payload = {"results": [{"path": p, "status": r.status, "payload": r.payload,
                            "diagnostics": r.diagnostics} for p, r in zip(paths, results)]}
    return CommandResult(status, payload, [], text, args.command)


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    res = dispatch(argv)
    if "--json" in argv:
        print(res.to_json())
    else:
        out = res.render(_color_enabled())
        if out:
            stream = sys.stdout if res.status == "ok" else sys.stderr
            print(out, file=stream)
    return res.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
