"""Command-line surface.  Every subcommand reads the plain-text diagram
format, prints human-readable lines by default and JSON with --json,
sends errors to stderr, and uses exit code 2 for usage problems and 1
for verification/validation failures.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import census as census_mod
from . import classify, conjugacy, decompose, matching
from .diagram import INF, DiagramError, canonical_form, parse_diagram
from .oracle import CosetLimitError, group_order, reduce_word


def _load(path):
    try:
        with open(path) as fh:
            return parse_diagram(fh.read())
    except OSError as exc:
        raise DiagramError(str(exc))


def _subset(diag, text):
    names = [t for t in text.replace(",", " ").split() if t]
    for g in names:
        diag.index(g)
    return frozenset(names)


def _emit(args, payload, human):
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2, default=_json_default))
    else:
        for line in human:
            print(line)


def _json_default(obj):
    if isinstance(obj, frozenset):
        return sorted(obj)
    if isinstance(obj, bytes):
        return obj.hex()
    if obj is INF:
        return "inf"
    raise TypeError(type(obj).__name__)


def _fmt_set(A):
    return "{" + ",".join(sorted(A)) + "}"


def cmd_validate(args):
    diag = _load(args.file)
    payload = {"ok": True, "rank": diag.rank, "gens": list(diag.gens)}
    _emit(args, payload, ["ok: rank %d, generators %s" % (diag.rank, " ".join(diag.gens))])
    return 0


def cmd_dot(args):
    diag = _load(args.file)
    sys.stdout.write(diag.emit_dot(args.view))
    return 0


def cmd_classify(args):
    diag = _load(args.file)
    A = _subset(diag, args.subset) if args.subset else diag.generators()
    comps = diag.c_components(A)
    parts = []
    for comp in comps:
        tag = classify.classify_irreducible(diag, comp)
        parts.append(
            {"component": sorted(comp), "type": str(tag) if tag else "infinite"}
        )
    spherical = all(p["type"] != "infinite" for p in parts)
    payload = {"spherical": spherical, "components": parts}
    human = [
        "%s: %s" % (_fmt_set(p["component"]), p["type"]) for p in parts
    ] + ["spherical: %s" % ("yes" if spherical else "no")]
    _emit(args, payload, human)
    return 0


def cmd_order(args):
    diag = _load(args.file)
    A = _subset(diag, args.subset) if args.subset else diag.generators()
    if args.enumerate:
        try:
            order = group_order(diag, A, cap=args.cap)
        except CosetLimitError:
            order = None
    else:
        order = classify.order_of(diag, A)
    payload = {"order": order if order is not None else "infinite"}
    _emit(args, payload, [str(payload["order"])])
    return 0


def cmd_reduce(args):
    diag = _load(args.file)
    word = tuple(args.word.replace(",", " ").split())
    red = reduce_word(diag, word)
    payload = {"word": list(word), "reduced": list(red), "length": len(red)}
    _emit(args, payload, [" ".join(red) if red else "(identity)"])
    return 0


def cmd_conj(args):
    diag = _load(args.file)
    A = _subset(diag, args.source)
    B = _subset(diag, args.target)
    path = conjugacy.are_conjugate_visual(diag, A, B)
    if path is None:
        _emit(args, {"conjugate": False}, ["not visually conjugate"])
        return 1
    word = path.word(diag)
    payload = {
        "conjugate": True,
        "word": list(word),
        "moves": [
            {"s": mv.s, "t": mv.t, "K": sorted(mv.K), "target": sorted(mv.target)}
            for mv in path.moves
        ],
    }
    human = ["conjugate via %s" % (" ".join(word) or "(identity)")] + [
        "  move: s=%s K=%s -> %s" % (mv.s, _fmt_set(mv.K), _fmt_set(mv.target))
        for mv in path.moves
    ]
    _emit(args, payload, human)
    return 0


def cmd_bases(args):
    diag = _load(args.file)
    bases = matching.find_bases(diag)
    payload = {
        "bases": [
            {"subset": sorted(b.subset), "type": str(b.tag), "order": b.tag.order}
            for b in bases
        ]
    }
    human = [
        "%s: %s (order %d)" % (_fmt_set(b.subset), b.tag, b.tag.order) for b in bases
    ] or ["no bases"]
    _emit(args, payload, human)
    return 0


def cmd_blowup(args):
    diag = _load(args.file)
    subset = _subset(diag, args.base)
    base = next((b for b in matching.find_bases(diag) if b.subset == subset), None)
    if base is None:
        print("error: %s is not a base" % _fmt_set(subset), file=sys.stderr)
        return 1
    plan = matching.can_blow_up(diag, base)
    if plan is None:
        print("error: base %s admits no blow-up" % _fmt_set(subset), file=sys.stderr)
        return 1
    lin = matching.blow_up(diag, plan)
    return _finish_lineage(args, lin)


def cmd_maxrank(args):
    diag = _load(args.file)
    lin = matching.max_rank(diag, prefer_last=args.prefer_last)
    return _finish_lineage(args, lin)


def _finish_lineage(args, lin):
    if getattr(args, "emit_lineage", None):
        with open(args.emit_lineage, "w") as fh:
            fh.write(matching.write_lineage(lin))
    steps = []
    for step in lin.steps:
        if isinstance(step, matching.BlowupStep):
            steps.append(
                "blowup base=%s end=%s d=%s z=%s"
                % (",".join(sorted(step.base)), step.a, step.d, step.z)
            )
        else:
            steps.append(
                "twist s0=%s s0bar=%s" % (",".join(sorted(step.s0)), ",".join(sorted(step.s0bar)))
            )
    payload = {
        "steps": steps,
        "child": lin.child.to_text(),
        "forward": {g: list(w) for g, w in lin.forward.items()},
    }
    human = ["step %d: %s" % (i, s) for i, s in enumerate(steps)]
    human += ["child diagram:"] + lin.child.to_text().rstrip().splitlines()
    _emit(args, payload, human)
    return 0


def cmd_verify(args):
    diag = _load(args.diagram)
    try:
        with open(args.lineage) as fh:
            lin = matching.parse_lineage(fh.read(), diag)
    except OSError as exc:
        raise DiagramError(str(exc))
    report = matching.verify_lineage(lin)
    payload = {
        "passed": report.passed,
        "checks": [
            {"name": c.name, "ok": c.ok, "detail": c.detail} for c in report.checks
        ],
    }
    human = [
        "%s %s%s" % ("PASS" if c.ok else "FAIL", c.name, (": " + c.detail) if c.detail else "")
        for c in report.checks
    ] + ["lineage %s" % ("OK" if report.passed else "BROKEN")]
    _emit(args, payload, human)
    return 0 if report.passed else 1


def cmd_twist(args):
    diag = _load(args.file)
    sep = decompose.Separation(
        _subset(diag, args.s1), _subset(diag, args.s0) if args.s0 else frozenset(),
        _subset(diag, args.s2),
    )
    if args.bullet is not None:
        bullet = _subset(diag, args.bullet) if args.bullet else frozenset()
        tw = decompose.elementary_twist(diag, sep, bullet)
    elif args.s0bar is not None and args.d is not None:
        tw = decompose.generalized_twist(
            diag, sep, _subset(diag, args.s0bar), tuple(args.d.split())
        )
    else:
        print("error: need --bullet or both --s0bar and --d", file=sys.stderr)
        return 2
    lin = decompose.apply_twist(diag, tw)
    return _finish_lineage(args, lin)


def cmd_decompose(args):
    diag = _load(args.file)
    classes = decompose.c_minimal_classes(diag)
    payload = {"classes": []}
    human = []
    for rep, members in classes:
        entry = {"representative": sorted(rep), "members": [sorted(m) for m in members]}
        human.append(
            "class %s: members %s"
            % (_fmt_set(rep), " ".join(_fmt_set(m) for m in members))
        )
        gog = decompose.build_lambda(diag, rep)
        entry["v_nodes"] = [sorted(v) for v in gog.v_nodes]
        entry["e_nodes"] = [sorted(e) for e in gog.e_nodes]
        payload["classes"].append(entry)
        human += ["  v-node %s" % _fmt_set(v) for v in gog.v_nodes]
        human += ["  e-node %s" % _fmt_set(e) for e in gog.e_nodes]
    if not classes:
        human = ["no separations (complete presentation graph)"]
    _emit(args, payload, human)
    return 0


def cmd_census(args):
    diag = _load(args.file)
    cen = census_mod.simplex_census(diag)
    if args.json:
        print(cen.to_json())
    else:
        for key, (count, size, text) in sorted(
            cen.entries.items(), key=lambda kv: (kv[1][1], kv[0])
        ):
            print("%s\t%d\t%d\t%s" % (key.hex(), size, count, text.replace("\n", "; ").strip("; ")))
    return 0


def cmd_report(args):
    diag = _load(args.file)
    from .report import write_report

    written = write_report(diag, args.out)
    _emit(args, {"files": written}, written)
    return 0


def build_parser():
    top = argparse.ArgumentParser(prog="coxforge", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        p = sub.add_parser(name, **kw)
        p.set_defaults(fn=fn)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    p = add("validate", cmd_validate, help="parse and sanity-check a diagram file")
    p.add_argument("file")
    p = add("dot", cmd_dot, help="emit Graphviz source for a diagram view")
    p.add_argument("file")
    p.add_argument("--view", choices=("c", "p"), default="c")
    p = add("classify", cmd_classify, help="type of each irreducible component")
    p.add_argument("file")
    p.add_argument("--subset")
    p = add("order", cmd_order, help="order of a visual subgroup")
    p.add_argument("file")
    p.add_argument("--subset")
    p.add_argument("--enumerate", action="store_true", help="use coset enumeration")
    p.add_argument("--cap", type=int, default=10**6)
    p = add("reduce", cmd_reduce, help="reduce a word")
    p.add_argument("file")
    p.add_argument("--word", required=True)
    p = add("conj", cmd_conj, help="visual conjugacy of two generator subsets")
    p.add_argument("file")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p = add("bases", cmd_bases, help="list the bases")
    p.add_argument("file")
    p = add("blowup", cmd_blowup, help="blow up one base")
    p.add_argument("file")
    p.add_argument("--base", required=True)
    p.add_argument("--emit-lineage")
    p = add("maxrank", cmd_maxrank, help="blow up to maximum rank")
    p.add_argument("file")
    p.add_argument("--emit-lineage")
    p.add_argument("--prefer-last", action="store_true", help="alternate base order")
    p = add("verify", cmd_verify, help="verify a lineage file against its diagram")
    p.add_argument("lineage")
    p.add_argument("--diagram", required=True)
    p = add("twist", cmd_twist, help="apply a diagram twist")
    p.add_argument("file")
    p.add_argument("--s1", required=True)
    p.add_argument("--s0", default="")
    p.add_argument("--s2", required=True)
    p.add_argument("--bullet")
    p.add_argument("--s0bar")
    p.add_argument("--d")
    p.add_argument("--emit-lineage")
    p = add("decompose", cmd_decompose, help="c-minimal classes and graph of groups")
    p.add_argument("file")
    p = add("census", cmd_census, help="simplex census")
    p.add_argument("file")
    p = add("report", cmd_report, help="census report with figures")
    p.add_argument("file")
    p.add_argument("--out", required=True)
    return top


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (DiagramError, matching.MatchingError, decompose.TwistError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except CosetLimitError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
