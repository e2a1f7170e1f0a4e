"""Command-line front end.

Exit codes: 0 everything verified, 1 a mathematical violation was found,
2 bad input or a pipeline error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .angled import pi_text
from .errors import SclError
from .forge import EnumerationBudget, commutator_torus, enumerate_surfaces
from .letterqm import LetterQM, verify_axioms
from .pipeline import certify, format_report, to_dot
from .surface import format_surface, load_surface, validate
from .words import free_reduce


def _map(source):
    if source == "sign":
        return LetterQM.sign()
    try:
        return LetterQM.load_table(source)
    except OSError as e:
        raise SclError("PARSE_ERROR", e.strerror or str(e), locus=source)


def _surface(path):
    try:
        return load_surface(path)
    except OSError as e:
        raise SclError("PARSE_ERROR", e.strerror or str(e), locus=path)


def _frac(x):
    return None if x is None else str(x)


def cmd_verify_qm(args, out):
    phi = _map(args.map)
    rep = verify_axioms(phi, args.radius)
    if args.format == "json":
        out.write(json.dumps({
            "radius": rep.radius, "elements": rep.elements, "pairs": rep.pairs,
            "degenerate": rep.degenerate,
            "degenerate_with_trivial_leg": rep.degenerate_with_trivial_leg,
            "nondegenerate": rep.nondegenerate,
            "violations": [str(v) for v in rep.violations]}, indent=2) + "\n")
    else:
        out.write("radius %d: %d elements, %d pairs (%d degenerate, %d non-degenerate)\n"
                  % (rep.radius, rep.elements, rep.pairs, rep.degenerate, rep.nondegenerate))
        for v in rep.violations:
            out.write("violation: %s\n" % v)
        out.write("%s\n" % ("PASS" if rep.passed else "FAIL: %d violations" % len(rep.violations)))
    return 0 if rep.passed else 1


def cmd_validate(args, out):
    s = _surface(args.surface)
    rep = validate(s, g=args.word)
    if args.format == "json":
        out.write(json.dumps({
            "verdicts": rep.verdicts, "messages": rep.messages, "chi": rep.chi,
            "chi_minus": rep.chi_minus, "n": rep.n, "degrees": rep.degrees,
            "incompressible": rep.incompressible}, indent=2) + "\n")
    else:
        for k, v in rep.verdicts.items():
            out.write("%-20s %s\n" % (k, "PASS" if v else "FAIL"))
        for m in rep.messages:
            out.write("  %s\n" % m)
        out.write("χ = %d, χ⁻ = %d, n = %d, degrees %s\n"
                  % (rep.chi, rep.chi_minus, rep.n, rep.degrees))
        out.write("incompressible: %s\n" % rep.incompressible)
    if not rep.passed:
        bad = [k for k, v in rep.verdicts.items() if not v]
        raise SclError("MALFORMED_GLUING", "; ".join(rep.messages), locus=",".join(bad))
    return 0


def _sandwich(word, rep):
    if rep.scl_lower_bound is not None and rep.ratio == rep.scl_lower_bound:
        return "scl(%s) = %s" % (word, rep.ratio)
    return None


def cmd_certify(args, out):
    s = _surface(args.surface)
    word = args.word or s.target
    cert = certify(s, _map(args.map), g=args.word, strict=False)
    rep = cert.report
    if args.emit_dot:
        with open(args.emit_dot, "w") as fh:
            fh.write(to_dot(cert.regions))
    sandwich = _sandwich(word, rep)
    if args.format == "json":
        out.write(json.dumps({
            "n": rep.n, "chi": rep.chi, "total": pi_text(rep.total),
            "index_sequences": [list(x) for x in rep.index_sequences],
            "verdicts": rep.verdicts,
            "failures": [list(map(str, f)) for f in rep.failures],
            "scl_lower_bound": _frac(rep.scl_lower_bound),
            "ratio": _frac(rep.ratio), "sandwich": sandwich}, indent=2) + "\n")
    else:
        out.write(format_report(rep, cert.stable))
        if sandwich:
            out.write(sandwich + "\n")
    return 0 if rep.passed else 1


def _null_homologous(word):
    return all(word.count(x) == word.count(x.upper()) for x in "ab")


def cmd_survey(args, out):
    phi = _map(args.map)
    word = free_reduce(args.word)
    if not word or not _null_homologous(word):
        out.write("no admissible surfaces (scl = ∞)\n")
        return 0
    budget = EnumerationBudget(max_handles=args.max_handles,
                               max_vertex_discs=args.max_vertex_discs)
    count = failed = 0
    best = bound = None
    for s in enumerate_surfaces(word, budget):
        count += 1
        rep = certify(s, phi, strict=False).report
        if not rep.passed:
            failed += 1
            out.write("instance %d: FAIL %s\n" % (count, "; ".join(
                "%s at %s" % (name, locus) for name, locus, _ in rep.failures)))
            continue
        if best is None or rep.ratio < best:
            best = rep.ratio
        if rep.scl_lower_bound is not None:
            bound = rep.scl_lower_bound if bound is None else max(bound, rep.scl_lower_bound)
    if count == 0:
        out.write("no instances within budget\n")
        return 0
    out.write("%d instances\n" % count)
    if best is not None:
        out.write("minimum -χ⁻/2n = %s\n" % best)
    if bound is not None:
        out.write("scl(%s) ≥ %s\n" % (word, bound))
        if best == bound:
            out.write("scl(%s) = %s\n" % (word, best))
    if failed:
        out.write("%d audits FAIL\n" % failed)
        return 1
    out.write("all audits PASS\n")
    return 0


def cmd_example(args, out):
    out.write(format_surface(commutator_torus()))
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="sclgap")
    p.add_argument("--format", choices=("text", "json"), default="text")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("verify-qm", help="check the letter-quasimorphism axioms on a ball")
    q.add_argument("--map", default="sign", help="'sign' or a table file")
    q.add_argument("--radius", type=int, default=3)
    q.set_defaults(fn=cmd_verify_qm)

    v = sub.add_parser("validate", help="check an admissible surface file")
    v.add_argument("--surface", required=True)
    v.add_argument("--word")
    v.set_defaults(fn=cmd_validate)

    c = sub.add_parser("certify", help="run the curvature pipeline on a surface")
    c.add_argument("--surface", required=True)
    c.add_argument("--word")
    c.add_argument("--map", default="sign")
    c.add_argument("--emit-dot", metavar="PATH")
    c.set_defaults(fn=cmd_certify)

    s = sub.add_parser("survey", help="certify every enumerated surface for a word")
    s.add_argument("--word", required=True)
    s.add_argument("--map", default="sign")
    s.add_argument("--max-handles", type=int, default=8)
    s.add_argument("--max-vertex-discs", type=int, default=8)
    s.set_defaults(fn=cmd_survey)

    e = sub.add_parser("example", help="print a built-in surface")
    e.add_argument("name", choices=("commutator-torus",))
    e.set_defaults(fn=cmd_example)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args, out)
    except SclError as e:
        sys.stderr.write("error: %s\n" % e)
        return 2
    except ValueError as e:
        sys.stderr.write("error: %s\n" % e)
        return 2


if __name__ == "__main__":
    sys.exit(main())
