"""Command line front end.

Exit status: 0 success / verified, 1 mathematical negative (certificate
rejected, contradiction found, derivation not found), 2 usage or resource error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import certs, classify as cls, typespace
from .rewrite import ResourceLimitError, congruence_ball, is_consequence, probe_eliminate
from .words import (
    FAMILIES,
    FamilyError,
    ParseError,
    Presentation,
    instantiate_family,
    parse_params,
    parse_presentation,
    render_word,
)

SCHEMA_VERSION = 1

DEFAULTS = {"exp_bound": 3, "length": 8, "depth": 24, "word_cap": 10, "max_nodes": 100_000}


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semiunion",
        description="Classify and certify semigroups that are disjoint unions of 2 or 3 free monogenic semigroups.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, source=False, bounds=()):
        p.add_argument("--json", action="store_true", help="emit the versioned JSON report")
        if source:
            p.add_argument("--presentation", type=Path, help="presentation file ('-' for stdin)")
            p.add_argument("--family", choices=list(FAMILIES), help="built-in presentation family")
            p.add_argument("--params", default="", help="family parameters, e.g. i=2,j=2,k=2")
        if "exp" in bounds:
            p.add_argument("--exp-bound", type=_positive, default=DEFAULTS["exp_bound"])
        if "probe" in bounds:
            p.add_argument("--depth", type=_positive, default=DEFAULTS["depth"], help="probe BFS depth")
            p.add_argument("--max-len", type=_positive, default=None,
                           help="longest word a probe search may visit (default: derived from --exp-bound)")
            p.add_argument("--max-nodes", type=_positive, default=DEFAULTS["max_nodes"])
        if "cap" in bounds:
            p.add_argument("--word-cap", type=_positive, default=DEFAULTS["word_cap"],
                           help="abstract word length cap for landing analysis")
        return p

    p = common(sub.add_parser("classify", help="run the full classification"), bounds=("exp", "probe", "cap"))
    p.add_argument("--copies", type=int, choices=(2, 3), required=True)
    p.add_argument("--threads", type=_positive, default=1, help="phase-2 worker processes")

    p = common(sub.add_parser("orbits", help="type orbits under relabelling and reversal"))
    p.add_argument("--copies", type=int, choices=(2, 3), default=3)

    p = common(sub.add_parser("verify", help="certify a family instance"))
    p.add_argument("--family", choices=list(FAMILIES), required=True)
    p.add_argument("--params", default="")
    p.add_argument("--table", type=Path, help="quotient table file replacing the built-in fixture")
    p.add_argument("--max-weight", type=_positive, default=10)

    p = common(sub.add_parser("normalize", help="canonical representative of a type"))
    p.add_argument("--type", required=True)

    p = common(sub.add_parser("consequence", help="search for a derivation u => v"), source=True)
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", dest="target", required=True)
    p.add_argument("--length", type=_positive, default=16, help="longest intermediate word")
    p.add_argument("--max-nodes", type=_positive, default=200_000)

    p = common(sub.add_parser("ball", help="congruence closure on all words up to a length"), source=True)
    p.add_argument("--length", type=_positive, default=DEFAULTS["length"])
    p.add_argument("--max-words", type=_positive, default=2_000_000)

    p = common(sub.add_parser("eliminate", help="phase-1/phase-2 elimination of a type, or probe search on a presentation"),
               source=True, bounds=("exp", "probe", "cap"))
    p.add_argument("--type", help="type tuple, e.g. aaaabb")
    return parser


# --------------------------------------------------------------------------

def _load_presentation(args) -> Presentation:
    if args.presentation is not None and args.family is not None:
        raise UsageError("give either --presentation or --family, not both")
    if args.presentation is not None:
        text = sys.stdin.read() if str(args.presentation) == "-" else args.presentation.read_text()
        return parse_presentation(text)
    if args.family is not None:
        return instantiate_family(args.family, parse_params(args.params))
    raise UsageError("a presentation is required (--presentation or --family)")


def _word(text: str, P: Presentation) -> str:
    return parse_presentation(f"letters {' '.join(P.alphabet)}; {text}={text}").relations[0].lhs


def _limits(args) -> cls.Limits:
    return cls.Limits(depth=args.depth, maxlen=args.max_len, maxnodes=args.max_nodes, word_cap=args.word_cap)


def cmd_classify(args):
    limits = _limits(args)
    report = cls.classify(args.copies, args.exp_bound, limits, workers=args.threads)
    result = report.as_dict()
    lines = [f"{len(report.orbits)} orbits, exponent bound {args.exp_bound}, "
             f"probe depth {limits.depth}, max length {limits.probe_maxlen(args.exp_bound)}"]
    for o in report.orbits:
        if o.status == "eliminated-phase1":
            continue
        head = f"{''.join(o.rep):8} {o.status:18}"
        if o.family:
            head += f" family {o.family} (type {''.join(o.family_type)})"
        lines.append(head)
        for s in o.survivors:
            params = ",".join(f"{k}={v}" for k, v in s.get("params", {}).items())
            lines.append(f"    exponents {s['exponents']} -> {s.get('family', '?')} {params}"
                         f"{'' if s.get('certified') else '  UNCERTIFIED'}")
    eliminated = sum(o.status.startswith("eliminated") for o in report.orbits)
    lines.append(f"retained {len(report.retained)} orbits, eliminated {eliminated}")
    lines += [f"ERROR {e}" for e in report.errors]
    return (1 if report.errors else 0), result, "\n".join(lines)


def cmd_orbits(args):
    orbits = typespace.orbits(args.copies)
    count, fixed = typespace.burnside_count(args.copies)
    if count != len(orbits):
        raise AssertionError(f"orbit enumeration gave {len(orbits)} but Burnside gave {count}")
    rows = []
    for o in orbits:
        fam = cls.family_for_type(o.rep)
        rows.append({
            "rep": "".join(o.rep),
            "size": o.size,
            "closed_pairs": sorted("".join(sorted(p)) for p in typespace.closed_pairs(o.rep)),
            "family": fam[0] if fam else None,
        })
    result = {
        "types": len(typespace.all_types(args.copies)),
        "group_order": len(typespace.group(args.copies)),
        "orbits": len(orbits),
        "burnside": {"orbits": count, "fixed_points": fixed},
        "list": rows,
    }
    lines = [f"{result['types']} types, group of order {result['group_order']}: "
             f"{len(orbits)} orbits (Burnside: {count})"]
    for r in rows:
        lines.append(f"  {r['rep']}  size {r['size']:2}  closed {','.join(r['closed_pairs']) or '-'}"
                     f"{'  family ' + r['family'] if r['family'] else ''}")
    return 0, result, "\n".join(lines)


def cmd_verify(args):
    P = instantiate_family(args.family, parse_params(args.params))
    tables = None
    if args.table is not None:
        tables = {args.family: certs.parse_table(args.table.read_text())}
    try:
        bundle = certs.verify_instance(P, args.max_weight, tables)
    except certs.CertificationError as exc:
        return 1, {"verified": False, "presentation": P.render(), "error": str(exc)}, f"NOT VERIFIED: {exc}"
    result = {"verified": True, **bundle.as_dict()}
    lines = [f"{P.family}: {P}", "infinite:"]
    lines += [f"  {x}: weights {W}" for x, W in bundle.witnesses.items()]
    lines.append("disjoint:")
    for ev in bundle.evidence:
        pairs = ", ".join("".join(sorted(p)) for p in sorted(ev.separated(), key=sorted))
        subject = ev.subject if not isinstance(ev.subject, certs.CayleyTable) else "built-in table"
        lines.append(f"  {ev.kind} {subject}: separates {pairs}")
    lines.append("VERIFIED")
    return 0, result, "\n".join(lines)


def cmd_normalize(args):
    t = typespace.parse_type(args.type)
    rep = typespace.canonical_rep(t)
    g = next(typespace.symmetries_between(t, rep))
    fam = cls.family_for_type(t)
    result = {
        "type": "".join(t),
        "canonical": "".join(rep),
        "symmetry": str(g),
        "orbit_size": len(typespace.orbit_of(t)),
        "closed_pairs": sorted("".join(sorted(p)) for p in typespace.closed_pairs(t)),
        "family": fam[0] if fam else None,
    }
    text = f"{result['type']} -> {result['canonical']} via {result['symmetry']}"
    if fam:
        text += f" (family {fam[0]})"
    return 0, result, text


def cmd_consequence(args):
    P = _load_presentation(args)
    u, v = _word(args.source, P), _word(args.target, P)
    path = is_consequence(u, v, P, args.length, args.max_nodes)
    result = {
        "presentation": P.render(),
        "from": u,
        "to": v,
        "verdict": "derivable" if path is not None else "unknown-within-bounds",
        "path": [s.as_dict() for s in path] if path is not None else None,
    }
    if path is None:
        return 1, result, f"{render_word(u)} = {render_word(v)}: unknown within bounds"
    lines = [f"{render_word(u)} = {render_word(v)}: derivable in {len(path)} step(s)"]
    lines += [f"  {s}" for s in path]
    return 0, result, "\n".join(lines)


def cmd_ball(args):
    P = _load_presentation(args)
    ball, merges = congruence_ball(P, args.length, args.max_words)
    result = {
        "presentation": P.render(),
        "length": args.length,
        "words": sum(len(c) for c in ball.classes),
        "classes": [c for c in ball.classes],
        "class_count": len(ball),
        "merges": [c.as_dict() for c in merges.collisions],
    }
    lines = [f"{P}: {len(ball)} classes over {result['words']} words of length <= {args.length}"]
    for c in ball.classes:
        shown = ", ".join(render_word(w) for w in c[:8])
        lines.append(f"  {{{shown}{', ...' if len(c) > 8 else ''}}}  ({len(c)})")
    lines.append("merges: " + (", ".join(map(str, merges.collisions)) or "none"))
    return (1 if merges else 0), result, "\n".join(lines)


def cmd_eliminate(args):
    limits = _limits(args)
    if args.type is not None:
        if args.presentation is not None or args.family is not None:
            raise UsageError("--type cannot be combined with a presentation")
        t = typespace.parse_type(args.type)
        conflict = cls.phase1_eliminate(t, limits.word_cap)
        result = {"type": "".join(t), "exp_bound": args.exp_bound,
                  "max_len": limits.probe_maxlen(args.exp_bound),
                  "phase1": conflict.as_dict() if conflict else None}
        if conflict is not None:
            return 1, result, f"{''.join(t)}: eliminated in phase 1: {conflict}"
        p2 = cls.phase2_eliminate(t, args.exp_bound, limits)
        result["phase2"] = {
            "eliminated": p2.eliminated,
            "survivors": [list(e) for e in p2.survivors],
            "matches": [m.as_dict() if (m := cls.match_family(t, e)) else None for e in p2.survivors],
        }
        text = (f"{''.join(t)}: phase 1 inconclusive; phase 2 eliminated {p2.eliminated}, "
                f"{len(p2.survivors)} survivor(s) up to exponent {args.exp_bound}")
        for e in p2.survivors:
            text += f"\n  {list(e)}"
        return (0 if p2.survivors else 1), result, text
    P = _load_presentation(args)
    maxlen = limits.probe_maxlen(args.exp_bound)
    hit = probe_eliminate(P, None, limits.depth, maxlen, limits.maxnodes)
    result = {"presentation": P.render(), "max_len": maxlen,
              "contradiction": hit.as_dict() if hit else None}
    if hit is None:
        return 0, result, f"{P}: no contradiction within bounds"
    lines = [f"{P}: contradiction {hit}"] + [f"  {s}" for s in hit.collision.path]
    return 1, result, "\n".join(lines)


COMMANDS = {
    "classify": cmd_classify,
    "orbits": cmd_orbits,
    "verify": cmd_verify,
    "normalize": cmd_normalize,
    "consequence": cmd_consequence,
    "ball": cmd_ball,
    "eliminate": cmd_eliminate,
}


def _invocation(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in ("json", "verbose"):
            continue
        out[k] = str(v) if isinstance(v, Path) else v
    if "max_len" in out and out["max_len"] is None and "exp_bound" in out:
        out["max_len"] = cls.default_maxlen(out["exp_bound"])
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        status, result, text = COMMANDS[args.command](args)
    except (UsageError, ParseError, FamilyError, ValueError, OSError,
            ResourceLimitError, certs.TableFormatError) as exc:
        print(f"semiunion {args.command}: error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        report = {"version": SCHEMA_VERSION, "invocation": _invocation(args), "result": result}
        print(json.dumps(report, indent=2, ensure_ascii=False))
    else:
        print(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
