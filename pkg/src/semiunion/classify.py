"""The elimination engine: exponent-free landing analysis, bounded exponent
elimination through probe derivations, and the classification drivers.

Phase 1 works on a bare type.  Every product of generators is some power of
a generator, with unknown exponent; an abstract word keeps only the letters
and whether each run is known to be a single letter or merely non-empty.
Evaluating a probe word under two association orders and getting disjoint
sets of possible landing letters refutes the type outright.

Phase 2 fixes exponents ``1..B`` for the six products and looks for a
concrete collision with :func:`rewrite.probe_eliminate`.  It proves nothing
beyond the bound, and the report says so.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

from . import certs, typespace
from .rewrite import Contradiction, default_probes, probe_eliminate
from .typespace import LETTERS, Symmetry, apply_symmetry, apply_to_exponents, landing, pair_order
from .words import FAMILIES, Presentation, Relation, instantiate_family

log = logging.getLogger(__name__)

ONE, MANY = False, True

# An abstract word: runs of (letter, at-least-one flag); adjacent letters differ.
AbstractWord = tuple[tuple[str, bool], ...]


def abstract(word: Iterable[tuple[str, bool]]) -> AbstractWord:
    """Merge adjacent runs of the same letter; a merged run is always MANY."""
    out: list[tuple[str, bool]] = []
    for x, flag in word:
        if out and out[-1][0] == x:
            out[-1] = (x, MANY)
        else:
            out.append((x, flag))
    return tuple(out)


@dataclass(frozen=True)
class LandingOutcome:
    outcomes: frozenset[str]
    overflow: bool = False


# --------------------------------------------------------------------------
# strategies

@dataclass(frozen=True)
class Strategy:
    """A bracketing of the probe plus the order in which leftover runs are contracted.

    ``tree`` is a nested tuple of probe positions, e.g. ``((0, 1), 2)``.
    ``inner`` is ``"left"`` or ``"right"``: which adjacent pair is contracted
    first once two evaluated factors are juxtaposed.
    """

    tree: object
    inner: str = "left"

    def __str__(self) -> str:
        return f"{_show_tree(self.tree)}/{self.inner}"


def _show_tree(tree, probe: str | None = None) -> str:
    if isinstance(tree, int):
        return probe[tree] if probe else str(tree)
    return "(" + "".join(_show_tree(t, probe) for t in tree) + ")"


def bracketings(lo: int, hi: int) -> list:
    if hi - lo == 1:
        return [lo]
    out = []
    for mid in range(lo + 1, hi):
        for left in bracketings(lo, mid):
            for right in bracketings(mid, hi):
                out.append((left, right))
    return out


@lru_cache(maxsize=None)
def strategies(n: int) -> tuple[Strategy, ...]:
    return tuple(Strategy(t, inner) for t in bracketings(0, n) for inner in ("left", "right"))


def left_first(n: int) -> Strategy:
    tree = 0
    for i in range(1, n):
        tree = (tree, i)
    return Strategy(tree, "left")


def right_first(n: int) -> Strategy:
    tree = n - 1
    for i in range(n - 2, -1, -1):
        tree = (i, tree)
    return Strategy(tree, "right")


# --------------------------------------------------------------------------
# landing analysis

def _contract(word: AbstractWord, i: int, lookup) -> list[AbstractWord]:
    (x, fx), (y, fy) = word[i], word[i + 1]
    z = lookup[(x, y)]
    lefts = [(), ((x, MANY),)] if fx else [()]
    rights = [(), ((y, MANY),)] if fy else [()]
    return [abstract(word[:i] + l + ((z, MANY),) + r + word[i + 2:]) for l in lefts for r in rights]


def _reduce(word: AbstractWord, lookup, inner: str, cap: int) -> tuple[set[str], bool]:
    """All single letters reachable by repeatedly contracting the leftmost (or rightmost) pair."""
    outcomes: set[str] = set()
    overflow = False
    seen = {word}
    stack = [word]
    while stack:
        w = stack.pop()
        if len(w) == 1:
            outcomes.add(w[0][0])
            continue
        i = 0 if inner == "left" else len(w) - 2
        for nxt in _contract(w, i, lookup):
            if len(nxt) > cap:
                overflow = True
            elif nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return outcomes, overflow


def _evaluate(tree, probe: str, lookup, inner: str, cap: int) -> tuple[set[tuple[str, bool]], bool]:
    if isinstance(tree, int):
        return {(probe[tree], ONE)}, False
    left, lo = _evaluate(tree[0], probe, lookup, inner, cap)
    right, ro = _evaluate(tree[1], probe, lookup, inner, cap)
    overflow = lo or ro
    out: set[tuple[str, bool]] = set()
    for u in left:
        for v in right:
            letters, o = _reduce(abstract((u, v)), lookup, inner, cap)
            overflow |= o
            out.update((z, MANY) for z in letters)
    return out, overflow


def landing_outcomes(t: Sequence[str], probe: str, strategy: Strategy, word_cap: int = 10) -> LandingOutcome:
    """Which generators' subsemigroups the probe can land in, evaluated along ``strategy``."""
    lookup = landing(t)
    results, overflow = _evaluate(strategy.tree, probe, lookup, strategy.inner, word_cap)
    return LandingOutcome(frozenset(z for z, _ in results), overflow)


@dataclass(frozen=True)
class LandingConflict:
    probe: str
    first: Strategy
    first_outcomes: frozenset[str]
    second: Strategy
    second_outcomes: frozenset[str]

    def __str__(self) -> str:
        a = _show_tree(self.first.tree, self.probe)
        b = _show_tree(self.second.tree, self.probe)
        return (f"{a} lands in {{{','.join(sorted(self.first_outcomes))}}} but "
                f"{b} lands in {{{','.join(sorted(self.second_outcomes))}}}")

    def as_dict(self) -> dict:
        return {
            "probe": self.probe,
            "strategies": [str(self.first), str(self.second)],
            "outcomes": [sorted(self.first_outcomes), sorted(self.second_outcomes)],
            "text": str(self),
        }


def phase1_eliminate(t: Sequence[str], word_cap: int = 10, lengths: Iterable[int] = (3, 4)) -> LandingConflict | None:
    """First probe (shortlex) with two overflow-free strategies landing in disjoint sets."""
    alphabet = LETTERS[: typespace.copies_of(t)]
    for probe in default_probes(alphabet, lengths):
        found = []
        for s in strategies(len(probe)):
            res = landing_outcomes(t, probe, s, word_cap)
            if res.overflow:
                continue
            for prev, prev_out in found:
                if not (prev_out & res.outcomes):
                    return LandingConflict(probe, prev, prev_out, s, res.outcomes)
            found.append((s, res.outcomes))
    return None


# --------------------------------------------------------------------------
# phase 2

@dataclass(frozen=True)
class Limits:
    depth: int = 24
    maxlen: int | None = None  # None: derived from the exponent bound
    maxnodes: int = 100_000
    word_cap: int = 10

    def probe_maxlen(self, bound: int) -> int:
        return self.maxlen if self.maxlen is not None else default_maxlen(bound)


def default_maxlen(bound: int) -> int:
    # long enough for a·b^n -> ... -> a^(n(m-1)+1), the longest collision the two-letter case needs
    return max(12, bound * (bound - 1) + 2)


def type_presentation(t: Sequence[str], exps: Sequence[int]) -> Presentation:
    """``<a,b[,c] | xy = T(x,y)^e(x,y)>`` for a type and per-pair exponents."""
    copies = typespace.copies_of(t)
    rels = tuple(Relation(x + y, z * e) for (x, y), z, e in zip(pair_order(copies), t, exps))
    return Presentation(tuple(LETTERS[:copies]), rels)


def _phase2_chunk(args) -> list[tuple[tuple[int, ...], dict | None]]:
    t, assignments, limits, maxlen = args
    out = []
    probes = default_probes(LETTERS[: typespace.copies_of(t)])
    for exps in assignments:
        hit = probe_eliminate(type_presentation(t, exps), probes, limits.depth, maxlen, limits.maxnodes)
        out.append((exps, None if hit is None else hit.as_dict()))
    return out


@dataclass
class Phase2Result:
    survivors: list[tuple[int, ...]]
    eliminated: int
    examples: dict[tuple[int, ...], dict] = field(default_factory=dict)


def phase2_eliminate(
    t: Sequence[str],
    bound: int,
    limits: Limits = Limits(),
    pool: ProcessPoolExecutor | None = None,
) -> Phase2Result:
    """Exponent assignments in ``1..bound`` for which no probe collision was found."""
    if bound < 1:
        raise ValueError("exponent bound must be positive")
    t = tuple(t)
    assignments = list(product(range(1, bound + 1), repeat=len(t)))
    maxlen = limits.probe_maxlen(bound)
    chunks = [(t, assignments[i:i + 32], limits, maxlen) for i in range(0, len(assignments), 32)]
    results = pool.map(_phase2_chunk, chunks) if pool else map(_phase2_chunk, chunks)
    survivors, examples, eliminated = [], {}, 0
    for chunk in results:
        for exps, hit in chunk:
            if hit is None:
                survivors.append(exps)
            else:
                eliminated += 1
                if len(examples) < 3:
                    examples[exps] = hit
    return Phase2Result(survivors, eliminated, examples)


def probe_check(t: Sequence[str], exps: Sequence[int], limits: Limits = Limits(), bound: int = 3) -> Contradiction | None:
    return probe_eliminate(type_presentation(t, exps), None, limits.depth, limits.probe_maxlen(bound), limits.maxnodes)


# --------------------------------------------------------------------------
# family matching

@dataclass(frozen=True)
class FamilyMatch:
    family: str
    params: dict
    symmetry: Symmetry

    def as_dict(self) -> dict:
        return {"family": self.family, "params": self.params, "symmetry": str(self.symmetry)}


def match_family(t: Sequence[str], exps: Sequence[int]) -> FamilyMatch | None:
    """Align ``(t, exps)`` with a family's type by some symmetry and test the family constraint."""
    copies = typespace.copies_of(t)
    for fam in FAMILIES.values():
        if fam.copies != copies:
            continue
        for g in typespace.group(copies):
            if apply_symmetry(g, t) != fam.type:
                continue
            params = fam.params_from_exponents(apply_to_exponents(g, exps))
            if params is not None:
                return FamilyMatch(fam.id, params, g)
    return None


def family_for_type(t: Sequence[str]) -> tuple[str, Symmetry] | None:
    copies = typespace.copies_of(t)
    for fam in FAMILIES.values():
        if fam.copies == copies:
            for g in typespace.group(copies):
                if apply_symmetry(g, t) == fam.type:
                    return fam.id, g
    return None


def expected_survivors(t: Sequence[str], bound: int) -> set[tuple[int, ...]]:
    """Assignments of ``t`` predicted by the family constraints (the acceptance oracle)."""
    return {e for e in product(range(1, bound + 1), repeat=len(t)) if match_family(t, e) is not None}


# --------------------------------------------------------------------------
# drivers

@dataclass
class OrbitResult:
    rep: tuple[str, ...]
    size: int
    status: str  # survivor | inconclusive | eliminated-phase1 | eliminated-phase2
    family: str | None = None
    family_type: tuple[str, ...] | None = None
    conflict: LandingConflict | None = None
    survivors: list[dict] = field(default_factory=list)
    eliminated_assignments: int = 0
    errors: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        out = {
            "type": "".join(self.rep),
            "orbit_size": self.size,
            "status": self.status,
        }
        if self.family:
            out["family"] = self.family
            out["family_type"] = "".join(self.family_type)
        if self.conflict is not None:
            out["phase1"] = self.conflict.as_dict()
        if self.status != "eliminated-phase1":
            out["phase2"] = {"eliminated": self.eliminated_assignments, "survivors": self.survivors}
        if self.errors:
            out["errors"] = self.errors
        return out


@dataclass
class ClassificationReport:
    copies: int
    bound: int
    limits: Limits
    orbits: list[OrbitResult]

    @property
    def survivors(self) -> list[OrbitResult]:
        return [o for o in self.orbits if o.status == "survivor"]

    @property
    def retained(self) -> list[OrbitResult]:
        return [o for o in self.orbits if o.status in ("survivor", "inconclusive")]

    @property
    def errors(self) -> list[str]:
        return [f"{''.join(o.rep)}: {e}" for o in self.orbits for e in o.errors]

    def as_dict(self) -> dict:
        return {
            "copies": self.copies,
            "bounds": {
                "exp_bound": self.bound,
                "depth": self.limits.depth,
                "max_len": self.limits.probe_maxlen(self.bound),
                "max_nodes": self.limits.maxnodes,
                "word_cap": self.limits.word_cap,
            },
            "orbit_count": len(self.orbits),
            "retained": ["".join(o.rep) for o in self.retained],
            "orbits": [o.as_dict() for o in self.orbits],
            "errors": self.errors,
        }


def _certify(match: FamilyMatch) -> tuple[dict | None, str | None]:
    try:
        bundle = certs.verify_instance(instantiate_family(match.family, match.params))
    except certs.CertificationError as exc:
        return None, str(exc)
    return bundle.as_dict(), None


def classify_orbit(rep: Sequence[str], size: int, bound: int, limits: Limits = Limits(),
                   pool: ProcessPoolExecutor | None = None) -> OrbitResult:
    rep = tuple(rep)
    res = OrbitResult(rep, size, "eliminated-phase1")
    fam = family_for_type(rep)
    if fam is not None:
        res.family = fam[0]
        res.family_type = FAMILIES[fam[0]].type
    res.conflict = phase1_eliminate(rep, limits.word_cap)
    if res.conflict is not None:
        if fam is not None:
            res.errors.append(f"family type of {fam[0]} refuted in phase 1: {res.conflict}")
        return res

    p2 = phase2_eliminate(rep, bound, limits, pool)
    res.eliminated_assignments = p2.eliminated
    for exps in p2.survivors:
        entry: dict = {"exponents": list(exps)}
        match = match_family(rep, exps)
        if match is None:
            res.errors.append(f"unmatched survivor {list(exps)}")
        else:
            entry.update(match.as_dict())
            bundle, err = _certify(match)
            if err:
                res.errors.append(f"certification failed for {list(exps)}: {err}")
            entry["certified"] = bundle is not None
        res.survivors.append(entry)
    if p2.survivors:
        res.status = "survivor"
    elif fam is not None:
        # a family type whose constraint has no solution inside the bound
        res.status = "inconclusive"
    else:
        res.status = "eliminated-phase2"
    log.info("orbit %s: %s (%d survivors)", "".join(rep), res.status, len(p2.survivors))
    return res


def classify(copies: int, bound: int = 3, limits: Limits = Limits(), workers: int = 1) -> ClassificationReport:
    if copies not in (2, 3):
        raise ValueError("copies must be 2 or 3")
    if bound < 1:
        raise ValueError("exponent bound must be positive")
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        results = [classify_orbit(o.rep, o.size, bound, limits, pool) for o in typespace.orbits(copies)]
    finally:
        if pool:
            pool.shutdown()
    return ClassificationReport(copies, bound, limits, results)


def default_workers() -> int:
    return max(1, min(4, os.cpu_count() or 1))
