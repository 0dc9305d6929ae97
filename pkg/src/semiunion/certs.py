"""Positive certificates: the generators of a presented semigroup generate
pairwise disjoint, infinite cyclic subsemigroups.

Infinite order comes from weight witnesses: an additive weighting of the
letters under which both sides of every relation weigh the same.  Weights are
non-negative integers or the absorbing sink ``SINK`` (``SINK + n = SINK``);
any letter of positive finite weight then has infinite order.

Disjointness comes from one of
  * irreducibility: no relation side is a power of x, so x^n is alone in its class;
  * a finite quotient: an associative table satisfying the relations, in
    which the powers of distinct generators have disjoint images;
  * a suffix (or prefix) invariant: a set of two-letter suffixes that every
    elementary rewrite preserves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from itertools import product
from typing import Iterable, Mapping, Sequence

from .words import Presentation, pure_power

SINK = None  # the absorbing weight, printed as ⊥

Weight = int | None


class CertificationError(RuntimeError):
    pass


class TableFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str = ""
    detail: dict = field(default_factory=dict, compare=False)

    def __bool__(self) -> bool:
        return self.ok

    def as_dict(self) -> dict:
        out: dict = {"ok": self.ok}
        if self.reason:
            out["reason"] = self.reason
        if self.detail:
            out["detail"] = self.detail
        return out


# --------------------------------------------------------------------------
# weight witnesses

def show_weight(w: Weight) -> str:
    return "⊥" if w is SINK else str(w)


@dataclass(frozen=True)
class WeightWitness:
    weights: tuple[tuple[str, Weight], ...]
    targets: frozenset[str] = frozenset()

    @classmethod
    def of(cls, weights: Mapping[str, Weight], targets: Iterable[str] = ()) -> "WeightWitness":
        return cls(tuple(weights.items()), frozenset(targets))

    def __getitem__(self, x: str) -> Weight:
        return dict(self.weights)[x]

    def weight(self, w: str) -> Weight:
        table = dict(self.weights)
        total = 0
        for x in w:
            v = table[x]
            if v is SINK:
                return SINK
            total += v
        return total

    def with_weight(self, x: str, value: Weight) -> "WeightWitness":
        return WeightWitness(tuple((y, value if y == x else v) for y, v in self.weights), self.targets)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{x}:{show_weight(v)}" for x, v in self.weights) + "}"

    def as_dict(self) -> dict:
        return {
            "weights": {x: ("sink" if v is SINK else v) for x, v in self.weights},
            "targets": sorted(self.targets),
        }


def validate_weight_witness(P: Presentation, W: WeightWitness) -> Verdict:
    """Check every relation is weight-balanced; ``detail["certified"]`` lists positive-weight letters."""
    table = dict(W.weights)
    missing = [x for x in P.alphabet if x not in table]
    if missing:
        return Verdict(False, "unweighted letter", {"letters": missing})
    for x, v in W.weights:
        if v is not SINK and (not isinstance(v, int) or v < 0):
            return Verdict(False, "invalid weight", {"letter": x, "weight": v})
    for idx, rel in enumerate(P.relations):
        lhs, rhs = W.weight(rel.lhs), W.weight(rel.rhs)
        if lhs != rhs:
            return Verdict(False, "unbalanced relation", {
                "relation": idx, "text": str(rel), "lhs": show_weight(lhs), "rhs": show_weight(rhs)})
    certified = sorted(x for x in P.alphabet if table[x] is not SINK and table[x] > 0)
    uncovered = sorted(W.targets - set(certified))
    if uncovered:
        return Verdict(False, "target without positive weight", {"targets": uncovered, "certified": certified})
    return Verdict(True, detail={"certified": certified})


def _weight_key(v: Weight) -> int:
    return 1 << 30 if v is SINK else v


def search_weight_witness(P: Presentation, target: str, maxweight: int = 10) -> WeightWitness | None:
    """Least valid witness giving ``target`` positive weight, ordering weights 0 < 1 < ... < maxweight < ⊥."""
    if target not in P.alphabet:
        raise ValueError(f"{target!r} is not a letter of the presentation")
    choices = list(range(maxweight + 1)) + [SINK]
    options = [[v for v in choices if v is not SINK and v >= 1] if x == target else choices for x in P.alphabet]
    # product over sorted options enumerates assignments in lexicographic order
    for values in product(*[sorted(o, key=_weight_key) for o in options]):
        W = WeightWitness(tuple(zip(P.alphabet, values)), frozenset([target]))
        if validate_weight_witness(P, W):
            return W
    return None


# --------------------------------------------------------------------------
# Cayley tables

@dataclass(frozen=True)
class CayleyTable:
    elements: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]
    gens: tuple[tuple[str, int], ...]

    @property
    def n(self) -> int:
        return len(self.elements)

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    def evaluate(self, word: str) -> int:
        gens = dict(self.gens)
        acc = gens[word[0]]
        for x in word[1:]:
            acc = self.table[acc][gens[x]]
        return acc

    def evaluate_right(self, word: str) -> int:
        gens = dict(self.gens)
        acc = gens[word[-1]]
        for x in reversed(word[:-1]):
            acc = self.table[gens[x]][acc]
        return acc

    def powers(self, x: int) -> frozenset[int]:
        seen, acc = set(), x
        for _ in range(self.n):
            seen.add(acc)
            acc = self.table[acc][x]
        return frozenset(seen)

    def with_entry(self, i: int, j: int, value: int) -> "CayleyTable":
        rows = [list(r) for r in self.table]
        rows[i][j] = value
        return CayleyTable(self.elements, tuple(map(tuple, rows)), self.gens)

    def render(self) -> str:
        lines = ["elements " + " ".join(self.elements),
                 "map " + " ".join(f"{x}={self.elements[e]}" for x, e in self.gens)]
        lines += [" ".join(self.elements[e] for e in row) for row in self.table]
        return "\n".join(lines) + "\n"


def parse_table(text: str) -> CayleyTable:
    lines = [ln.split("#", 1)[0].split() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if len(lines) < 2 or lines[0][0] != "elements" or lines[1][0] != "map":
        raise TableFormatError("expected 'elements ...' then 'map ...' lines")
    elements = tuple(lines[0][1:])
    if not elements or len(set(elements)) != len(elements):
        raise TableFormatError("element names must be non-empty and distinct")
    index = {e: i for i, e in enumerate(elements)}
    gens = []
    for item in lines[1][1:]:
        x, sep, e = item.partition("=")
        if not sep or e not in index:
            raise TableFormatError(f"bad generator map entry {item!r}")
        gens.append((x, index[e]))
    rows = lines[2:]
    if len(rows) != len(elements) or any(len(r) != len(elements) for r in rows):
        raise TableFormatError(f"table must be {len(elements)}x{len(elements)}")
    try:
        table = tuple(tuple(index[e] for e in r) for r in rows)
    except KeyError as exc:
        raise TableFormatError(f"unknown element {exc.args[0]!r} in table") from None
    return CayleyTable(elements, table, tuple(gens))


def builtin_table(family: str) -> CayleyTable:
    """Built-in quotient table fixture for ``3-ii`` … ``3-vi`` and ``3-ix``."""
    try:
        text = resources.files(__package__).joinpath("tables", f"{family}.txt").read_text()
    except FileNotFoundError:
        raise KeyError(f"no built-in table for family {family}") from None
    return parse_table(text)


TABLE_FAMILIES = ("3-ii", "3-iii", "3-iv", "3-v", "3-vi", "3-ix")


def validate_cayley_table(T: CayleyTable) -> Verdict:
    n = T.n
    for row in T.table:
        if len(row) != n or any(not 0 <= e < n for e in row):
            raise TableFormatError("table entry out of range")
    for _, e in T.gens:
        if not 0 <= e < n:
            raise TableFormatError("generator image out of range")
    t = T.table
    for x, y, z in product(range(n), repeat=3):
        if t[t[x][y]][z] != t[x][t[y][z]]:
            names = [T.elements[i] for i in (x, y, z)]
            return Verdict(False, "not associative", {"triple": names})
    return Verdict(True)


def check_quotient_separation(P: Presentation, T: CayleyTable) -> Verdict:
    """The table is a homomorphic image of ``P`` that separates the generators' powers."""
    v = validate_cayley_table(T)
    if not v:
        return v
    gens = dict(T.gens)
    missing = [x for x in P.alphabet if x not in gens]
    if missing:
        return Verdict(False, "generator map not total", {"letters": missing})
    for idx, rel in enumerate(P.relations):
        left, right = T.evaluate(rel.lhs), T.evaluate(rel.rhs)
        if left != right:
            return Verdict(False, "relation fails in table", {
                "relation": idx, "text": str(rel),
                "lhs": T.elements[left], "rhs": T.elements[right]})
    images = {x: T.powers(gens[x]) for x in P.alphabet}
    for i, x in enumerate(P.alphabet):
        for y in P.alphabet[i + 1:]:
            common = images[x] & images[y]
            if common:
                return Verdict(False, "power images overlap", {
                    "letters": [x, y], "common": sorted(T.elements[e] for e in common)})
    return Verdict(True, detail={"separated": _all_pairs(P.alphabet)})


def _all_pairs(alphabet: Sequence[str]) -> list[list[str]]:
    return [[x, y] for i, x in enumerate(alphabet) for y in alphabet[i + 1:]]


# --------------------------------------------------------------------------
# suffix / prefix invariants and irreducibility

def check_suffix_invariant(P: Presentation, suffixes: Iterable[str]) -> Verdict:
    """Every elementary rewrite preserves "the last two letters lie in ``suffixes``".

    Checks each side replacement ``u -> v`` followed by at most one context
    letter; a longer right context leaves the final two letters untouched.
    """
    sigma = frozenset(suffixes)
    if any(len(s) != 2 for s in sigma):
        raise ValueError("suffixes must have length 2")
    short = [side for side in P.sides() if len(side) < 2]
    if short:
        raise ValueError(f"suffix invariants need relation sides of length >= 2, got {short[0]!r}")
    for idx, (lhs, rhs) in enumerate(P.relations):
        for u, v, forward in ((lhs, rhs, True), (rhs, lhs, False)):
            for q in ("",) + P.alphabet:
                if (u + q)[-2:] in sigma and (v + q)[-2:] not in sigma:
                    return Verdict(False, "suffix not preserved", {
                        "relation": idx, "forward": forward, "context": q,
                        "from": (u + q)[-2:], "to": (v + q)[-2:]})
    return Verdict(True, detail={"separated": suffix_separated_pairs(P.alphabet, sigma)})


def suffix_separated_pairs(alphabet: Sequence[str], sigma: Iterable[str]) -> list[list[str]]:
    sigma = set(sigma)
    return [[x, y] for x, y in _all_pairs(alphabet) if ((x + x) in sigma) != ((y + y) in sigma)]


def check_prefix_invariant(P: Presentation, prefixes: Iterable[str]) -> Verdict:
    """Mirror image of :func:`check_suffix_invariant` (first two letters)."""
    return check_suffix_invariant(P.reversed(), [p[::-1] for p in prefixes])


def check_irreducible_generator(P: Presentation, x: str) -> Verdict:
    if x not in P.alphabet:
        raise ValueError(f"{x!r} is not a letter of the presentation")
    for idx, rel in enumerate(P.relations):
        for side in rel:
            pp = pure_power(side)
            if pp and pp[0] == x:
                return Verdict(False, "relation side is a power of the generator",
                               {"relation": idx, "side": side})
    return Verdict(True, detail={"separated": [sorted([x, y]) for y in P.alphabet if y != x]})


# --------------------------------------------------------------------------
# bundles

# φ(b), φ(c) with φ(a) = 1, as functions of the family parameters
FAMILY_WEIGHTS = {
    "2-i": lambda p: {"a": 1, "b": p["k"] - 1},
    "2-ii": lambda p: {"a": 1, "b": 1},
    "3-i": lambda p: {"a": 1, "b": p["i"] - 1, "c": p["j"] - 1},
    "3-ii": lambda p: {"a": 1, "b": p["i"] - 1, "c": p["j"] - 1},
    "3-iii": lambda p: {"a": 1, "b": p["i"] - 1, "c": p["i"] - 1},
    "3-iv": lambda p: {"a": 1, "b": p["i"] - 1, "c": 1},
    "3-v": lambda p: {"a": 1, "b": p["i"] - 1, "c": 1},
    "3-vi": lambda p: {"a": 1, "b": 1, "c": 1},
    "3-vii": lambda p: {"a": 1, "b": 1, "c": 1},
    "3-viii": lambda p: {"a": 1, "b": 1, "c": 1},
    "3-ix": lambda p: {"a": 1, "b": 1, "c": p["i"] - 1},
}

SUFFIX_SETS = {
    "3-vii": [("aa", "cb", "ba"), ("ab", "ca", "bb")],
    "3-viii": [("ac", "bc", "cc"), ("ab", "bb")],
}

PREFIX_SETS = {
    "2-ii": [("aa", "ab")],
}

IRREDUCIBLE = {
    "2-i": ("b",),
    "3-i": ("b", "c"),
}


@dataclass
class Evidence:
    kind: str  # irreducible | table | suffix | prefix
    subject: object
    verdict: Verdict

    def separated(self) -> set[frozenset[str]]:
        return {frozenset(p) for p in self.verdict.detail.get("separated", [])}

    def as_dict(self) -> dict:
        subject = self.subject
        if isinstance(subject, CayleyTable):
            subject = subject.render().splitlines()
        elif isinstance(subject, (tuple, frozenset, set)):
            subject = sorted(subject)
        return {"kind": self.kind, "subject": subject, **self.verdict.as_dict()}


@dataclass
class CertificateBundle:
    family: str
    params: dict
    presentation: Presentation
    witnesses: dict[str, WeightWitness]  # generator -> witness giving it positive weight
    evidence: list[Evidence]

    def separated(self) -> set[frozenset[str]]:
        out: set[frozenset[str]] = set()
        for ev in self.evidence:
            out |= ev.separated()
        return out

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "params": self.params,
            "presentation": self.presentation.render(),
            "infinite": {x: W.as_dict() for x, W in self.witnesses.items()},
            "disjoint": [ev.as_dict() for ev in self.evidence],
        }


def witness_for(P: Presentation, x: str, seed: Mapping[str, Weight] | None, maxweight: int) -> WeightWitness | None:
    if seed is not None:
        W = WeightWitness.of(seed, [x])
        if validate_weight_witness(P, W):
            return W
    return search_weight_witness(P, x, maxweight)


def verify_instance(
    P: Presentation,
    maxweight: int = 10,
    tables: Mapping[str, CayleyTable] | None = None,
) -> CertificateBundle:
    """Assemble infinite-order and disjointness evidence for a family instance.

    ``tables`` overrides the built-in quotient fixtures.  Raises
    CertificationError naming the generator or pair left uncovered.
    """
    if P.family is None:
        raise ValueError("verify_instance needs a presentation instantiated from a family")
    fam, params = P.family.family, P.family.as_dict()

    seed = FAMILY_WEIGHTS[fam](params)
    witnesses: dict[str, WeightWitness] = {}
    for x in P.alphabet:
        W = witness_for(P, x, seed, maxweight)
        if W is None:
            raise CertificationError(f"{fam}: no weight witness for {x} with weights <= {maxweight}")
        witnesses[x] = W

    evidence: list[Evidence] = []
    for x in IRREDUCIBLE.get(fam, ()):
        evidence.append(Evidence("irreducible", x, check_irreducible_generator(P, x)))
    if fam in TABLE_FAMILIES:
        T = (tables or {}).get(fam) or builtin_table(fam)
        evidence.append(Evidence("table", T, check_quotient_separation(P, T)))
    for sigma in SUFFIX_SETS.get(fam, ()):
        evidence.append(Evidence("suffix", tuple(sigma), check_suffix_invariant(P, sigma)))
    for sigma in PREFIX_SETS.get(fam, ()):
        evidence.append(Evidence("prefix", tuple(sigma), check_prefix_invariant(P, sigma)))

    for ev in evidence:
        if not ev.verdict:
            raise CertificationError(f"{fam}: {ev.kind} certificate rejected: {ev.verdict.reason} {ev.verdict.detail}")
    bundle = CertificateBundle(fam, params, P, witnesses, evidence)
    needed = {frozenset(p) for p in _all_pairs(P.alphabet)}
    uncovered = needed - bundle.separated()
    if uncovered:
        pairs = ", ".join("".join(sorted(p)) for p in sorted(uncovered, key=sorted))
        raise CertificationError(f"{fam}: no disjointness evidence for pair(s) {pairs}")
    return bundle
