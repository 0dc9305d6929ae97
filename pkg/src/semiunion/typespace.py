"""Type tuples and their symmetry group.

A type records, for each ordered pair of distinct generators ``(x, y)``, the
generator whose cyclic subsemigroup contains ``xy``.  Tuples are displayed in
the fixed pair order ``ab, ba, ac, ca, bc, cb`` (just ``ab, ba`` for two
generators), as strings such as ``"aaaabb"``.

The symmetry group is the direct product of the symmetric group on the
generators (relabelling) with reversal of multiplication; it has order 12 for
three generators and 4 for two.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product
from typing import Iterable, Sequence

LETTERS = "abc"


def pair_order(copies: int) -> tuple[tuple[str, str], ...]:
    if copies == 2:
        return (("a", "b"), ("b", "a"))
    if copies == 3:
        return (("a", "b"), ("b", "a"), ("a", "c"), ("c", "a"), ("b", "c"), ("c", "b"))
    raise ValueError(f"copies must be 2 or 3, got {copies}")


def copies_of(t: Sequence[str]) -> int:
    return {2: 2, 6: 3}[len(t)]


def parse_type(text: str) -> tuple[str, ...]:
    """``"aaaabb"`` or ``"(a,a,a,a,b,b)"`` -> ``("a", "a", "a", "a", "b", "b")``."""
    letters = tuple(ch for ch in text if not ch.isspace() and ch not in "(),")
    if len(letters) not in (2, 6):
        raise ValueError(f"a type has 2 or 6 entries, got {text!r}")
    alphabet = LETTERS[: copies_of(letters)]
    bad = [x for x in letters if x not in alphabet]
    if bad:
        raise ValueError(f"type entries must be in {{{','.join(alphabet)}}}, got {text!r}")
    return letters


def render_type(t: Sequence[str]) -> str:
    return "".join(t)


@dataclass(frozen=True)
class Symmetry:
    """A generator relabelling ``perm`` (image of a, b[, c]) combined with optional reversal."""

    perm: tuple[str, ...]
    reverse: bool = False

    @property
    def copies(self) -> int:
        return len(self.perm)

    def letter(self, x: str) -> str:
        return self.perm[LETTERS.index(x)]

    def inverse_letter(self, x: str) -> str:
        return LETTERS[self.perm.index(x)]

    def __mul__(self, other: "Symmetry") -> "Symmetry":
        """Function composition: ``(g * h)`` acts as h first, then g."""
        return Symmetry(tuple(self.letter(other.letter(x)) for x in LETTERS[: self.copies]),
                        self.reverse != other.reverse)

    def inverse(self) -> "Symmetry":
        return Symmetry(tuple(self.inverse_letter(x) for x in LETTERS[: self.copies]), self.reverse)

    def __str__(self) -> str:
        cycles = _cycles(self.perm)
        text = "".join(f"({c})" for c in cycles) or "id"
        return f"rev*{text}" if self.reverse else text

    def source_pair(self, x: str, y: str) -> tuple[str, str]:
        """The pair whose product is carried onto the product ``xy`` by this symmetry."""
        u, v = self.inverse_letter(x), self.inverse_letter(y)
        return (v, u) if self.reverse else (u, v)


def _cycles(perm: Sequence[str]) -> list[str]:
    letters = LETTERS[: len(perm)]
    seen, out = set(), []
    for x in letters:
        if x in seen or perm[letters.index(x)] == x:
            continue
        cyc = []
        while x not in seen:
            seen.add(x)
            cyc.append(x)
            x = perm[letters.index(x)]
        out.append("".join(cyc))
    return out


def parse_symmetry(text: str, copies: int = 3) -> Symmetry:
    """Cycle notation, optionally prefixed by ``rev``: ``"(cba)"`` maps c->b, b->a, a->c."""
    text = text.replace(" ", "")
    reverse = text.startswith("rev")
    if reverse:
        text = text[3:].lstrip("*")
    letters = LETTERS[:copies]
    image = {x: x for x in letters}
    if text not in ("", "id"):
        for cyc in text.strip("()").split(")("):
            for x, y in zip(cyc, cyc[1:] + cyc[:1]):
                image[x] = y
    return Symmetry(tuple(image[x] for x in letters), reverse)


@lru_cache(maxsize=None)
def group(copies: int = 3) -> tuple[Symmetry, ...]:
    """All symmetries, relabellings in lexicographic order, plain before reversed."""
    perms = list(permutations(LETTERS[:copies]))
    return tuple(Symmetry(p, r) for r in (False, True) for p in perms)


def identity(copies: int = 3) -> Symmetry:
    return Symmetry(tuple(LETTERS[:copies]))


def apply_symmetry(g: Symmetry, t: Sequence[str]) -> tuple[str, ...]:
    """Relabel by ``g.perm`` (result(x, y) = σ(T(σ⁻¹x, σ⁻¹y))) and, if set, reverse (T ↦ T∘swap)."""
    pairs = pair_order(g.copies)
    lookup = dict(zip(pairs, t))
    return tuple(g.letter(lookup[g.source_pair(x, y)]) for x, y in pairs)


def apply_to_exponents(g: Symmetry, exps: Sequence[int]) -> tuple[int, ...]:
    """Carry a per-pair exponent assignment along with :func:`apply_symmetry`."""
    pairs = pair_order(g.copies)
    lookup = dict(zip(pairs, exps))
    return tuple(lookup[g.source_pair(x, y)] for x, y in pairs)


def all_types(copies: int = 3) -> list[tuple[str, ...]]:
    n = len(pair_order(copies))
    return list(product(LETTERS[:copies], repeat=n))


def orbit_of(t: Sequence[str]) -> frozenset[tuple[str, ...]]:
    return frozenset(apply_symmetry(g, t) for g in group(copies_of(t)))


def canonical_rep(t: Sequence[str]) -> tuple[str, ...]:
    return min(orbit_of(t))


@dataclass(frozen=True)
class Orbit:
    rep: tuple[str, ...]
    members: tuple[tuple[str, ...], ...]

    @property
    def size(self) -> int:
        return len(self.members)


@lru_cache(maxsize=None)
def orbits(copies: int = 3) -> tuple[Orbit, ...]:
    """Partition of all types into orbits, ordered by canonical representative."""
    out = []
    done: set[tuple[str, ...]] = set()
    for t in all_types(copies):  # lexicographic, so the first unseen member is the least
        if t in done:
            continue
        members = orbit_of(t)
        done |= members
        out.append(Orbit(t, tuple(sorted(members))))
    return tuple(out)


def burnside_count(copies: int = 3) -> tuple[int, dict[str, int]]:
    """Orbit count via the average number of fixed points, with each element's count."""
    types = all_types(copies)
    fixed = {str(g): sum(apply_symmetry(g, t) == t for t in types) for g in group(copies)}
    total = sum(fixed.values())
    if total % len(fixed):
        raise AssertionError("fixed-point total not divisible by the group order")
    return total // len(fixed), fixed


def closed_pairs(t: Sequence[str]) -> set[frozenset[str]]:
    """Generator pairs {x, y} whose two cross products both land in <x> ∪ <y>."""
    lookup = dict(zip(pair_order(copies_of(t)), t))
    out = set()
    for (x, y), z in lookup.items():
        if x < y and z in (x, y) and lookup[(y, x)] in (x, y):
            out.add(frozenset((x, y)))
    return out


def landing(t: Sequence[str]) -> dict[tuple[str, str], str]:
    """Type as a lookup ``(x, y) -> landing letter``, including ``(x, x) -> x``."""
    copies = copies_of(t)
    out = dict(zip(pair_order(copies), t))
    for x in LETTERS[:copies]:
        out[(x, x)] = x
    return out


def symmetries_between(src: Sequence[str], dst: Sequence[str]) -> Iterable[Symmetry]:
    src, dst = tuple(src), tuple(dst)
    return (g for g in group(copies_of(src)) if apply_symmetry(g, src) == dst)
