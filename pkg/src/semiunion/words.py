"""Letters, words, relations, presentations and the named presentation families.

Words are plain ``str`` values: every character is one letter, and the empty
string is never a word.  Exponent notation (``a^3``) exists only at the text
boundary; internally a word is always the flat letter sequence.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import groupby, product
from typing import Callable, Iterable, Mapping, NamedTuple


class ParseError(ValueError):
    """Malformed presentation text; ``pos`` is a 0-based offset into the source."""

    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        if pos is not None:
            message = f"{message} (at position {pos})"
        super().__init__(message)


class PresentationError(ValueError):
    pass


class FamilyError(ValueError):
    pass


class ConstraintError(FamilyError):
    """Parameters are well-formed but violate the family's arithmetic side condition."""


# --------------------------------------------------------------------------
# words

def power_form(w: str) -> list[tuple[str, int]]:
    """Run-length view of a word: ``"aabccc"`` -> ``[("a", 2), ("b", 1), ("c", 3)]``."""
    return [(x, len(list(run))) for x, run in groupby(w)]


def from_power_form(runs: Iterable[tuple[str, int]]) -> str:
    w = "".join(x * n for x, n in runs)
    if not w:
        raise ValueError("a word must be non-empty")
    return w


def pure_power(w: str) -> tuple[str, int] | None:
    """``(x, n)`` if ``w`` is ``x^n``, else None."""
    if w and w.count(w[0]) == len(w):
        return w[0], len(w)
    return None


def render_word(w: str) -> str:
    return "".join(x if n == 1 else f"{x}^{n}" for x, n in power_form(w))


class Relation(NamedTuple):
    lhs: str
    rhs: str

    def __str__(self) -> str:
        return f"{render_word(self.lhs)}={render_word(self.rhs)}"

    def normalized(self) -> tuple[str, str]:
        return (self.lhs, self.rhs) if self.lhs <= self.rhs else (self.rhs, self.lhs)

    def reversed(self) -> "Relation":
        return Relation(self.lhs[::-1], self.rhs[::-1])


@dataclass(frozen=True)
class FamilyTag:
    family: str
    params: tuple[tuple[str, int], ...]

    def as_dict(self) -> dict[str, int]:
        return dict(self.params)

    def __str__(self) -> str:
        if not self.params:
            return self.family
        return f"{self.family}[{','.join(f'{k}={v}' for k, v in self.params)}]"


@dataclass(frozen=True)
class Presentation:
    alphabet: tuple[str, ...]
    relations: tuple[Relation, ...]
    family: FamilyTag | None = field(default=None, compare=False)

    def __post_init__(self):
        letters = set(self.alphabet)
        if len(letters) != len(self.alphabet):
            raise PresentationError(f"repeated letter in alphabet {self.alphabet}")
        for x in self.alphabet:
            if len(x) != 1 or x.isspace() or x in "=;^":
                raise PresentationError(f"invalid letter {x!r}")
        seen = set()
        for rel in self.relations:
            for side in rel:
                if not side:
                    raise PresentationError(f"empty side in relation {rel}")
                bad = set(side) - letters
                if bad:
                    raise PresentationError(f"undeclared letter(s) {''.join(sorted(bad))} in {rel}")
            key = rel.normalized()
            if key in seen:
                raise PresentationError(f"duplicate relation {rel}")
            seen.add(key)

    def sides(self) -> list[str]:
        return [side for rel in self.relations for side in rel]

    def reversed(self) -> "Presentation":
        """The presentation of the anti-isomorphic semigroup (every side read backwards)."""
        return Presentation(self.alphabet, tuple(r.reversed() for r in self.relations), self.family)

    def render(self) -> str:
        parts = ["letters " + " ".join(self.alphabet)]
        parts.extend(str(r) for r in self.relations)
        return "; ".join(parts)

    def __str__(self) -> str:
        rels = ", ".join(str(r) for r in self.relations)
        return f"<{','.join(self.alphabet)} | {rels}>"


def presentation(alphabet: Iterable[str], relations: Iterable[tuple[str, str]]) -> Presentation:
    return Presentation(tuple(alphabet), tuple(Relation(u, v) for u, v in relations))


# --------------------------------------------------------------------------
# text format

_TOKEN = re.compile(r"\s*(?:(?P<letter>[^\s=;^\d])|\^(?P<exp>\d+)|(?P<eq>=)|(?P<bad>\S))")


def _parse_word(src: str, start: int, end: int, letters: set[str]) -> str:
    out: list[str] = []
    pos = start
    while pos < end:
        if src[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(src, pos, end)
        if m.group("letter"):
            x = m.group("letter")
            if x not in letters:
                raise ParseError(f"undeclared letter {x!r}", m.start("letter"))
            out.append(x)
        elif m.group("exp") is not None:
            if not out:
                raise ParseError("exponent without a letter", m.start())
            n = int(m.group("exp"))
            if n < 1:
                raise ParseError("exponent must be a positive integer", m.start("exp"))
            out.append(out.pop() * n)
        else:
            raise ParseError(f"unexpected character {src[m.start(m.lastgroup)]!r}", m.start(m.lastgroup))
        pos = m.end()
    return "".join(out)


def parse_presentation(text: str) -> Presentation:
    """Parse ``letters a b; ab=a^2; ba=b^2`` (statements split on ``;`` or newlines).

    ``#`` starts a comment running to the end of the line.
    """
    # blank out comments but keep offsets stable for error positions
    src = re.sub(r"#[^\n]*", lambda m: " " * len(m.group()), text)
    spans = []
    start = 0
    for m in re.finditer(r"[;\n]", src + "\n"):
        if src[start:m.start()].strip():
            spans.append((start, m.start()))
        start = m.end()
    if not spans:
        raise ParseError("empty presentation", 0)

    head_start, head_end = spans[0]
    head = src[head_start:head_end]
    m = re.match(r"\s*letters\b", head)
    if not m:
        raise ParseError("presentation must start with 'letters'", head_start + len(head) - len(head.lstrip()))
    alphabet: list[str] = []
    for tok in re.finditer(r"\S+", head[m.end():]):
        pos = head_start + m.end() + tok.start()
        x = tok.group()
        if len(x) != 1 or x in "=;^" or x.isdigit():
            raise ParseError(f"letters must be single characters, got {x!r}", pos)
        if x in alphabet:
            raise ParseError(f"letter {x!r} declared twice", pos)
        alphabet.append(x)
    if not alphabet:
        raise ParseError("no letters declared", head_end)

    letters = set(alphabet)
    relations = []
    for s, e in spans[1:]:
        eqs = [i for i in range(s, e) if src[i] == "="]
        if len(eqs) != 1:
            raise ParseError("relation needs exactly one '='", eqs[1] if len(eqs) > 1 else s)
        mid = eqs[0]
        lhs = _parse_word(src, s, mid, letters)
        rhs = _parse_word(src, mid + 1, e, letters)
        if not lhs or not rhs:
            raise ParseError("empty relation side", s if not lhs else mid + 1)
        relations.append(Relation(lhs, rhs))
    try:
        return Presentation(tuple(alphabet), tuple(relations))
    except PresentationError as exc:
        raise ParseError(str(exc), spans[-1][0]) from exc


# --------------------------------------------------------------------------
# families

# Exponent slot in a relation template: a parameter name or a fixed integer.
Exponent = str | int


@dataclass(frozen=True)
class Family:
    id: str
    copies: int
    params: tuple[str, ...]
    # (lhs, landing letter, exponent) in the fixed pair order ab, ba[, ac, ca, bc, cb]
    templates: tuple[tuple[str, str, Exponent], ...]
    constraint: Callable[..., bool]
    constraint_text: str

    @property
    def alphabet(self) -> tuple[str, ...]:
        return ("a", "b", "c")[: self.copies]

    @property
    def type(self) -> tuple[str, ...]:
        """Landing letters of the products, in display order."""
        return tuple(z for _, z, _ in self.templates)

    def check(self, params: Mapping[str, int]) -> dict[str, int]:
        missing = [p for p in self.params if p not in params]
        if missing:
            raise FamilyError(f"family {self.id} needs parameter(s) {', '.join(missing)}")
        extra = sorted(set(params) - set(self.params))
        if extra:
            raise FamilyError(f"family {self.id} takes no parameter(s) {', '.join(extra)}")
        values = {p: params[p] for p in self.params}
        for p, v in values.items():
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise FamilyError(f"parameter {p}={v!r} must be a positive integer")
        if not self.constraint(**values):
            shown = ", ".join(f"{k}={v}" for k, v in values.items())
            raise ConstraintError(f"family {self.id}: {shown} violates {self.constraint_text}")
        return values

    def exponents(self, params: Mapping[str, int]) -> tuple[int, ...]:
        return tuple(e if isinstance(e, int) else params[e] for _, _, e in self.templates)

    def params_from_exponents(self, exps: Iterable[int]) -> dict[str, int] | None:
        """Inverse of :meth:`exponents`: the parameters producing ``exps``, if any satisfy the constraint."""
        values: dict[str, int] = {}
        for (_, _, slot), e in zip(self.templates, exps):
            if isinstance(slot, int):
                if slot != e:
                    return None
            elif values.setdefault(slot, e) != e:
                return None
        if not self.constraint(**values):
            return None
        return values


def _fam(id, params, template, constraint, text):
    pairs = ["ab", "ba", "ac", "ca", "bc", "cb"]
    templates = []
    for lhs, item in zip(pairs, template.split()):
        z, _, e = item.partition("^")
        templates.append((lhs, z, int(e) if e.isdigit() else e))
    copies = 2 if len(templates) == 2 else 3
    return Family(id, copies, tuple(params), tuple(templates), constraint, text)


FAMILIES: dict[str, Family] = {
    f.id: f
    for f in [
        _fam("2-i", "k", "a^k a^k", lambda k: True, "k >= 1"),
        _fam("2-ii", "", "a^2 b^2", lambda: True, "no constraint"),
        _fam("3-i", "ijk", "a^i a^i a^j a^j a^k a^k", lambda i, j, k: i + j == k + 2, "i+j = k+2"),
        _fam("3-ii", "ijk", "a^i a^i a^j a^j b^k b^k", lambda i, j, k: i + j + k - i * k == 2, "i+j+k-ik = 2"),
        _fam("3-iii", "i", "a^i a^i a^i a^i c^2 b^2", lambda i: True, "i >= 1"),
        _fam("3-iv", "i", "a^i a^i c^2 a^2 c^i a^i", lambda i: True, "i >= 1"),
        _fam("3-v", "i", "a^i a^i c^2 a^2 c^i c^i", lambda i: True, "i >= 1"),
        _fam("3-vi", "", "b^2 a^2 c^2 a^2 c^2 b^2", lambda: True, "no constraint"),
        _fam("3-vii", "", "b^2 a^2 c^2 b^2 c^2 a^2", lambda: True, "no constraint"),
        _fam("3-viii", "", "b^2 a^2 c^2 a^2 c^2 a^2", lambda: True, "no constraint"),
        _fam("3-ix", "i", "b^2 a^2 b^i a^i a^i b^i", lambda i: True, "i >= 1"),
    ]
}


def instantiate_family(family: str, params: Mapping[str, int] | None = None) -> Presentation:
    try:
        fam = FAMILIES[family]
    except KeyError:
        raise FamilyError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}") from None
    values = fam.check(params or {})
    rels = tuple(Relation(lhs, z * e) for (lhs, z, _), e in zip(fam.templates, fam.exponents(values)))
    return Presentation(fam.alphabet, rels, FamilyTag(fam.id, tuple(values.items())))


def family_instances(family: str, bound: int) -> list[Presentation]:
    """Every constraint-satisfying instance with all parameters in ``1..bound``."""
    fam = FAMILIES[family]
    out = []
    for values in product(range(1, bound + 1), repeat=len(fam.params)):
        params = dict(zip(fam.params, values))
        if fam.constraint(**params):
            out.append(instantiate_family(family, params))
    return out


def parse_params(text: str) -> dict[str, int]:
    """``"i=2,j=3"`` -> ``{"i": 2, "j": 3}``."""
    out: dict[str, int] = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        name, sep, value = item.partition("=")
        if not sep or not name.strip() or not value.strip().lstrip("-").isdigit():
            raise FamilyError(f"bad parameter {item!r}; expected name=integer")
        out[name.strip()] = int(value)
    return out
