"""Elementary rewriting, bounded derivation search and congruence closure on word balls.

Nothing here ever claims that two words are *not* equal in the presented
semigroup: searches are bounded, and a miss is reported as ``None`` /
"unknown" rather than as a proof of non-derivability.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Mapping

from .words import Presentation, Relation, pure_power, render_word


class ResourceLimitError(RuntimeError):
    pass


@dataclass(frozen=True)
class RewriteStep:
    """``source = prefix·side·suffix`` becomes ``target = prefix·other·suffix``."""

    source: str
    target: str
    relation: int
    forward: bool  # lhs replaced by rhs
    position: int

    def __str__(self) -> str:
        arrow = "->" if self.forward else "<-"
        return f"{render_word(self.source)} => {render_word(self.target)}  (rel {self.relation} {arrow} @{self.position})"

    def as_dict(self) -> dict:
        return {
            "source": self.source,
            "target": self.target,
            "relation": self.relation,
            "forward": self.forward,
            "position": self.position,
        }


def _rules(P: Presentation) -> list[tuple[str, str, int, bool]]:
    rules = []
    for idx, (u, v) in enumerate(P.relations):
        rules.append((u, v, idx, True))
        rules.append((v, u, idx, False))
    return rules


def rewrite_steps(w: str, P: Presentation, maxlen: int | None = None) -> Iterator[RewriteStep]:
    """Every elementary transition out of ``w``, optionally dropping targets longer than ``maxlen``."""
    for pat, rep, idx, fwd in _rules(P):
        if maxlen is not None and len(w) - len(pat) + len(rep) > maxlen:
            continue
        pos = w.find(pat)
        while pos != -1:
            yield RewriteStep(w, w[:pos] + rep + w[pos + len(pat):], idx, fwd, pos)
            pos = w.find(pat, pos + 1)


def one_step_rewrites(w: str, P: Presentation) -> set[str]:
    return {step.target for step in rewrite_steps(w, P)} - {w}


def _neighbours(w: str, rules, maxlen: int) -> Iterator[str]:
    # hot loop of every bounded search; avoids building RewriteStep objects
    n = len(w)
    for pat, rep, dl in rules:
        if n + dl > maxlen:
            continue
        pos = w.find(pat)
        while pos != -1:
            yield w[:pos] + rep + w[pos + len(pat):]
            pos = w.find(pat, pos + 1)


def _fast_rules(P: Presentation):
    return [(pat, rep, len(rep) - len(pat)) for pat, rep, _, _ in _rules(P)]


def _step_between(u: str, v: str, P: Presentation) -> RewriteStep:
    for step in rewrite_steps(u, P):
        if step.target == v:
            return step
    raise AssertionError(f"{u} -> {v} is not an elementary transition")


def _path(parent: Mapping[str, str | None], end: str, P: Presentation) -> list[RewriteStep]:
    chain = [end]
    while parent[chain[-1]] is not None:
        chain.append(parent[chain[-1]])
    chain.reverse()
    return [_step_between(a, b, P) for a, b in zip(chain, chain[1:])]


def replay(path: Iterable[RewriteStep], P: Presentation) -> bool:
    """True iff every step is an elementary transition of ``P`` and the steps chain."""
    prev = None
    for step in path:
        if prev is not None and step.source != prev:
            return False
        if step.target not in one_step_rewrites(step.source, P):
            return False
        pat, rep = P.relations[step.relation] if step.forward else P.relations[step.relation][::-1]
        s = step.source
        if s[step.position:step.position + len(pat)] != pat:
            return False
        if s[:step.position] + rep + s[step.position + len(pat):] != step.target:
            return False
        prev = step.target
    return True


def _check_bounds(**bounds: int) -> None:
    for name, value in bounds.items():
        if value is not None and value < 1:
            raise ValueError(f"{name} must be positive, got {value}")


def is_consequence(
    u: str, v: str, P: Presentation, maxlen: int = 16, maxnodes: int = 200_000
) -> list[RewriteStep] | None:
    """Breadth-first search for a derivation of ``v`` from ``u``.

    Returns the step path (empty when ``u == v``), or None when ``v`` was not
    reached within the bounds.  None means "unknown", never "not derivable".
    """
    _check_bounds(maxlen=maxlen, maxnodes=maxnodes)
    if u == v:
        return []
    if len(u) > maxlen or len(v) > maxlen:
        return None
    rules = _fast_rules(P)
    parent: dict[str, str | None] = {u: None}
    queue = deque([u])
    while queue:
        w = queue.popleft()
        for t in sorted(set(_neighbours(w, rules, maxlen))):
            if t in parent:
                continue
            parent[t] = w
            if t == v:
                return _path(parent, v, P)
            if len(parent) >= maxnodes:
                return None
            queue.append(t)
    return None


# --------------------------------------------------------------------------
# balls

@dataclass(frozen=True)
class Collision:
    """``x^p ~ y^q`` with ``(x, p) != (y, q)``, witnessed by ``path`` from x^p to y^q."""

    x: str
    p: int
    y: str
    q: int
    path: tuple[RewriteStep, ...] = field(default=(), compare=False)

    def __str__(self) -> str:
        return f"{render_word(self.x * self.p)} ~ {render_word(self.y * self.q)}"

    def as_dict(self) -> dict:
        return {"left": [self.x, self.p], "right": [self.y, self.q], "steps": len(self.path)}


@dataclass
class MergeReport:
    collisions: list[Collision]

    def __bool__(self) -> bool:
        return bool(self.collisions)

    def pairs(self) -> set[tuple[str, int, str, int]]:
        return {(c.x, c.p, c.y, c.q) for c in self.collisions}


class WordIndex:
    """Dense shortlex ranking of all words of length 1..L over an ordered alphabet."""

    def __init__(self, alphabet: tuple[str, ...], L: int):
        self.alphabet = alphabet
        self.L = L
        self.k = k = len(alphabet)
        self.pos = {x: i for i, x in enumerate(alphabet)}
        self.offset = [0] * (L + 2)
        for n in range(1, L + 1):
            self.offset[n + 1] = self.offset[n] + k ** n
        self.size = self.offset[L + 1]

    def rank(self, w: str) -> int:
        r = 0
        for x in w:
            r = r * self.k + self.pos[x]
        return self.offset[len(w)] + r

    def word(self, r: int) -> str:
        n = 1
        while self.offset[n + 1] <= r:
            n += 1
        r -= self.offset[n]
        out = []
        for _ in range(n):
            r, d = divmod(r, self.k)
            out.append(self.alphabet[d])
        return "".join(reversed(out))

    def __iter__(self) -> Iterator[str]:
        for n in range(1, self.L + 1):
            for letters in product(self.alphabet, repeat=n):
                yield "".join(letters)


@dataclass
class BallPartition:
    L: int
    alphabet: tuple[str, ...]
    classes: list[list[str]]  # each class in shortlex order; classes ordered by first member
    steps: list[list[RewriteStep]]  # spanning tree edges per class

    def __len__(self) -> int:
        return len(self.classes)

    def class_of(self, w: str) -> list[str]:
        return self.classes[self._lookup[w]]

    def same_class(self, u: str, v: str) -> bool:
        return self._lookup[u] == self._lookup[v]

    def __post_init__(self):
        self._lookup = {w: i for i, cls in enumerate(self.classes) for w in cls}

    def restrict(self, L: int) -> list[frozenset[str]]:
        """The classes cut down to words of length at most ``L`` (empty pieces dropped)."""
        out = []
        for cls in self.classes:
            part = frozenset(w for w in cls if len(w) <= L)
            if part:
                out.append(part)
        return out


def _find(parent: list[int], i: int) -> int:
    root = i
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        parent[i], i = root, parent[i]
    return root


def congruence_ball(P: Presentation, L: int, max_words: int = 2_000_000) -> tuple[BallPartition, MergeReport]:
    """Close the words of length <= L under every in-ball elementary transition.

    Raises ResourceLimitError when the ball would exceed ``max_words`` words.
    """
    _check_bounds(L=L)
    index = WordIndex(P.alphabet, L)
    if index.size > max_words:
        raise ResourceLimitError(f"ball of radius {L} has {index.size} words (> {max_words}); lower L")
    parent = list(range(index.size))
    tree: list[RewriteStep] = []
    rules = _rules(P)
    for r, w in enumerate(index):
        n = len(w)
        for pat, rep, idx, fwd in rules:
            if n - len(pat) + len(rep) > L:
                continue
            pos = w.find(pat)
            while pos != -1:
                t = w[:pos] + rep + w[pos + len(pat):]
                a, b = _find(parent, r), _find(parent, index.rank(t))
                if a != b:
                    parent[max(a, b)] = min(a, b)
                    tree.append(RewriteStep(w, t, idx, fwd, pos))
                pos = w.find(pat, pos + 1)

    members: dict[int, list[str]] = {}
    for r, w in enumerate(index):
        members.setdefault(_find(parent, r), []).append(w)
    roots = sorted(members)
    slot = {root: i for i, root in enumerate(roots)}
    classes = [members[root] for root in roots]
    steps: list[list[RewriteStep]] = [[] for _ in roots]
    for step in tree:
        steps[slot[_find(parent, index.rank(step.source))]].append(step)
    ball = BallPartition(L, P.alphabet, classes, steps)
    return ball, MergeReport(_collisions(ball, P))


def _tree_path(steps: list[RewriteStep], u: str, v: str, P: Presentation) -> tuple[RewriteStep, ...]:
    adj: dict[str, list[str]] = {}
    for s in steps:
        adj.setdefault(s.source, []).append(s.target)
        adj.setdefault(s.target, []).append(s.source)
    parent: dict[str, str | None] = {u: None}
    queue = deque([u])
    while queue:
        w = queue.popleft()
        if w == v:
            break
        for t in adj.get(w, ()):
            if t not in parent:
                parent[t] = w
                queue.append(t)
    return tuple(_path(parent, v, P))


def _collisions(ball: BallPartition, P: Presentation) -> list[Collision]:
    out = []
    for cls, steps in zip(ball.classes, ball.steps):
        powers = [pp for pp in map(pure_power, cls) if pp]
        for i, (x, p) in enumerate(powers):
            for y, q in powers[i + 1:]:
                path = _tree_path(steps, x * p, y * q, P)
                out.append(Collision(x, p, y, q, path))
    return out


# --------------------------------------------------------------------------
# probe elimination

@dataclass(frozen=True)
class Contradiction:
    """Two distinct pure powers derivable from one probe word."""

    probe: str
    collision: Collision

    def __str__(self) -> str:
        return f"{self.collision} via probe {render_word(self.probe)}"

    def as_dict(self) -> dict:
        return {"probe": self.probe, **self.collision.as_dict()}


def default_probes(alphabet: Iterable[str], lengths: Iterable[int] = (3, 4)) -> list[str]:
    """All words of the given lengths, shortlex ordered."""
    alphabet = tuple(alphabet)
    return ["".join(p) for n in lengths for p in product(alphabet, repeat=n)]


def probe_eliminate(
    P: Presentation,
    probes: Iterable[str] | None = None,
    depth: int = 24,
    maxlen: int = 12,
    maxnodes: int = 200_000,
    shared: bool = True,
) -> Contradiction | None:
    """Search each probe's bounded derivation neighbourhood for two distinct pure powers.

    With ``shared`` set, a probe already met inside an earlier probe's
    neighbourhood is skipped: its neighbourhood is the same derivation class.
    Returns the first contradiction found, or None ("none found within bounds").
    """
    _check_bounds(depth=depth, maxlen=maxlen, maxnodes=maxnodes)
    rules = _fast_rules(P)
    seen: set[str] = set()
    for probe in (default_probes(P.alphabet) if probes is None else probes):
        if shared and probe in seen:
            continue
        hit = _probe_bfs(probe, rules, depth, maxlen, maxnodes, seen if shared else None)
        if hit is not None:
            parent, first, second = hit
            # walk back from the first power to the probe; a reversed step keeps its factor position
            path = [RewriteStep(s.target, s.source, s.relation, not s.forward, s.position)
                    for s in reversed(_path(parent, first, P))]
            path += _path(parent, second, P)
            (x, p), (y, q) = pure_power(first), pure_power(second)
            if (y, q) < (x, p):
                (x, p), (y, q) = (y, q), (x, p)
                path = [RewriteStep(s.target, s.source, s.relation, not s.forward, s.position)
                        for s in reversed(path)]
            return Contradiction(probe, Collision(x, p, y, q, tuple(path)))
    return None


def _probe_bfs(probe, rules, depth, maxlen, maxnodes, seen):
    parent: dict[str, str | None] = {probe: None}
    if seen is not None:
        seen.add(probe)
    first = probe if pure_power(probe) else None
    frontier = [probe]
    for _ in range(depth):
        nxt = []
        for w in frontier:
            for t in _neighbours(w, rules, maxlen):
                if t in parent:
                    continue
                parent[t] = w
                if seen is not None:
                    seen.add(t)
                if t.count(t[0]) == len(t):
                    if first is None:
                        first = t
                    else:
                        return parent, first, t
                nxt.append(t)
                if len(parent) >= maxnodes:
                    return None
        if not nxt:
            break
        frontier = nxt
    return None


# --------------------------------------------------------------------------
# generator maps

@dataclass(frozen=True)
class MapCheck:
    status: str  # "ok" | "fail" | "unknown"
    relation: Relation | None = None
    image: Relation | None = None
    paths: tuple[tuple[RewriteStep, ...], ...] = ()

    def __bool__(self) -> bool:
        return self.status == "ok"


def check_generator_map(
    src: Presentation,
    dst: Presentation,
    gmap: Mapping[str, str],
    maxlen: int = 16,
    maxnodes: int = 200_000,
) -> MapCheck:
    """Check that each relation of ``src`` maps to a consequence of ``dst``.

    ``fail`` is reported only when it is certain: an image side admits no
    elementary transition at all (a singleton class) and differs from the
    other side.  Otherwise a missed derivation is ``unknown``.
    """
    missing = [x for x in src.alphabet if x not in gmap]
    if missing:
        raise ValueError(f"generator map undefined on {', '.join(missing)}")
    bad = [x for x in src.alphabet if gmap[x] not in dst.alphabet]
    if bad:
        raise ValueError(f"generator map sends {', '.join(bad)} outside the target alphabet")
    paths = []
    for rel in src.relations:
        image = Relation("".join(gmap[x] for x in rel.lhs), "".join(gmap[x] for x in rel.rhs))
        path = is_consequence(image.lhs, image.rhs, dst, maxlen, maxnodes)
        if path is None:
            if any(not one_step_rewrites(side, dst) for side in image):
                return MapCheck("fail", rel, image)
            return MapCheck("unknown", rel, image)
        paths.append(tuple(path))
    return MapCheck("ok", paths=tuple(paths))
