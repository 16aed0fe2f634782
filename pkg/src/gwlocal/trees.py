"""Finite ordered rooted trees stored as Lukasiewicz words.

A tree is the sequence of child counts of its vertices listed in
depth-first (preorder) order, which is also the lexicographic order of
the Neveu labels.  ``[2, 0, 0]`` is a root with two leaf children and
``[0]`` is the single-vertex tree.  Vertex labels (tuples of positive
integers, ``()`` for the root) are only built when a query needs them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySet, MalformedEncoding, NotALeaf

NodeLabel = tuple  # tuple[int, ...], all entries >= 1


class DegreeSet:
    """A set of non-negative integers that is either finite or cofinite.

    Cofinite sets are stored through their finite complement, so the whole
    of N is ``DegreeSet((), cofinite=True)`` and N* is
    ``DegreeSet({0}, cofinite=True)``.
    """

    __slots__ = ("_elems", "cofinite")

    def __init__(self, elems: Iterable[int] = (), cofinite: bool = False):
        elems = frozenset(int(k) for k in elems)
        if any(k < 0 for k in elems):
            raise ValueError("degrees are non-negative integers")
        self._elems = elems
        self.cofinite = bool(cofinite)

    def __contains__(self, k) -> bool:
        return (k in self._elems) != self.cofinite

    def __eq__(self, other):
        if not isinstance(other, DegreeSet):
            return NotImplemented
        return self._elems == other._elems and self.cofinite == other.cofinite

    def __hash__(self):
        return hash((self._elems, self.cofinite))

    def __repr__(self):
        if self.cofinite:
            if not self._elems:
                return "N"
            if self._elems == {0}:
                return "N*"
            return f"N\\{sorted(self._elems)}"
        return "{" + ",".join(str(k) for k in sorted(self._elems)) + "}"

    @property
    def is_empty(self) -> bool:
        return not self.cofinite and not self._elems

    @property
    def finite_part(self) -> frozenset:
        """The stored elements: the set itself, or its complement if cofinite."""
        return self._elems

    def complement(self) -> "DegreeSet":
        return DegreeSet(self._elems, not self.cofinite)

    def mask(self, size: int) -> np.ndarray:
        """Boolean membership vector for degrees ``0..size-1``."""
        m = np.zeros(size, dtype=bool)
        for k in self._elems:
            if k < size:
                m[k] = True
        return ~m if self.cofinite else m

    def to_json(self):
        if self.cofinite:
            return {"complement": sorted(self._elems)}
        return sorted(self._elems)


NATURALS = DegreeSet((), cofinite=True)
POSITIVE = DegreeSet({0}, cofinite=True)
LEAVES = DegreeSet({0})


def as_degree_set(a) -> DegreeSet:
    """Coerce ``a`` into a DegreeSet.

    Accepts a DegreeSet, an iterable of ints, a single int, or one of the
    strings ``"N"``, ``"N*"`` and ``"0,2"``-style lists.
    """
    if isinstance(a, DegreeSet):
        return a
    if isinstance(a, dict) and "complement" in a:
        return DegreeSet(a["complement"], cofinite=True)
    if isinstance(a, str):
        s = a.strip()
        if s in ("N", "n", "all"):
            return NATURALS
        if s in ("N*", "n*", "positive"):
            return POSITIVE
        s = s.strip("{}")
        return DegreeSet(int(x) for x in s.split(",") if x.strip())
    if isinstance(a, (int, np.integer)):
        return DegreeSet({int(a)})
    return DegreeSet(a)


def check_word(degrees: Sequence[int]) -> None:
    """Raise MalformedEncoding unless ``degrees`` is a Lukasiewicz word."""
    if len(degrees) == 0:
        raise MalformedEncoding("empty degree sequence")
    walk = 0
    last = len(degrees) - 1
    for i, k in enumerate(degrees):
        if k < 0:
            raise MalformedEncoding(f"negative degree {k} at position {i}")
        walk += k - 1
        if walk < 0 and i < last:
            raise MalformedEncoding(f"walk hits -1 early at position {i}")
    if walk != -1:
        raise MalformedEncoding(f"walk ends at {walk}, expected -1")


@dataclass(frozen=True)
class Tree:
    """Immutable finite ordered tree; see the module docstring."""

    degrees: tuple

    def __post_init__(self):
        degs = tuple(int(k) for k in self.degrees)
        check_word(degs)
        object.__setattr__(self, "degrees", degs)

    # derived data, computed once per instance
    @cached_property
    def depths(self) -> tuple:
        """Generation of each vertex, in preorder."""
        out = []
        stack = []  # remaining children to visit at each open depth
        for k in self.degrees:
            d = len(stack)
            out.append(d)
            if stack:
                stack[-1] -= 1
            if k > 0:
                stack.append(k)
            else:
                while stack and stack[-1] == 0:
                    stack.pop()
        return tuple(out)

    @cached_property
    def labels(self) -> tuple:
        """Neveu label of each vertex, in preorder."""
        out = []
        path = []
        remaining = []
        for k in self.degrees:
            out.append(tuple(path))
            if k > 0:
                path.append(1)
                remaining.append(k - 1)
            else:
                while remaining and remaining[-1] == 0:
                    remaining.pop()
                    path.pop()
                if remaining:
                    remaining[-1] -= 1
                    path[-1] += 1
        return tuple(out)

    @cached_property
    def _index(self) -> dict:
        return {u: i for i, u in enumerate(self.labels)}

    @cached_property
    def subtree_ends(self) -> tuple:
        """``ends[i]`` is one past the last preorder index of the subtree at i."""
        n = len(self.degrees)
        ends = [0] * n
        for i in range(n - 1, -1, -1):
            j = i + 1
            for _ in range(self.degrees[i]):
                j = ends[j]
            ends[i] = j
        return tuple(ends)

    @property
    def card(self) -> int:
        return len(self.degrees)

    def __len__(self):
        return len(self.degrees)

    @property
    def height(self) -> int:
        return max(self.depths)

    def index_of(self, label) -> int:
        """Preorder index of ``label``; KeyError if absent."""
        return self._index[tuple(label)]

    def __contains__(self, label) -> bool:
        return tuple(label) in self._index

    def degree(self, label) -> int:
        return self.degrees[self.index_of(label)]

    def leaves(self) -> list:
        return [u for u, k in zip(self.labels, self.degrees) if k == 0]

    def count_outdegree(self, a) -> int:
        a = as_degree_set(a)
        if a.is_empty:
            raise EmptySet("L_A needs a non-empty degree set")
        return sum(1 for k in self.degrees if k in a)

    def generation_size(self, n: int) -> int:
        if n < 0:
            raise ValueError("generation index must be >= 0")
        return sum(1 for d in self.depths if d == n)

    def restrict(self, h: int) -> "Tree":
        """The tree made of the vertices at generation <= h."""
        if h < 0:
            raise ValueError("height cap must be >= 0")
        if self.height <= h:
            return self
        return Tree(tuple(
            (k if d < h else 0)
            for k, d in zip(self.degrees, self.depths) if d <= h
        ))

    def graft(self, x, s: "Tree") -> "Tree":
        """Attach ``s`` at the leaf ``x``."""
        x = tuple(x)
        i = self._index.get(x)
        if i is None or self.degrees[i] != 0:
            raise NotALeaf(f"{x} is not a leaf of the tree")
        return Tree(self.degrees[:i] + s.degrees + self.degrees[i + 1:])

    def to_json(self) -> str:
        return json.dumps(list(self.degrees))

    def to_parens(self) -> str:
        """Bracket form, a leaf being ``()``; ``[2,0,0]`` gives ``(()())``."""
        out = []
        stack = []
        for k in self.degrees:
            out.append("(")
            if k > 0:
                stack.append(k)
                continue
            out.append(")")
            while stack:
                stack[-1] -= 1
                if stack[-1] > 0:
                    break
                stack.pop()
                out.append(")")
        return "".join(out)

    def __str__(self):
        return self.to_parens()


@dataclass(frozen=True)
class RestrictedTree:
    """A tree together with a height cap it respects (an element of T^(h))."""

    tree: Tree
    height_cap: int

    def __post_init__(self):
        if self.height_cap < 0:
            raise ValueError("height cap must be >= 0")
        if self.tree.height > self.height_cap:
            raise ValueError(
                f"tree of height {self.tree.height} exceeds cap {self.height_cap}")


def decode(degrees: Sequence[int]) -> Tree:
    return Tree(tuple(degrees))


def encode(t: Tree) -> list:
    return list(t.degrees)


def from_json(s: str) -> Tree:
    return decode(json.loads(s))


def from_parens(s: str) -> Tree:
    """Inverse of :meth:`Tree.to_parens`."""
    s = "".join(s.split())
    degrees = []
    stack = []  # preorder index of each open vertex
    for i, ch in enumerate(s):
        if ch == "(":
            if stack:
                degrees[stack[-1]] += 1
            elif degrees:
                raise MalformedEncoding("more than one root")
            stack.append(len(degrees))
            degrees.append(0)
        elif ch == ")":
            if not stack:
                raise MalformedEncoding(f"unbalanced ')' at {i}")
            stack.pop()
        else:
            raise MalformedEncoding(f"unexpected character {ch!r}")
    if stack or not degrees:
        raise MalformedEncoding("unbalanced brackets")
    return Tree(tuple(degrees))


def height(t: Tree) -> int:
    return t.height


def count_outdegree(t: Tree, a) -> int:
    return t.count_outdegree(a)


def generation_size(t: Tree, n: int) -> int:
    return t.generation_size(n)


def restrict(t: Tree, h: int) -> RestrictedTree:
    return RestrictedTree(t.restrict(h), h)


def graft(t: Tree, x, s: Tree) -> Tree:
    return t.graft(x, s)


def mrca(labels) -> NodeLabel:
    """Longest common prefix of a non-empty collection of labels.

    Ancestry is taken reflexively, so ``mrca({(), (1,)})`` is the root.
    """
    labels = [tuple(u) for u in labels]
    if not labels:
        raise ValueError("mrca of an empty set")
    first = labels[0]
    n = min(len(u) for u in labels)
    i = 0
    while i < n and all(u[i] == first[i] for u in labels):
        i += 1
    return first[:i]


def is_ancestor(u, v, strict: bool = True) -> bool:
    u, v = tuple(u), tuple(v)
    if strict and len(u) >= len(v):
        return False
    return v[:len(u)] == u


TRIVIAL = Tree((0,))


def from_bfs(degrees: Sequence[int]) -> Tree:
    """Tree whose breadth-first degree sequence is ``degrees``."""
    degrees = [int(k) for k in degrees]
    n = len(degrees)
    children = [[] for _ in range(n)]
    nxt = 1
    for i, k in enumerate(degrees):
        if nxt + k > n:
            raise MalformedEncoding("breadth-first sequence ends early")
        children[i] = list(range(nxt, nxt + k))
        nxt += k
    if nxt != n:
        raise MalformedEncoding("breadth-first sequence has unreachable entries")
    out = []
    stack = [0]
    while stack:
        i = stack.pop()
        out.append(degrees[i])
        stack.extend(reversed(children[i]))
    return Tree(tuple(out))


def to_bfs(t: Tree) -> tuple:
    """Breadth-first degree sequence of ``t``."""
    order = sorted(range(t.card), key=lambda i: (t.depths[i], i))
    return tuple(t.degrees[i] for i in order)
