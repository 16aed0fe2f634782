"""Conditioning events {A(t) in [n, n + n0)} for the functionals we support."""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Optional

from .trees import NATURALS, LEAVES, DegreeSet, Tree, as_degree_set

FUNCTIONALS = ("height", "card", "outdeg", "generation")


@dataclass(frozen=True)
class EventSpec:
    """The event ``A(t) in [n, n + window)``; ``window=None`` means n0 = infinity.

    For ``functional="generation"`` the event is ``G_n(t) == alpha``: ``n``
    is the generation index and ``window`` is ignored.
    """

    functional: str
    n: int
    window: Optional[int] = 1
    A: Optional[DegreeSet] = None
    alpha: Optional[int] = None

    def __post_init__(self):
        if self.functional not in FUNCTIONALS:
            raise ValueError(f"unknown functional {self.functional!r}")
        if self.functional == "generation":
            if self.n < 0 or self.alpha is None or self.alpha < 1:
                raise ValueError("generation events need n >= 0 and alpha >= 1")
            object.__setattr__(self, "window", 1)
        else:
            if self.n < 0:
                raise ValueError("n must be >= 0")
            if self.window is not None and self.window < 1:
                raise ValueError("window n0 must be >= 1")
        if self.functional == "outdeg":
            a = as_degree_set(self.A if self.A is not None else NATURALS)
            if a.is_empty:
                raise ValueError("outdeg events need a non-empty degree set")
            object.__setattr__(self, "A", a)

    # constructors
    @classmethod
    def height_ge(cls, n):
        return cls("height", n, None)

    @classmethod
    def height_eq(cls, n):
        return cls("height", n, 1)

    @classmethod
    def card_eq(cls, n):
        return cls("card", n, 1)

    @classmethod
    def card_ge(cls, n):
        return cls("card", n, None)

    @classmethod
    def outdeg_eq(cls, a, n):
        return cls("outdeg", n, 1, as_degree_set(a))

    @classmethod
    def leaves_eq(cls, n):
        return cls("outdeg", n, 1, LEAVES)

    @classmethod
    def generation_eq(cls, n, alpha):
        return cls("generation", n, 1, alpha=alpha)

    def value(self, t: Tree) -> int:
        f = self.functional
        if f == "height":
            return t.height
        if f == "card":
            return t.card
        if f == "outdeg":
            return t.count_outdegree(self.A)
        return t.generation_size(self.n)

    def contains(self, t: Tree) -> bool:
        if self.functional == "generation":
            return t.generation_size(self.n) == self.alpha
        v = self.value(t)
        return v >= self.n and (self.window is None or v < self.n + self.window)

    __contains__ = contains

    def with_n(self, n: int) -> "EventSpec":
        return replace(self, n=n)

    @property
    def upper(self) -> Optional[int]:
        """Largest value of the functional inside the window, None if unbounded."""
        if self.window is None:
            return None
        return self.n + self.window - 1

    def label(self) -> str:
        f = self.functional
        name = {"height": "H", "card": "Card"}.get(f)
        if f == "outdeg":
            name = "L0" if self.A == LEAVES else f"L{self.A!r}"
        if f == "generation":
            return f"G{self.n}={self.alpha}"
        if self.window is None:
            return f"{name}>={self.n}"
        if self.window == 1:
            return f"{name}={self.n}"
        return f"{name} in [{self.n},{self.n + self.window})"

    def to_json(self) -> dict:
        out = {"functional": self.functional, "n": self.n, "window": self.window}
        if self.A is not None:
            out["A"] = self.A.to_json()
        if self.alpha is not None:
            out["alpha"] = self.alpha
        return out

    @classmethod
    def from_json(cls, d: dict) -> "EventSpec":
        a = d.get("A")
        return cls(d["functional"], int(d["n"]), d.get("window", 1),
                   as_degree_set(a) if a is not None else None, d.get("alpha"))


_EVENT_RE = re.compile(
    r"^(?P<name>height|card|leaves|l0|outdeg\[(?P<set>[^\]]*)\]|gen(?:eration)?(?P<gen>\d+))"
    r"(?P<op>>=|=)(?P<n>\d+)(?:\.\.(?P<m>\d+))?$")


def parse_event(text: str) -> EventSpec:
    """Parse ``card=5``, ``height>=10``, ``leaves=3``, ``outdeg[0,2]=4``,
    ``card=5..8`` (window [5, 8]) or ``gen10=7`` (G_10 = 7)."""
    m = _EVENT_RE.match(text.strip().lower().replace(" ", ""))
    if not m:
        raise ValueError(f"cannot parse event {text!r}")
    name, op, n = m["name"], m["op"], int(m["n"])
    if m["m"] is not None:
        if op != "=":
            raise ValueError("ranges use '=' (card=5..8)")
        window = int(m["m"]) - n + 1
    else:
        window = None if op == ">=" else 1
    if m["gen"] is not None:
        if op != "=":
            raise ValueError("generation events are equalities")
        return EventSpec.generation_eq(int(m["gen"]), n)
    if name in ("leaves", "l0"):
        return EventSpec("outdeg", n, window, LEAVES)
    if name.startswith("outdeg"):
        s = m["set"].upper()
        return EventSpec("outdeg", n, window, as_degree_set(s if s in ("N", "N*") else m["set"]))
    return EventSpec(name, n, window)


def parse_family(text: str, window: Optional[int] = None) -> EventSpec:
    """Event family without n, e.g. ``height_ge``, ``height_eq``, ``card``,
    ``leaves`` or ``outdeg[2]``; n is filled with 1."""
    t = text.strip().lower()
    if t == "height_ge":
        return EventSpec("height", 1, None)
    if t == "height_eq":
        return EventSpec("height", 1, window or 1)
    if t == "card":
        return EventSpec("card", 1, window or 1)
    if t == "card_ge":
        return EventSpec("card", 1, None)
    if t in ("leaves", "l0"):
        return EventSpec("outdeg", 1, window or 1, LEAVES)
    m = re.match(r"^outdeg\[([^\]]*)\](_ge)?$", t)
    if m:
        s = m[1].upper()
        a = as_degree_set(s if s in ("N", "N*") else m[1])
        return EventSpec("outdeg", 1, None if m[2] else (window or 1), a)
    raise ValueError(f"unknown event family {text!r}")


def card_upper_bound(event: EventSpec, p) -> Optional[int]:
    """A certified bound Card(t) <= B for every t in the event with degrees
    in supp(p), or None when no finite bound holds."""
    top = event.upper
    if top is None or event.functional in ("height", "generation"):
        return None
    if event.functional == "card":
        return top
    a = event.A
    supp = p.support
    outside = [k for k in supp if k not in a]
    if not outside:
        return top
    if 0 in a and all(k >= 2 for k in outside):
        # card - 1 = sum of degrees >= 2 * (card - L_A)
        return 2 * top - 1
    if outside == [0]:
        # leaves = 1 + sum over A of (k - 1)
        return top + 1 + top * (max(supp) - 1)
    return None


def snap_to_lattice(event: EventSpec, span: int):
    """Move a ``card == n`` event up to the lattice span*m + 1.

    Returns (event, note); note is None when nothing changed.
    """
    if event.functional != "card" or event.window != 1 or span <= 1:
        return event, None
    r = (event.n - 1) % span
    if r == 0:
        return event, None
    n = event.n + (span - r)
    return event.with_n(n), f"Card={event.n} is off the span-{span} lattice; snapped to Card={n}"
