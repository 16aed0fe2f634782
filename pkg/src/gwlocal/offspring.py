"""Offspring distributions, size-biasing and the exponentially tilted family."""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import special, stats

from .errors import (DomainError, InvalidDistribution, OutsideInterval,
                     SeriesDivergence)
from .trees import NATURALS, DegreeSet, as_degree_set

EPS_MASS = 1e-12
TAIL_CUT = 1e-14
TOL_ROOT = 1e-10
# upper limit on how far a tilted series is extended before giving up
MAX_EXTENSION = 200_000


class OffspringDistribution:
    """A probability mass function on the non-negative integers.

    ``probs[k]`` is p(k) on a finite support ``0..K``.  Parametric families
    with infinite support are cut where the cumulative mass first reaches
    ``1 - tail_cut`` and renormalized once; ``tail`` keeps the exact
    (un-normalized) pmf beyond the cut so tilts with theta > 1 can extend
    the series, and ``radius`` is the radius of convergence of the
    generating function.
    """

    def __init__(self, probs, *, tail: Optional[Callable] = None,
                 radius: float = math.inf, name: str = "pmf",
                 params: Optional[dict] = None, eps_mass: float = EPS_MASS):
        probs = np.asarray(probs, dtype=float).copy()
        if probs.ndim != 1 or probs.size == 0:
            raise InvalidDistribution("pmf must be a non-empty 1-D array")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise InvalidDistribution("pmf entries must be finite and >= 0")
        total = math.fsum(probs)
        if abs(total - 1.0) > eps_mass:
            raise InvalidDistribution(f"pmf sums to {total!r}, not 1")
        nz = np.nonzero(probs)[0]
        probs = probs[: nz[-1] + 1] / total
        probs.setflags(write=False)
        self.probs = probs
        self.tail = tail
        self.radius = float(radius)
        self.name = name
        self.params = dict(params or {})
        self._cdf = np.cumsum(probs).tolist()
        self._cdf[-1] = 1.0

    # constructors -----------------------------------------------------

    @classmethod
    def from_pmf(cls, values, **kw) -> "OffspringDistribution":
        """From a dict ``{k: p(k)}`` or a sequence ``[p(0), p(1), ...]``."""
        if isinstance(values, dict):
            values = {int(k): float(v) for k, v in values.items()}
            if not values:
                raise InvalidDistribution("empty pmf")
            if min(values) < 0:
                raise InvalidDistribution("negative degree in pmf")
            arr = np.zeros(max(values) + 1)
            for k, v in values.items():
                arr[k] = v
        else:
            arr = np.asarray(values, dtype=float)
        kw.setdefault("params", {"values": {str(k): float(v) for k, v in enumerate(arr) if v > 0}})
        return cls(arr, **kw)

    @classmethod
    def binary(cls, p0: float = 0.5) -> "OffspringDistribution":
        """p(0) = p0, p(2) = 1 - p0; critical at p0 = 1/2."""
        return cls.from_pmf({0: p0, 2: 1.0 - p0}, name="binary")

    @classmethod
    def geometric_mixture(cls, q: float, tail_cut: float = TAIL_CUT) -> "OffspringDistribution":
        """p(0) = 1-q and p(k) = q^2 (1-q)^(k-1) for k >= 1 (critical)."""
        if not 0 < q < 1:
            raise InvalidDistribution("q must lie in (0, 1)")

        def pmf(k):
            k = np.asarray(k, dtype=float)
            return np.where(k == 0, 1 - q, q * q * (1 - q) ** np.maximum(k - 1, 0))

        # tail beyond K is q (1-q)^K
        K = max(1, math.ceil(math.log(tail_cut / q) / math.log(1 - q))) if q < 1 else 1
        probs = pmf(np.arange(K + 1))
        return cls(probs, tail=pmf, radius=1.0 / (1.0 - q), name="geometric_mixture",
                   params={"q": q, "tail_cut": tail_cut}, eps_mass=max(EPS_MASS, 2 * tail_cut))

    @classmethod
    def poisson(cls, lam: float, tail_cut: float = TAIL_CUT) -> "OffspringDistribution":
        if lam <= 0:
            raise InvalidDistribution("lambda must be > 0")

        def pmf(k):
            return stats.poisson.pmf(np.asarray(k), lam)

        K = int(stats.poisson.isf(tail_cut, lam)) + 1
        return cls(pmf(np.arange(K + 1)), tail=pmf, radius=math.inf, name="poisson",
                   params={"lambda": lam, "tail_cut": tail_cut},
                   eps_mass=max(EPS_MASS, 2 * tail_cut))

    @classmethod
    def power_law(cls, alpha: float, p0: float, tail_cut: float = TAIL_CUT) -> "OffspringDistribution":
        """p(0) = p0 and p(k) proportional to k^-alpha for k >= 1.

        The generating function has radius of convergence exactly 1, which
        makes this the standard non-generic example for A = N.
        """
        if alpha <= 2:
            raise InvalidDistribution("alpha must exceed 2 for a finite mean")
        if not 0 < p0 < 1:
            raise InvalidDistribution("p0 must lie in (0, 1)")
        z = special.zeta(alpha)

        def pmf(k):
            k = np.asarray(k, dtype=float)
            with np.errstate(divide="ignore"):
                return np.where(k == 0, p0, (1 - p0) * np.maximum(k, 1) ** -alpha / z)

        # tail sum_{j>K} j^-alpha <= K^(1-alpha)/(alpha-1)
        K = math.ceil(((1 - p0) / (z * (alpha - 1) * tail_cut)) ** (1 / (alpha - 1)))
        return cls(pmf(np.arange(K + 1)), tail=pmf, radius=1.0, name="power_law",
                   params={"alpha": alpha, "p0": p0, "tail_cut": tail_cut},
                   eps_mass=max(EPS_MASS, 2 * tail_cut))

    @classmethod
    def from_spec(cls, spec) -> "OffspringDistribution":
        """Build from the JSON distribution spec (dict or JSON string)."""
        if isinstance(spec, str):
            spec = json.loads(spec)
        kind = spec.get("kind")
        if kind == "pmf":
            return cls.from_pmf(spec["values"])
        if kind == "binary":
            return cls.binary(spec.get("p0", 0.5))
        if kind == "geometric_mixture":
            return cls.geometric_mixture(spec["q"], spec.get("tail_cut", TAIL_CUT))
        if kind == "poisson":
            return cls.poisson(spec["lambda"], spec.get("tail_cut", TAIL_CUT))
        if kind == "power_law":
            return cls.power_law(spec["alpha"], spec["p0"], spec.get("tail_cut", TAIL_CUT))
        raise InvalidDistribution(f"unknown distribution kind {kind!r}")

    def to_spec(self) -> dict:
        if self.name == "binary":
            return {"kind": "pmf", **self.params}
        if self.name in ("pmf", "tilted", "size_biased"):
            return {"kind": "pmf", "values": {str(k): float(v) for k, v in self.items()}}
        if self.name == "poisson":
            return {"kind": "poisson", "lambda": self.params["lambda"],
                    "tail_cut": self.params["tail_cut"]}
        return {"kind": self.name, **self.params}

    # basic queries ----------------------------------------------------

    def __repr__(self):
        if self.params:
            ps = ", ".join(f"{k}={v}" for k, v in self.params.items() if k != "values")
            if ps:
                return f"OffspringDistribution({self.name}, {ps})"
        return f"OffspringDistribution({dict(self.items())})"

    def __call__(self, k: int) -> float:
        return float(self.probs[k]) if 0 <= k < self.probs.size else 0.0

    @property
    def kmax(self) -> int:
        return self.probs.size - 1

    @property
    def support(self) -> list:
        return [int(k) for k in np.nonzero(self.probs)[0]]

    def items(self):
        return [(k, float(self.probs[k])) for k in self.support]

    @property
    def mean(self) -> float:
        return math.fsum(self.probs * np.arange(self.probs.size))

    @property
    def second_factorial_moment(self) -> float:
        k = np.arange(self.probs.size)
        return math.fsum(self.probs * k * (k - 1))

    @property
    def span(self) -> int:
        pos = [k for k in self.support if k > 0]
        return math.gcd(*pos) if pos else 0

    def mass(self, a) -> float:
        """p(A)."""
        a = as_degree_set(a)
        return math.fsum(self.probs[a.mask(self.probs.size)])

    def check_assumption(self) -> bool:
        """p(0) > 0, p(0) + p(1) < 1 and finite mean."""
        return self(0) > 0 and self(0) + self(1) < 1 and math.isfinite(self.mean)

    def is_critical(self, tol: float = 1e-9) -> bool:
        return abs(self.mean - 1.0) <= tol

    # generating function ---------------------------------------------

    def gf(self, s: float) -> float:
        if not 0.0 <= s <= 1.0:
            raise DomainError(f"s={s} outside [0, 1]")
        # Horner
        acc = 0.0
        for c in self.probs[::-1]:
            acc = acc * s + c
        return float(acc)

    def gf_iterate(self, n: int, s: float) -> float:
        """phi_n(s), the n-fold composition of the generating function."""
        if n < 0:
            raise ValueError("n must be >= 0")
        if not 0.0 <= s <= 1.0:
            raise DomainError(f"s={s} outside [0, 1]")
        coeffs = self.probs[::-1].tolist()
        for _ in range(n):
            acc = 0.0
            for c in coeffs:
                acc = acc * s + c
            s = min(acc, 1.0)
        return s

    def survival_step(self, t: float) -> float:
        """1 - phi(1 - t), accurate for small t."""
        if t <= 0.0:
            return 0.0
        if t >= 1.0:
            return 1.0 - float(self.probs[0])
        k = np.arange(1, self.probs.size)
        return math.fsum(self.probs[1:] * -np.expm1(k * math.log1p(-t)))

    # derived distributions -------------------------------------------

    def size_biased(self) -> "OffspringDistribution":
        """p*(k) = k p(k) / mean."""
        mu = self.mean
        if mu <= 0:
            raise InvalidDistribution("size-biasing needs a positive mean")
        return OffspringDistribution(self.probs * np.arange(self.probs.size) / mu,
                                     name="size_biased")

    # sampling -----------------------------------------------------------

    def quantile(self, u: float) -> int:
        """Inverse cdf at u in [0, 1)."""
        return bisect.bisect_right(self._cdf, u)

    def sample(self, rng, size=None):
        u = rng.random(size)
        return np.searchsorted(np.asarray(self._cdf), u, side="right")

    # series beyond the cut -------------------------------------------

    def terms(self, kmax: int) -> np.ndarray:
        """p(0..kmax), extending with the exact tail past the stored support."""
        if kmax < self.probs.size:
            return np.asarray(self.probs[: kmax + 1])
        out = np.zeros(kmax + 1)
        out[: self.probs.size] = self.probs
        if self.tail is not None:
            ks = np.arange(self.probs.size, kmax + 1)
            out[self.probs.size:] = self.tail(ks)
        return out


@dataclass
class NotGeneric:
    """No theta in the admissible interval makes the tilted law critical."""

    theta_lo: float
    theta_hi: float
    mean_at_edge: float
    note: str = ""

    def __bool__(self):
        return False


@dataclass
class TiltedFamily:
    """The family theta -> p_theta attached to a base law and degree set A."""

    base: OffspringDistribution
    A: DegreeSet = field(default_factory=lambda: NATURALS)

    def __post_init__(self):
        self.A = as_degree_set(self.A)
        if self.base.mass(self.A) <= 0:
            raise InvalidDistribution("the tilted family needs p(A) > 0")

    def _series(self, theta: float) -> np.ndarray:
        """p(k) on enough of the support that theta^k p(k) has converged."""
        base = self.base
        if theta <= 1.0 or base.tail is None:
            return np.asarray(base.probs)
        if theta >= base.radius:
            raise SeriesDivergence(
                f"theta={theta} is beyond the radius of convergence {base.radius}")
        # terms behave like (theta / radius)^k eventually; extend until the
        # geometric-tail bound on the remainder is negligible
        K = base.kmax
        while True:
            K = min(2 * K + 16, MAX_EXTENSION)
            p = base.terms(K)
            w = p * theta ** np.arange(K + 1, dtype=float)
            last = w[-8:]
            ratio = theta / base.radius if math.isfinite(base.radius) else 0.5
            if last.max() * (1 / (1 - ratio)) < 1e-17 * max(w.sum(), 1.0) and np.all(np.diff(last) <= 0):
                nz = np.nonzero(w > 1e-300)[0]
                return p[: nz[-1] + 1]
            if K >= MAX_EXTENSION:
                raise SeriesDivergence(
                    f"sum theta^k p(k) did not converge within {MAX_EXTENSION} terms")

    def normalizer(self, theta: float) -> float:
        """c_A(theta); negative values mean theta is outside the interval."""
        if theta <= 0:
            raise OutsideInterval("theta must be > 0")
        p = self._series(theta)
        k = np.arange(p.size, dtype=float)
        in_a = self.A.mask(p.size)
        outside = math.fsum(theta ** (k[~in_a] - 1) * p[~in_a])
        inside = math.fsum(theta ** k[in_a] * p[in_a])
        if inside <= 0:
            raise OutsideInterval("sum over A vanishes")
        return (1.0 - outside) / inside

    def tilt(self, theta: float) -> OffspringDistribution:
        if theta == 1.0:
            return self.base
        c = self.normalizer(theta)
        if c < 0:
            raise OutsideInterval(f"c_A({theta}) = {c} < 0")
        p = self._series(theta)
        k = np.arange(p.size, dtype=float)
        in_a = self.A.mask(p.size)
        w = np.where(in_a, c * theta ** k * p, theta ** (k - 1) * p)
        total = math.fsum(w)
        if not math.isfinite(total) or abs(total - 1.0) > 1e-9:
            raise OutsideInterval(f"tilted mass {total} is not 1")
        return OffspringDistribution(w / math.fsum(w), name="tilted",
                                     params={"theta": theta, "A": self.A.to_json()},
                                     eps_mass=1e-9)

    def is_admissible(self, theta: float) -> bool:
        try:
            return self.normalizer(theta) >= 0
        except (OutsideInterval, SeriesDivergence):
            return False

    def tilted_mean(self, theta: float) -> float:
        return self.tilt(theta).mean

    def interval(self, tol: float = 1e-12) -> tuple:
        """Numerical bounds (theta_0, theta_1) of the admissible interval."""
        return (self._edge(down=True, tol=tol), self._edge(down=False, tol=tol))

    def _edge(self, down: bool, tol: float) -> float:
        inside = 1.0
        probe = 1.0
        for _ in range(64):
            probe = probe / 2 if down else probe * 2
            if not self.is_admissible(probe):
                break
            inside = probe
        else:
            # admissible as far as we probed
            return 0.0 if down else math.inf
        outside = probe
        while abs(outside - inside) > tol * max(1.0, inside):
            mid = 0.5 * (inside + outside)
            if self.is_admissible(mid):
                inside = mid
            else:
                outside = mid
        return inside


def mean(p: OffspringDistribution) -> float:
    return p.mean


def span(p: OffspringDistribution) -> int:
    return p.span


def gf(p: OffspringDistribution, s: float) -> float:
    return p.gf(s)


def gf_iterate(p: OffspringDistribution, n: int, s: float) -> float:
    return p.gf_iterate(n, s)


def size_biased(p: OffspringDistribution) -> OffspringDistribution:
    return p.size_biased()


def tilt(fam: TiltedFamily, theta: float) -> OffspringDistribution:
    return fam.tilt(theta)


def critical_theta(fam: TiltedFamily, tol_root: float = TOL_ROOT):
    """theta_c with mean(p_theta_c) = 1, or a NotGeneric value.

    Brackets by doubling (or halving) from theta = 1 while staying inside
    the admissible interval, then bisects on mean(p_theta) - 1.
    """
    def f(theta):
        return fam.tilted_mean(theta) - 1.0

    f1 = f(1.0)
    if abs(f1) <= tol_root:
        return 1.0
    going_up = f1 < 0
    lo = 1.0
    hi = None
    probe = 1.0
    for _ in range(64):
        probe = probe * 2 if going_up else probe / 2
        if not fam.is_admissible(probe):
            break
        if (f(probe) > 0) == going_up:
            hi = probe
            break
        lo = probe
    if hi is None:
        # the sign change, if any, sits between lo and the interval edge
        edge_in, edge_out = lo, probe
        while abs(edge_out - edge_in) > 1e-14 * max(1.0, edge_in):
            mid = 0.5 * (edge_in + edge_out)
            if fam.is_admissible(mid):
                edge_in = mid
            else:
                edge_out = mid
        f_edge = f(edge_in)
        if (f_edge > 0) != going_up and abs(f_edge) > tol_root:
            lo_edge, hi_edge = fam.interval()
            return NotGeneric(lo_edge, hi_edge, f_edge + 1.0,
                              "mean(p_theta) - 1 keeps one sign on the admissible interval")
        if abs(f_edge) <= tol_root:
            return edge_in
        hi = edge_in
    a, b = (lo, hi) if lo < hi else (hi, lo)
    fa = f(a)
    for _ in range(400):
        mid = 0.5 * (a + b)
        fm = f(mid)
        if abs(fm) <= tol_root and (b - a) <= 1e-12 * max(1.0, mid):
            return mid
        if (fm > 0) == (fa > 0):
            a, fa = mid, fm
        else:
            b = mid
        if b - a <= 4 * np.finfo(float).eps * max(1.0, mid):
            return mid
    return 0.5 * (a + b)
