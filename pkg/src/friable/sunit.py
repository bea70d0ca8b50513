"""S-units, bounded solving of U*X + V*Y = 1, and the Beukers-Schlickewei count.

Solutions are always accepted in exact rational arithmetic (``Fraction``).
Enumeration is exhaustive only over an exponent box ``|e_i| <= bound``;
nothing is claimed about solutions outside the box.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Sequence

import numpy as np

from friable.errors import ArgumentError, CapacityError, RangeError
from friable.smooth_core import (
    FactorTable,
    as_threshold,
    build_factor_table,
    is_prime,
    primes_upto,
)

POSITIVE = "positive-integers"
SIGNED = "signed-rationals"
DOMAINS = (POSITIVE, SIGNED)

DEFAULT_ENUMERATION_BUDGET = 2_000_000


@dataclass(frozen=True)
class PrimeSet:
    primes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "primes", tuple(int(p) for p in self.primes))
        for p in self.primes:
            if not is_prime(p):
                raise ArgumentError(f"{p} is not prime")
        for a, b in zip(self.primes, self.primes[1:]):
            if a >= b:
                raise ArgumentError("primes must be strictly increasing")

    @classmethod
    def upto(cls, y: float) -> "PrimeSet":
        """All primes <= y."""
        return cls(tuple(primes_upto(math.floor(y)).tolist()) if y >= 2 else ())

    @property
    def s(self) -> int:
        return len(self.primes)

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes)


def _split(n: int, primes: Sequence[int]) -> tuple[list[int], int]:
    exps = []
    for p in primes:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        exps.append(e)
    return exps, n


@dataclass(frozen=True, order=False)
class SUnit:
    """``sign * prod(p_i ** e_i)`` over a fixed prime set."""

    sign: int
    exponents: tuple[int, ...]
    primes: tuple[int, ...] = field(repr=False)

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ArgumentError(f"sign must be +1 or -1, got {self.sign}")
        if len(self.exponents) != len(self.primes):
            raise ArgumentError("exponent vector length does not match the prime set")

    @property
    def value(self) -> Fraction:
        num, den = 1, 1
        for p, e in zip(self.primes, self.exponents):
            if e > 0:
                num *= p**e
            elif e < 0:
                den *= p ** (-e)
        return Fraction(self.sign * num, den)

    @classmethod
    def from_value(cls, q, S: PrimeSet | Sequence[int]) -> "SUnit":
        """Inverse of ``value``; raises if q is not an S-unit."""
        primes = tuple(S.primes if isinstance(S, PrimeSet) else S)
        q = Fraction(q)
        if q == 0:
            raise ArgumentError("0 is not an S-unit")
        num_e, num_rest = _split(abs(q.numerator), primes)
        den_e, den_rest = _split(q.denominator, primes)
        if num_rest != 1 or den_rest != 1:
            raise ArgumentError(f"{q} is not an S-unit for S={primes}")
        exps = tuple(a - b for a, b in zip(num_e, den_e))
        return cls(1 if q > 0 else -1, exps, primes)

    def height(self) -> int:
        return max((abs(e) for e in self.exponents), default=0)

    def to_dict(self) -> dict:
        v = self.value
        return {
            "sign": self.sign,
            "exponents": list(self.exponents),
            "numerator": v.numerator,
            "denominator": v.denominator,
        }


@dataclass(frozen=True)
class SUnitEquation:
    """U*X + V*Y = 1."""

    U: Fraction
    V: Fraction

    def __post_init__(self):
        object.__setattr__(self, "U", Fraction(self.U))
        object.__setattr__(self, "V", Fraction(self.V))
        if self.U == 0 or self.V == 0:
            raise ArgumentError("S-unit equation needs U*V != 0")

    def holds(self, X, Y) -> bool:
        return self.U * Fraction(X) + self.V * Fraction(Y) == 1

    def solve_for_Y(self, X) -> Fraction:
        return (1 - self.U * Fraction(X)) / self.V

    def to_dict(self) -> dict:
        return {"U": str(self.U), "V": str(self.V)}


@dataclass
class SolutionList:
    equation: SUnitEquation
    S: PrimeSet
    domain: str
    bound: int | None
    solutions: list[tuple[SUnit, SUnit]]
    window: tuple[int, int] | None = None

    @property
    def M(self) -> int:
        return len(self.solutions)

    def values(self) -> list[tuple[Fraction, Fraction]]:
        return [(x.value, y.value) for x, y in self.solutions]

    def int_pairs(self) -> list[tuple[int, int]]:
        out = []
        for x, y in self.values():
            if x.denominator != 1 or y.denominator != 1:
                raise ArgumentError("solution list holds non-integer values")
            out.append((x.numerator, y.numerator))
        return out

    def verify(self) -> bool:
        """Re-check every pair by substitution and that no pair repeats."""
        vals = self.values()
        return len(set(vals)) == len(vals) and all(self.equation.holds(x, y) for x, y in vals)

    def to_dict(self) -> dict:
        return {
            "equation": self.equation.to_dict(),
            "S": list(self.S.primes),
            "domain": self.domain,
            "bound": self.bound,
            "window": list(self.window) if self.window else None,
            "M": self.M,
            "solutions": [{"X": x.to_dict(), "Y": y.to_dict()} for x, y in self.solutions],
        }


@dataclass(frozen=True)
class CertificationReport:
    M: int
    s: int
    bound_exponent: int
    certified: bool

    def to_dict(self) -> dict:
        return {
            "M": self.M,
            "s": self.s,
            "bound_exponent": self.bound_exponent,
            "certified": self.certified,
        }


# ---------------------------------------------------------------------------
# the count bound
# ---------------------------------------------------------------------------


def bs_exponent(s: int) -> int:
    """Base-2 exponent 8(2s + 2) of the solution-count bound."""
    s = int(s)
    if s < 1:
        raise ArgumentError("the bound is stated for a nonempty prime set (s >= 1)")
    return 8 * (2 * s + 2)


def bs_bound(s: int) -> int:
    """Upper bound 2^(8(2s+2)) on the number of solutions of U X + V Y = 1."""
    return 1 << bs_exponent(s)


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def _check_domain(domain: str) -> None:
    if domain not in DOMAINS:
        raise ArgumentError(f"domain must be one of {DOMAINS}, got {domain!r}")


def count_sunits(s: int, bound: int, domain: str) -> int:
    _check_domain(domain)
    if domain == POSITIVE:
        return (bound + 1) ** s
    return 2 * (2 * bound + 1) ** s


def enumerate_sunits(
    S: PrimeSet,
    exponent_bound: int,
    domain: str = SIGNED,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> list[SUnit]:
    """Every S-unit with all ``|e_i| <= exponent_bound``, sorted by value.

    For ``positive-integers`` the sign is +1 and every exponent is >= 0.
    """
    if exponent_bound < 0:
        raise ArgumentError("exponent bound must be non-negative")
    total = count_sunits(S.s, exponent_bound, domain)
    if total > budget:
        raise CapacityError(f"enumeration would generate {total} S-units (budget {budget})", total)
    lo = 0 if domain == POSITIVE else -exponent_bound
    signs = (1,) if domain == POSITIVE else (1, -1)
    box = range(lo, exponent_bound + 1)
    units = [
        SUnit(sign, exps, S.primes)
        for sign in signs
        for exps in itertools.product(box, repeat=S.s)
    ]
    units.sort(key=lambda u: u.value)
    return units


_INT64_SAFE = 1 << 62


class _UnitBox:
    """Units of one exponent box as parallel int64 arrays plus a sorted key index."""

    def __init__(self, units: list[SUnit]):
        self.units = units
        values = [u.value for u in units]
        self.max_num = max(abs(v.numerator) for v in values)
        self.max_den = max(v.denominator for v in values)
        self.radix = self.max_den + 1
        # int64 arrays exist only when every key fits; callers check `vectorised`
        self.vectorised = (self.max_num + 1) * self.radix < _INT64_SAFE
        if self.vectorised:
            self.num = np.array([v.numerator for v in values], dtype=np.int64)
            self.den = np.array([v.denominator for v in values], dtype=np.int64)
            keys = self.num * self.radix + self.den
            self.order = np.argsort(keys)
            self.keys = keys[self.order]

    def lookup(self, num: np.ndarray, den: np.ndarray) -> np.ndarray:
        """Index of the unit num/den (reduced, den > 0) or -1."""
        inside = (np.abs(num) <= self.max_num) & (den <= self.max_den) & (num != 0)
        keys = np.where(inside, num * self.radix + den, 0)
        pos = np.searchsorted(self.keys, keys)
        pos = np.minimum(pos, self.keys.size - 1)
        hit = inside & (self.keys[pos] == keys)
        return np.where(hit, self.order[pos], -1)


@lru_cache(maxsize=64)
def _unit_box(primes: tuple[int, ...], bound: int, domain: str, budget: int) -> _UnitBox:
    return _UnitBox(enumerate_sunits(PrimeSet(primes), bound, domain, budget))


def enumerate_solutions(
    eq: SUnitEquation,
    S: PrimeSet,
    exponent_bound: int,
    domain: str = SIGNED,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> SolutionList:
    """All (X, Y) in the exponent box with U X + V Y = 1.

    Each candidate X fixes Y = (1 - U X) / V exactly; Y is accepted iff it
    is itself a unit of the box.  Solutions come out sorted by X.
    """
    count_sunits(S.s, exponent_bound, domain)
    box = _unit_box(S.primes, exponent_bound, domain, budget)
    un, ud = eq.U.numerator, eq.U.denominator
    vn, vd = eq.V.numerator, eq.V.denominator
    top = (abs(ud) * box.max_den + abs(un) * box.max_num) * vd
    if box.vectorised and max(top, ud * box.max_den * abs(vn)) < _INT64_SAFE:
        # Y = (ud*xd - un*xn) * vd / (ud*xd*vn), reduced with den > 0
        num = (ud * box.den - un * box.num) * vd
        den = ud * box.den * vn
        flip = np.where(den < 0, -1, 1)
        num, den = num * flip, den * flip
        g = np.gcd(num, den)
        g[g == 0] = 1
        idx = box.lookup(num // g, den // g)
        pairs = [(box.units[i], box.units[j]) for i, j in zip(np.flatnonzero(idx >= 0), idx[idx >= 0])]
    else:
        by_value = {u.value: u for u in box.units}
        pairs = []
        for x in box.units:
            y = by_value.get(eq.solve_for_Y(x.value))
            if y is not None:
                pairs.append((x, y))
    out = SolutionList(eq, S, domain, exponent_bound, pairs)
    assert out.verify()
    return out


# ---------------------------------------------------------------------------
# windowed integer instances
# ---------------------------------------------------------------------------


def _smooth_mask(table: FactorTable, lo: int, hi: int, y: float) -> np.ndarray:
    return table.segment(lo, hi) <= y


def _table_for(hi: int, table: FactorTable | None) -> FactorTable:
    if table is None:
        return build_factor_table(max(hi, 1))
    if hi > table.limit:
        raise RangeError(f"window top {hi} exceeds factor table limit {table.limit}")
    return table


def _cutoff_value(y) -> float:
    t = as_threshold(y)
    if t.kind != "constant":
        raise ArgumentError("windowed S-unit instances use a fixed cutoff y")
    return float(t.param)


def smooth_pair_difference(
    y: float, d: int, lo: int, hi: int, table: FactorTable | None = None
) -> SolutionList:
    """All (X, Y) with X - Y = d, both y-smooth, and lo <= Y < X <= hi.

    This is the equation (1/d) X - (1/d) Y = 1 over integers in a window,
    sorted by Y.
    """
    if d < 1:
        raise ArgumentError(f"difference must be positive, got d={d}")
    if lo < 1:
        raise ArgumentError(f"window must start at 1 or later, got lo={lo}")
    if lo > hi:
        raise ArgumentError(f"inverted window [{lo}, {hi}]")
    cut = _cutoff_value(y)
    table = _table_for(hi, table)
    S = PrimeSet.upto(cut)
    eq = SUnitEquation(Fraction(1, d), Fraction(-1, d))
    solutions = []
    if hi - d >= lo:
        mask = _smooth_mask(table, lo, hi, cut)
        ys = np.flatnonzero(mask[: mask.size - d] & mask[d:]) + lo
        for Y in ys.tolist():
            solutions.append((SUnit.from_value(Y + d, S), SUnit.from_value(Y, S)))
    out = SolutionList(eq, S, POSITIVE, None, solutions, window=(lo, hi))
    assert out.verify()
    return out


@dataclass
class MultiplicativePairs:
    b_values: list[int]
    solutions: SolutionList

    @property
    def M(self) -> int:
        return len(self.b_values)


def multiplicative_pairs(
    a1: int,
    a2: int,
    y: float,
    n0: int,
    N: int,
    table: FactorTable | None = None,
) -> MultiplicativePairs:
    """All b in (n0/a1, N/a2] with a1*b - 1 and a2*b - 1 both y-smooth.

    Each b gives the solution X = a1 b - 1, Y = a2 b - 1 of
    a2/(a1-a2) X - a1/(a1-a2) Y = 1.
    """
    if not 1 <= a1 < a2:
        raise ArgumentError(f"need 1 <= a1 < a2, got a1={a1}, a2={a2}")
    if n0 < 1:
        raise ArgumentError(f"need n0 >= 1, got {n0}")
    cut = _cutoff_value(y)
    b_lo = n0 // a1 + 1
    b_hi = N // a2
    S = PrimeSet.upto(cut)
    eq = SUnitEquation(Fraction(a2, a1 - a2), Fraction(-a1, a1 - a2))
    bs: list[int] = []
    solutions = []
    if b_lo <= b_hi:
        top = a2 * b_hi - 1
        table = _table_for(top, table)
        gpf = table.gpf
        b = np.arange(b_lo, b_hi + 1, dtype=np.int64)
        ok = (gpf[a1 * b - 1] <= cut) & (gpf[a2 * b - 1] <= cut)
        bs = b[ok].tolist()
        for bv in bs:
            solutions.append((SUnit.from_value(a1 * bv - 1, S), SUnit.from_value(a2 * bv - 1, S)))
    sol = SolutionList(eq, S, POSITIVE, None, solutions, window=(n0, N))
    assert sol.verify()
    return MultiplicativePairs(bs, sol)


def certify_count(sol: SolutionList) -> CertificationReport:
    """Check M <= 2^(8(2s+2)).  A failure would mean an enumeration bug."""
    s = sol.S.s
    exponent = 8 * (2 * s + 2)
    return CertificationReport(M=sol.M, s=s, bound_exponent=exponent, certified=sol.M <= 1 << exponent)

