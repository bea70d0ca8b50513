"""Smooth (friable) numbers: factor tables, thresholds, windows and counts.

Conventions used throughout the package:

* ``p+(1) = 1`` so that 1 is smooth for every threshold.
* Set membership evaluates the threshold per element, ``p+(n) <= y(n)``.
  Code that needs one fixed cutoff for a whole window (the theorem
  pipelines) passes a plain number, which is treated as ``constant(y)``.
"""

from __future__ import annotations

import bisect
import json
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from friable.errors import ArgumentError, CapacityError, RangeError

UINT64_MAX = (1 << 64) - 1

# uint32 entries: 4 bytes per integer in the table
DEFAULT_MEMORY_BUDGET = 1 << 30
_PRIME_SIEVE_LIMIT = 10**8
_PRIME_COUNT_LIMIT = 10**12


# ---------------------------------------------------------------------------
# primes
# ---------------------------------------------------------------------------

_prime_lock = threading.Lock()
_prime_cache: np.ndarray = np.array([], dtype=np.int64)
_prime_cache_limit = 1


def _sieve(n: int) -> np.ndarray:
    if n < 2:
        return np.array([], dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, isqrt(n) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def primes_upto(n: int) -> np.ndarray:
    """All primes ``<= n`` as an int64 array (cached, grows on demand)."""
    global _prime_cache, _prime_cache_limit
    n = int(n)
    if n > _PRIME_SIEVE_LIMIT:
        raise CapacityError(f"prime sieve limited to {_PRIME_SIEVE_LIMIT}, asked for {n}", n)
    if n > _prime_cache_limit:
        with _prime_lock:
            if n > _prime_cache_limit:
                limit = max(n, 2 * _prime_cache_limit, 1024)
                limit = min(limit, _PRIME_SIEVE_LIMIT)
                _prime_cache = _sieve(limit)
                _prime_cache_limit = limit
    cache = _prime_cache
    return cache[: int(np.searchsorted(cache, n, side="right"))]


def is_prime(n: int) -> bool:
    """Deterministic trial division; meant for the small primes of an S-set."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def _lucy_prime_count(n: int) -> int:
    # Lucy_Hedgehog's O(n^(3/4)) recurrence over the values n // i.
    r = isqrt(n)
    values = [n // i for i in range(1, r + 1)]
    values += list(range(values[-1] - 1, 0, -1))
    count = {v: v - 1 for v in values}
    for p in range(2, r + 1):
        if count[p] > count[p - 1]:
            below = count[p - 1]
            p2 = p * p
            for v in values:
                if v < p2:
                    break
                count[v] -= count[v // p] - below
    return count[n]


def prime_count(y: float) -> int:
    """pi(y): the number of primes ``<= y``."""
    if y < 0 or math.isnan(y):
        raise ArgumentError(f"prime_count needs y >= 0, got {y}")
    n = math.floor(y)
    if n < 2:
        return 0
    if n <= _PRIME_SIEVE_LIMIT // 10:
        return int(primes_upto(n).size)
    if n > _PRIME_COUNT_LIMIT:
        raise CapacityError(f"prime_count limited to y <= {_PRIME_COUNT_LIMIT}", n)
    return _lucy_prime_count(n)


# ---------------------------------------------------------------------------
# greatest prime factor table
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FactorTable:
    """Greatest prime factor of every integer in ``[1, limit]``.

    ``gpf[0]`` is an unused placeholder (0); ``gpf[1] == 1``.  The array is
    made read-only after construction so a table can be shared freely.
    """

    limit: int
    gpf: np.ndarray

    def __getitem__(self, n: int) -> int:
        return greatest_prime_factor(n, self)

    def __len__(self) -> int:
        return self.limit

    def segment(self, lo: int, hi: int) -> np.ndarray:
        """View of ``gpf[lo..hi]`` (inclusive)."""
        if not 1 <= lo <= hi + 1 or hi > self.limit:
            raise RangeError(f"segment [{lo}, {hi}] outside table [1, {self.limit}]")
        return self.gpf[lo : hi + 1]


def build_factor_table(N: int, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> FactorTable:
    """Sieve the greatest prime factor of every n in ``[1, N]``.

    Primes are visited in increasing order and each one overwrites its
    multiples, so the last writer at position n is the largest prime
    dividing n.
    """
    N = int(N)
    if N < 1:
        raise CapacityError(f"factor table needs N >= 1, got {N}", N)
    if 4 * (N + 1) > memory_budget or N > 2**32 - 1:
        raise CapacityError(
            f"factor table for N={N} needs {4 * (N + 1)} bytes, budget is {memory_budget}", N
        )
    gpf = np.zeros(N + 1, dtype=np.uint32)
    gpf[1] = 1
    primes = _sieve(N)
    half = N // 2
    for p in primes:
        p = int(p)
        if p > half:
            break
        gpf[p::p] = p
    # primes above N/2 have no other multiple inside the table
    big = primes[primes > half]
    gpf[big] = big
    gpf.flags.writeable = False
    return FactorTable(limit=N, gpf=gpf)


def gpf_trial(n: int) -> int:
    """Greatest prime factor by trial division (fallback when no table fits)."""
    if n < 1:
        raise RangeError(f"greatest prime factor undefined for n={n}")
    largest = 1
    while n % 2 == 0:
        largest = 2
        n //= 2
    d = 3
    while d * d <= n:
        while n % d == 0:
            largest = d
            n //= d
        d += 2
    return n if n > 1 else largest


def greatest_prime_factor(n: int, table: FactorTable | None = None) -> int:
    """p+(n), with p+(1) = 1.  Without a table falls back to trial division."""
    n = int(n)
    if table is None:
        return gpf_trial(n)
    if not 1 <= n <= table.limit:
        raise RangeError(f"n={n} outside factor table [1, {table.limit}]")
    return int(table.gpf[n])


# ---------------------------------------------------------------------------
# thresholds
# ---------------------------------------------------------------------------

_TIE_RTOL = 1e-9


@dataclass(frozen=True)
class SmoothnessThreshold:
    """A monotone increasing cutoff ``y(n)``.

    kind is ``"constant"`` (y = param), ``"log_scaled"`` (y = param * ln n)
    or ``"power"`` (y = n ** param).
    """

    kind: str
    param: float

    def __post_init__(self):
        if self.kind not in ("constant", "log_scaled", "power"):
            raise ArgumentError(f"unknown threshold kind {self.kind!r}")
        if not self.param > 0 or math.isinf(self.param):
            raise ArgumentError(f"threshold parameter must be positive and finite, got {self.param}")

    @classmethod
    def constant(cls, y0: float) -> "SmoothnessThreshold":
        return cls("constant", y0)

    @classmethod
    def log_scaled(cls, c: float) -> "SmoothnessThreshold":
        return cls("log_scaled", c)

    @classmethod
    def power(cls, eps: float) -> "SmoothnessThreshold":
        return cls("power", eps)

    @classmethod
    def parse(cls, text: str) -> "SmoothnessThreshold":
        """Parse ``"5"``, ``"constant:5"``, ``"log:0.5"`` or ``"power:0.25"``."""
        kind, _, value = text.partition(":")
        if not value:
            kind, value = "constant", kind
        kind = {"const": "constant", "log": "log_scaled"}.get(kind, kind)
        try:
            return cls(kind, float(Fraction(value)))
        except (ValueError, ZeroDivisionError) as exc:
            raise ArgumentError(f"bad threshold {text!r}") from exc

    def __call__(self, n: float) -> float:
        if self.kind == "constant":
            return float(self.param)
        if self.kind == "log_scaled":
            return self.param * math.log(n)
        return float(n) ** self.param

    def values(self, ns: np.ndarray) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.float64)
        if self.kind == "constant":
            return np.full(ns.shape, float(self.param))
        if self.kind == "log_scaled":
            return self.param * np.log(ns)
        return ns**self.param

    def admits(self, p: int, n: int) -> bool:
        """Whether ``p <= y(n)``; exact at near-ties for rational powers."""
        if n == 1:
            return True
        y = self(n)
        if self.kind == "power" and abs(y - p) <= _TIE_RTOL * max(1.0, p):
            return self._power_tie(p, n)
        return p <= y

    def admits_many(self, gpf: np.ndarray, ns: np.ndarray) -> np.ndarray:
        gpf = np.asarray(gpf)
        ns = np.asarray(ns)
        if self.kind == "constant":
            mask = gpf <= self.param
        else:
            y = self.values(ns)
            mask = gpf <= y
            if self.kind == "power":
                near = np.flatnonzero(np.abs(y - gpf) <= _TIE_RTOL * np.maximum(1.0, gpf))
                for i in near:
                    mask[i] = self._power_tie(int(gpf[i]), int(ns[i]))
        return mask | (ns == 1)

    def _power_tie(self, p: int, n: int) -> bool:
        frac = Fraction(self.param).limit_denominator(64)
        if abs(float(frac) - self.param) > 1e-15:
            return p <= self(n)
        return p**frac.denominator <= n**frac.numerator

    def describe(self) -> str:
        short = {"constant": "constant", "log_scaled": "log", "power": "power"}[self.kind]
        return f"{short}:{self.param:g}"


ThresholdLike = Union[SmoothnessThreshold, float, int]


def as_threshold(y: ThresholdLike) -> SmoothnessThreshold:
    if isinstance(y, SmoothnessThreshold):
        return y
    return SmoothnessThreshold.constant(float(y))


# ---------------------------------------------------------------------------
# sorted integer sets
# ---------------------------------------------------------------------------


class SortedIntSet(Sequence[int]):
    """Immutable strictly increasing sequence of non-negative 64-bit integers."""

    __slots__ = ("_items",)

    def __init__(self, elements: Iterable[int] = (), *, presorted: bool = False):
        if presorted:
            items = tuple(int(e) for e in elements)
            for a, b in zip(items, items[1:]):
                if a >= b:
                    raise ArgumentError("elements are not strictly increasing")
        else:
            items = tuple(sorted({int(e) for e in elements}))
        if items and items[0] < 0:
            raise ArgumentError(f"negative element {items[0]}")
        if items and items[-1] > UINT64_MAX:
            raise CapacityError(f"element {items[-1]} exceeds 64-bit range", items[-1])
        self._items = items

    @property
    def elements(self) -> tuple[int, ...]:
        return self._items

    def __len__(self) -> int:
        return len(self._items)

    def __getitem__(self, i):
        return self._items[i]

    def __iter__(self) -> Iterator[int]:
        return iter(self._items)

    def __contains__(self, x) -> bool:
        i = bisect.bisect_left(self._items, x)
        return i < len(self._items) and self._items[i] == x

    def __eq__(self, other) -> bool:
        if isinstance(other, SortedIntSet):
            return self._items == other._items
        if isinstance(other, (set, frozenset)):
            return set(self._items) == other
        if isinstance(other, (tuple, list)):
            return self._items == tuple(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._items)

    def __lt__(self, other: "SortedIntSet") -> bool:
        return self._items < other._items

    def __repr__(self) -> str:
        if len(self._items) > 12:
            head = ", ".join(map(str, self._items[:6]))
            return f"SortedIntSet([{head}, ...] n={len(self._items)})"
        return f"SortedIntSet({list(self._items)})"

    def window(self, lo: int, hi: int) -> "SortedIntSet":
        i = bisect.bisect_left(self._items, lo)
        j = bisect.bisect_right(self._items, hi)
        return SortedIntSet(self._items[i:j], presorted=True)

    def to_json(self) -> str:
        return json.dumps(list(self._items))

    @classmethod
    def from_json(cls, text: str) -> "SortedIntSet":
        data = json.loads(text)
        if not isinstance(data, list) or not all(isinstance(v, int) for v in data):
            raise ArgumentError("expected a JSON array of integers")
        return cls(data, presorted=True)

    def to_text(self) -> str:
        return "".join(f"{v}\n" for v in self._items)

    @classmethod
    def from_text(cls, text: str) -> "SortedIntSet":
        try:
            return cls((int(tok) for tok in text.split()), presorted=True)
        except ValueError as exc:
            raise ArgumentError(f"bad integer list: {exc}") from exc


# ---------------------------------------------------------------------------
# smoothness queries
# ---------------------------------------------------------------------------


def is_smooth(n: int, y: ThresholdLike, table: FactorTable | None = None) -> bool:
    """True iff p+(n) <= y(n)."""
    return as_threshold(y).admits(greatest_prime_factor(n, table), int(n))


def friable_window(
    y: ThresholdLike, lo: int, hi: int, table: FactorTable | None = None
) -> SortedIntSet:
    """The y-smooth integers in ``[lo, hi]``."""
    threshold = as_threshold(y)
    if lo < 1:
        raise ArgumentError(f"window must start at 1 or later, got lo={lo}")
    if lo > hi:
        raise ArgumentError(f"inverted window [{lo}, {hi}]")
    ns = np.arange(lo, hi + 1, dtype=np.int64)
    if table is None:
        gpf = np.fromiter((gpf_trial(int(n)) for n in ns), dtype=np.int64, count=ns.size)
    else:
        if hi > table.limit:
            raise RangeError(f"window [{lo}, {hi}] exceeds factor table limit {table.limit}")
        gpf = table.segment(lo, hi)
    mask = threshold.admits_many(gpf, ns)
    return SortedIntSet(ns[mask].tolist(), presorted=True)


def shifted_friable_window(
    y: ThresholdLike, lo: int, hi: int, table: FactorTable | None = None
) -> SortedIntSet:
    """``(F_y + 1) ∩ [lo, hi]``: integers m in the window with m - 1 smooth."""
    if lo > hi:
        raise ArgumentError(f"inverted window [{lo}, {hi}]")
    if hi < 2:
        return SortedIntSet()
    base = friable_window(y, max(lo - 1, 1), hi - 1, table)
    return SortedIntSet((f + 1 for f in base), presorted=True)


def counting(elements: Sequence[int], X: float) -> int:
    """A(X) = #{a in A : a <= X} by binary search on a sorted sequence."""
    if isinstance(elements, SortedIntSet):
        elements = elements.elements
    return bisect.bisect_right(elements, X)
