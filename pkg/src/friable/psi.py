"""Exact and asymptotic evaluation of Psi(x, y) = #{n <= x : p+(n) <= y}.

Exact values come from the Buchstab recursion

    Psi(x, p_k) = Psi(x, p_{k-1}) + Psi(floor(x / p_k), p_k),

either one value at a time (``psi_exact``, memoised on ``(floor(x), k)``)
or one whole row ``x = 0..X`` at a time (``psi_rows``).
"""

from __future__ import annotations

import bisect
import math
import threading
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from friable.errors import ArgumentError, CapacityError
from friable.smooth_core import prime_count, primes_upto

# Beyond this x the scalar recursion is only attempted for tiny prime sets.
PSI_EXACT_MAX_X = 10**12
_SMALL_PRIME_SET = 4
_MEMO_MAX_ENTRIES = 4_000_000
_PRIME_LIST_CAP = 10**8
# rows of Psi(x, p_k) over k are cached for x up to this size
_ROW_CACHE_MAX_X = 1 << 20


@dataclass(frozen=True)
class PsiValue:
    x: int
    y: float
    count: int


@dataclass(frozen=True)
class DeBruijnReport:
    x: int
    y: float
    count: int
    Z: float
    log_psi: float
    ratio: float

    def to_dict(self) -> dict:
        return asdict(self)


def psi_base2(x: int) -> int:
    """Psi(x, 2) = floor(log2 x) + 1, via the bit length (no floating point)."""
    x = int(x)
    if x < 1:
        return 0
    return x.bit_length()


class _BuchstabMemo:
    def __init__(self):
        self.primes: list[int] = []
        self.prime_array = np.zeros(0, dtype=np.int64)
        self.limit = 1
        self.memo: dict[tuple[int, int], int] = {}
        self.lock = threading.Lock()

    def prime_index(self, y: int) -> int:
        """pi(y), growing the shared prime list geometrically when needed."""
        if y > self.limit:
            with self.lock:
                if y > self.limit:
                    limit = max(y, min(2 * self.limit, _PRIME_LIST_CAP), 1024)
                    arr = primes_upto(limit)
                    self.prime_array = arr
                    self.primes = arr.tolist()
                    self.limit = limit
        return bisect.bisect_right(self.primes, y)

    def large_prime_tail(self, x: int, k: int) -> int:
        """Psi(x, p_k) for p_k > sqrt(x).

        Every n <= x with p+(n) = p > sqrt(x) is p * m with m <= x // p < p,
        so each such prime adds exactly x // p.
        """
        r = bisect.bisect_right(self.primes, math.isqrt(x))
        base = self.psi(x, r)
        return base + int((x // self.prime_array[r:k]).sum())

    def psi(self, v: int, k: int) -> int:
        # count of n <= v whose prime factors are among the first k primes
        if v <= 1:
            return v
        if k == 0:
            return 1
        if k == 1:
            return v.bit_length()
        primes = self.primes
        if primes[k - 1] >= v:
            return v
        memo = self.memo
        hit = memo.get((v, k))
        if hit is not None:
            return hit
        # walk down the first argument chain iteratively; recursion only on
        # the quotient branch, which at least halves v
        pending = []
        j = k
        while True:
            if j == 1:
                acc = v.bit_length()
                break
            hit = memo.get((v, j))
            if hit is not None:
                acc = hit
                break
            pending.append(j)
            j -= 1
        for j in reversed(pending):
            p = primes[j - 1]
            q = v // p
            acc += q if p >= q else self.psi(q, j)
            memo[(v, j)] = acc
        if len(memo) > _MEMO_MAX_ENTRIES:
            memo.clear()
        return acc


_memo = _BuchstabMemo()


def _cutoff(y: float) -> int:
    if math.isnan(y):
        raise ArgumentError("y is NaN")
    return math.floor(y) if y >= 0 else -1


@lru_cache(maxsize=64)
def _tail_row(x: int) -> tuple[int, list[int]]:
    # (r, row) with row[j - r] = Psi(x, p_j) for r <= j <= pi(x), r = pi(sqrt x)
    _memo.prime_index(x)
    r = bisect.bisect_right(_memo.primes, math.isqrt(x))
    K = bisect.bisect_right(_memo.primes, x)
    terms = x // _memo.prime_array[r:K]
    row = [_memo.psi(x, r)]
    row.extend((row[0] + np.cumsum(terms)).tolist())
    return r, row


def psi_exact(x: int, y: float) -> int:
    """Exact Psi(x, y) with the convention p+(1) = 1.

    ``x = 0`` gives 0.  Depends on y only through the prime cutoff pi(y).
    """
    if type(x) is not int:
        x = int(math.floor(x))
    if x < 1:
        return 0
    ycut = y if type(y) is int else _cutoff(y)
    if ycut >= x:
        return x
    if ycut < 2:
        return 1
    if ycut == 2:
        return psi_base2(x)
    memo = _memo
    if ycut > memo.limit:
        memo.prime_index(ycut)
    k = bisect.bisect_right(memo.primes, ycut)
    if x > PSI_EXACT_MAX_X and k > _SMALL_PRIME_SET:
        raise CapacityError(f"psi_exact infeasible for x={x} with pi(y)={k}", x)
    if ycut * ycut > x:
        if x <= _ROW_CACHE_MAX_X:
            r, row = _tail_row(x)
            return row[k - r]
        return memo.large_prime_tail(x, k)
    return _memo.psi(x, k)


def psi_feasible(x: int, y: float) -> bool:
    return x <= PSI_EXACT_MAX_X or y < 2 or y >= x or prime_count(min(y, 10**7)) <= _SMALL_PRIME_SET


def buchstab_row(previous: np.ndarray, p: int) -> np.ndarray:
    """Given Psi(x, q) for x = 0..X (q the prime before p), return Psi(x, p).

    Positions are filled block by block over [p^j, p^(j+1)), because
    floor(x / p) of a block lands in the already completed block before it.
    """
    X = previous.size - 1
    row = previous.copy()
    lo = p
    while lo <= X:
        hi = min(lo * p, X + 1)
        row[lo:hi] += row[np.arange(lo, hi) // p]
        lo = hi
    return row


def psi_rows(X: int, y_max: float) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(p, row)`` for every prime p <= y_max, row[x] = Psi(x, p), x = 0..X.

    The first yield is ``(1, row)`` for the cutoff below 2 (only n = 1 counts).
    Rows are yielded as read-only views; copy before mutating.
    """
    row = np.ones(X + 1, dtype=np.int64)
    row[0] = 0
    row.flags.writeable = False
    yield 1, row
    for p in primes_upto(math.floor(y_max)).tolist():
        row = buchstab_row(row, p)
        row.flags.writeable = False
        yield p, row


def psi_row(X: int, y: float) -> np.ndarray:
    """Psi(x, y) for all x = 0..X at once."""
    row = None
    for _, row in psi_rows(X, y):
        pass
    return row


def debruijn_Z(x: float, y: float, *, log_x: float | None = None) -> float:
    """Main term Z(x, y) of de Bruijn's estimate log Psi(x, y) ~ Z.

    For astronomically large x pass ``log_x`` instead (x is then ignored).
    """
    lx = math.log(x) if log_x is None else float(log_x)
    if not y >= 2 or lx < math.log(y) - 1e-12:
        raise ArgumentError(f"de Bruijn's Z needs x >= y >= 2, got log x={lx}, y={y}")
    ly = math.log(y)
    return lx / ly * math.log1p(y / lx) + y / ly * math.log1p(lx / y)


def debruijn_ratio(x: int, y: float) -> DeBruijnReport:
    """Compare log Psi(x, y) (exact) against Z(x, y)."""
    x = int(x)
    if not x >= y >= 2:
        raise ArgumentError(f"debruijn_ratio needs x >= y >= 2, got x={x}, y={y}")
    if not psi_feasible(x, y):
        raise CapacityError(f"psi_exact infeasible at x={x}, y={y}", x)
    count = psi_exact(x, y)
    z = debruijn_Z(x, y)
    log_psi = math.log(count)
    return DeBruijnReport(x=x, y=y, count=count, Z=z, log_psi=log_psi, ratio=log_psi / z)
