"""Windowed additive / multiplicative decompositions and the theorem pipelines.

A target is a finite ``WindowSet``: the elements it lists are the whole
truth on ``[n0, N]`` and nothing is known outside.  A certificate (B, C) is
valid when ``B+C`` (or ``B*C``) agrees with the target on its verification
window; combined elements outside that window are ignored.

``search_decompositions`` works in the finite, exact version of the
problem: it looks for every unordered pair {B, C} with ``|B|, |C| >= 2``
whose combination equals the target's element set exactly.  Every such pair
is a valid certificate on the target window.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

from friable.errors import ArgumentError, CapacityError
from friable.psi import psi_exact
from friable.smooth_core import (
    UINT64_MAX,
    FactorTable,
    SortedIntSet,
    ThresholdLike,
    as_threshold,
    counting,
    prime_count,
)
from friable.sunit import multiplicative_pairs, smooth_pair_difference

ADDITIVE = "additive"
MULTIPLICATIVE = "multiplicative"
MODES = (ADDITIVE, MULTIPLICATIVE)

CASE1 = "CASE1"
CASE2 = "CASE2"
OUT_OF_HYPOTHESIS = "out-of-hypothesis"

# y(N) < 2^-32 log N is the hypothesis on the threshold
HYPOTHESIS_SCALE = 2.0**-32


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ArgumentError(f"mode must be one of {MODES}, got {mode!r}")


@dataclass(frozen=True)
class WindowSet:
    """A finite set known to be authoritative on ``[n0, N]``."""

    elements: SortedIntSet
    n0: int
    N: int

    def __post_init__(self):
        if not isinstance(self.elements, SortedIntSet):
            object.__setattr__(self, "elements", SortedIntSet(self.elements))
        if self.n0 > self.N:
            raise ArgumentError(f"inverted window [{self.n0}, {self.N}]")
        if self.elements and (self.elements[0] < self.n0 or self.elements[-1] > self.N):
            raise ArgumentError(f"elements fall outside the window [{self.n0}, {self.N}]")

    @classmethod
    def full(cls, elements: Iterable[int]) -> "WindowSet":
        """Window spanning exactly from the smallest to the largest element."""
        s = SortedIntSet(elements)
        if not s:
            raise ArgumentError("cannot span a window around an empty set")
        return cls(s, s[0], s[-1])

    @classmethod
    def clip(cls, elements: Iterable[int], n0: int, N: int) -> "WindowSet":
        return cls(SortedIntSet(elements).window(n0, N), n0, N)

    def to_dict(self) -> dict:
        return {"elements": list(self.elements), "n0": self.n0, "N": self.N}


@dataclass(frozen=True)
class DecompositionCertificate:
    B: SortedIntSet
    C: SortedIntSet
    mode: str
    verify_lo: int
    verify_hi: int

    def __post_init__(self):
        _check_mode(self.mode)
        for name in ("B", "C"):
            if not isinstance(getattr(self, name), SortedIntSet):
                object.__setattr__(self, name, SortedIntSet(getattr(self, name)))

    def swapped(self) -> "DecompositionCertificate":
        return DecompositionCertificate(self.C, self.B, self.mode, self.verify_lo, self.verify_hi)

    def to_dict(self) -> dict:
        return {
            "B": list(self.B),
            "C": list(self.C),
            "mode": self.mode,
            "verify_lo": self.verify_lo,
            "verify_hi": self.verify_hi,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DecompositionCertificate":
        return cls(
            SortedIntSet(data["B"]),
            SortedIntSet(data["C"]),
            data["mode"],
            int(data["verify_lo"]),
            int(data["verify_hi"]),
        )


def combine(B: Iterable[int], C: Iterable[int], mode: str) -> SortedIntSet:
    """Sumset ``B + C`` or product set ``B * C``."""
    _check_mode(mode)
    B = list(B)
    C = list(C)
    if not B or not C:
        return SortedIntSet()
    if min(B) < 0 or min(C) < 0:
        raise ArgumentError("sets must hold non-negative integers")
    if mode == ADDITIVE:
        top = max(B) + max(C)
    else:
        if min(B) == 0 or min(C) == 0:
            raise ArgumentError("multiplicative decompositions use positive integers only")
        top = max(B) * max(C)
    if top > UINT64_MAX:
        raise CapacityError(f"combined element {top} overflows 64 bits", top)
    if mode == ADDITIVE:
        return SortedIntSet({b + c for b in B for c in C})
    return SortedIntSet({b * c for b in B for c in C})


def verify_certificate(target: WindowSet, cert: DecompositionCertificate) -> bool:
    if cert.verify_lo > cert.verify_hi:
        raise ArgumentError(f"inverted verification window [{cert.verify_lo}, {cert.verify_hi}]")
    if cert.verify_lo < target.n0 or cert.verify_hi > target.N:
        raise ArgumentError(
            f"verification window [{cert.verify_lo}, {cert.verify_hi}] leaves the target "
            f"window [{target.n0}, {target.N}]"
        )
    if len(cert.B) < 2 or len(cert.C) < 2:
        return False
    combined = combine(cert.B, cert.C, cert.mode)
    lo, hi = cert.verify_lo, cert.verify_hi
    return combined.window(lo, hi) == target.elements.window(lo, hi)


# ---------------------------------------------------------------------------
# search
# ---------------------------------------------------------------------------

COMPLETE = "complete"
EXHAUSTED = "exhausted"
BUDGET_EXCEEDED = "budget-exceeded"


@dataclass(frozen=True)
class SearchLimits:
    max_nodes: int = 1_000_000
    max_set_size: int | None = None
    max_certificates: int | None = None

    def __post_init__(self):
        if self.max_nodes < 1:
            raise ArgumentError("max_nodes must be positive")
        if self.max_set_size is not None and self.max_set_size < 2:
            raise ArgumentError("max_set_size must be at least 2")
        if self.max_certificates is not None and self.max_certificates < 1:
            raise ArgumentError("max_certificates must be positive")


@dataclass
class SearchResult:
    """Outcome of a search.

    ``exhausted`` means the whole space was searched and nothing exists in
    it; ``budget-exceeded`` means the certificate list may be incomplete.
    """

    status: str
    certificates: list[DecompositionCertificate]
    nodes: int
    searched: dict = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return self.status != BUDGET_EXCEEDED

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "nodes": self.nodes,
            "searched": self.searched,
            "certificates": [c.to_dict() for c in self.certificates],
        }


class _Budget(Exception):
    pass


class _SplitSearch:
    """All exact decompositions whose B-minimum and C-minimum are fixed.

    B is grown from increasing candidates; the largest C compatible with B
    (every b + c lands in A) shrinks as B grows.  A subtree is cut when an
    element of A that no future choice can reach is still uncovered.
    """

    def __init__(self, A, mode, b1, c1, max_element, limits):
        self.A = A
        self.Aset = set(A)
        self.mul = mode == MULTIPLICATIVE
        self.b1, self.c1 = b1, c1
        self.limits = limits
        self.nodes = 0
        self.found: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
        op = self._op
        self.P = [b for b in self._quotients(c1) if b >= b1 and b <= max_element]
        self.Q = [c for c in self._quotients(b1) if c >= c1 and c <= max_element]
        assert self.P[0] == b1 and self.Q[0] == c1
        self.compat = {b: frozenset(c for c in self.Q if op(b, c) in self.Aset) for b in self.P}

    def _op(self, u, v):
        return u * v if self.mul else u + v

    def _quotients(self, d):
        if self.mul:
            return [a // d for a in self.A if a % d == 0]
        return [a - d for a in self.A if a >= d]

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.limits.max_nodes:
            raise _Budget

    def _covered_below(self, rows, cols, bound):
        # every a < bound must be some row (op) col
        op = self._op
        hits = {op(b, c) for b in rows for c in cols}
        for a in self.A:
            if a >= bound:
                return True
            if a not in hits:
                return False
        return True

    def run(self):
        self._grow_B((self.b1,), 1, self.compat[self.b1])
        return self

    def _grow_B(self, B, idx, cmax):
        self._tick()
        P, op = self.P, self._op
        nxt = op(P[idx], self.c1) if idx < len(P) else math.inf
        if len(cmax) < 2 or not self._covered_below(B, cmax, nxt):
            return
        if len(B) >= 2:
            cols = sorted(cmax)
            if self._covered_below(B, cols, math.inf):
                self._grow_C(B, cols, (self.c1,), 1)
        cap = self.limits.max_set_size
        if cap is not None and len(B) >= cap:
            return
        for i in range(idx, len(P)):
            b = P[i]
            self._grow_B(B + (b,), i + 1, cmax & self.compat[b])

    def _grow_C(self, B, cols, C, idx):
        self._tick()
        op = self._op
        nxt = op(self.b1, cols[idx]) if idx < len(cols) else math.inf
        if not self._covered_below(B, C, nxt):
            return
        if len(C) >= 2 and self._covered_below(B, C, math.inf):
            self.found.append((B, C))
            cap = self.limits.max_certificates
            if cap is not None and len(self.found) >= cap:
                raise _Budget
        size_cap = self.limits.max_set_size
        if size_cap is not None and len(C) >= size_cap:
            return
        for i in range(idx, len(cols)):
            self._grow_C(B, cols, C + (cols[i],), i + 1)


def _minimum_splits(a_min: int, mode: str) -> list[tuple[int, int]]:
    # (b1, c1) with b1 (op) c1 = a_min and b1 <= c1
    if mode == ADDITIVE:
        return [(a_min - c, c) for c in range(a_min, -1, -1) if a_min - c <= c]
    return [(a_min // c, c) for c in range(a_min, 0, -1) if a_min % c == 0 and a_min // c <= c]


def _run_split(args):
    A, mode, b1, c1, max_element, limits = args
    search = _SplitSearch(A, mode, b1, c1, max_element, limits)
    try:
        search.run()
        exceeded = False
    except _Budget:
        exceeded = True
    return search.found, search.nodes, exceeded


def search_decompositions(
    target: WindowSet,
    mode: str,
    max_element: int | None = None,
    limits: SearchLimits | None = None,
    workers: int = 1,
) -> SearchResult:
    """Find every {B, C} with B (op) C equal to the target's elements.

    Each unordered pair is reported once with ``B <= C`` lexicographically,
    ordered by ``(|B|, B, |C|, C)``.  Candidates above ``max_element`` are
    never used.  The node budget applies to each split of the smallest
    target element separately, so results do not depend on ``workers``.
    """
    _check_mode(mode)
    limits = limits or SearchLimits()
    A = tuple(target.elements)
    if not A:
        raise ArgumentError("search needs a nonempty target")
    if mode == MULTIPLICATIVE and A[0] == 0:
        raise ArgumentError("multiplicative targets must not contain 0")
    if max_element is None:
        max_element = A[-1]
    splits = _minimum_splits(A[0], mode)
    jobs = [(A, mode, b1, c1, max_element, limits) for b1, c1 in splits
            if b1 <= max_element and c1 <= max_element]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_split, jobs))
    else:
        outcomes = [_run_split(job) for job in jobs]

    canon = set()
    nodes = 0
    exceeded = False
    for found, n, ex in outcomes:
        nodes += n
        exceeded |= ex
        for B, C in found:
            canon.add((B, C) if B <= C else (C, B))
    ordered = sorted(canon, key=lambda bc: (len(bc[0]), bc[0], len(bc[1]), bc[1]))
    if limits.max_certificates is not None and len(ordered) > limits.max_certificates:
        ordered = ordered[: limits.max_certificates]
        exceeded = True
    certs = [
        DecompositionCertificate(SortedIntSet(B, presorted=True), SortedIntSet(C, presorted=True),
                                 mode, target.n0, target.N)
        for B, C in ordered
    ]
    if exceeded:
        status = BUDGET_EXCEEDED
    else:
        status = COMPLETE if certs else EXHAUSTED
    searched = {
        "semantics": "exact",
        "mode": mode,
        "target_size": len(A),
        "window": [target.n0, target.N],
        "max_element": max_element,
        "minimum_splits": len(jobs),
        "max_nodes_per_split": limits.max_nodes,
        "max_set_size": limits.max_set_size,
    }
    return SearchResult(status, certs, nodes, searched)


# ---------------------------------------------------------------------------
# growth scales
# ---------------------------------------------------------------------------


def growth_scales(A: Sequence[int], B: Sequence[int], m: int, D_max: int) -> list[int]:
    """Every D in [1, D_max] with A(mD) B(mD) < (m^2 + 1) A(D) B(D)."""
    if m < 1:
        raise ArgumentError(f"m must be >= 1, got {m}")
    A = SortedIntSet(A)
    B = SortedIntSet(B)
    factor = m * m + 1
    return [
        D
        for D in range(1, D_max + 1)
        if counting(A, m * D) * counting(B, m * D) < factor * counting(A, D) * counting(B, D)
    ]


# ---------------------------------------------------------------------------
# case split and theorem pipelines
# ---------------------------------------------------------------------------


def case_classifier(log_N: float, y_value: float) -> str:
    """CASE1 if 2 <= y <= log log N, CASE2 if log log N < y < 2^-32 log N.

    N is passed as its natural logarithm.
    """
    if not log_N > math.e:
        raise ArgumentError(f"need log N > e, got {log_N}")
    loglog = math.log(log_N)
    if y_value < 2:
        return OUT_OF_HYPOTHESIS
    if y_value <= loglog:
        return CASE1
    if y_value < HYPOTHESIS_SCALE * log_N:
        return CASE2
    return OUT_OF_HYPOTHESIS


def contradiction_threshold(s: int, m: int = 1) -> int:
    """Smallest Psi with (1/(3m)) Psi^(1/2) >= 2^(8(2s+2)), i.e. 9 m^2 4^(8(2s+2))."""
    return 9 * m * m << (2 * 8 * (2 * s + 2))


@dataclass
class PipelineReport:
    theorem: int
    y_value: float
    s: int
    N: int
    psi: int
    lhs: float
    rhs_exponent: int
    M: int
    case_label: str
    contradiction_reached: bool
    log2_lhs: float
    log2_gap: float
    bound_respected: bool
    m: int = 1
    b_values: list[int] = field(default_factory=list)
    pairs: list[tuple[int, int]] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pairs"] = [list(p) for p in self.pairs]
        return d


def _y_value(y: ThresholdLike, N: int) -> float:
    t = as_threshold(y)
    return float(t(N))


def _label(N: int, y_value: float) -> str:
    log_N = math.log(N)
    if log_N <= math.e:
        return OUT_OF_HYPOTHESIS
    return case_classifier(log_N, y_value)


def _assemble(theorem, y_value, N, m, b_values, pairs) -> PipelineReport:
    s = prime_count(y_value)
    exponent = 8 * (2 * s + 2)
    psi = psi_exact(N, y_value)
    lhs = math.sqrt(psi) / (3 * m)
    log2_lhs = 0.5 * math.log2(psi) - math.log2(3 * m) if psi else -math.inf
    M = len(b_values)
    return PipelineReport(
        theorem=theorem,
        y_value=y_value,
        s=s,
        N=N,
        psi=psi,
        lhs=lhs,
        rhs_exponent=exponent,
        M=M,
        case_label=_label(N, y_value),
        # exact: Psi^(1/2)/(3m) >= 2^E  <=>  Psi >= 9 m^2 4^E
        contradiction_reached=psi >= contradiction_threshold(s, m),
        log2_lhs=log2_lhs,
        log2_gap=exponent - log2_lhs,
        bound_respected=M <= 1 << exponent,
        m=m,
        b_values=b_values,
        pairs=pairs,
    )


def theorem1_pipeline(
    y: ThresholdLike, a1: int, a2: int, n0: int, N: int, table: FactorTable | None = None
) -> PipelineReport:
    """Both sides of (1/3) Psi(N, y)^(1/2) < 2^(8(2 pi(y) + 2)) for a hypothetical A.

    The b-set is every b in [n0 - a1, N - a2] (b >= 0) with a1 + b and
    a2 + b both y-smooth, i.e. the largest set the counting argument could
    use; M is its size.
    """
    if not 0 <= a1 < a2:
        raise ArgumentError(f"need 0 <= a1 < a2, got a1={a1}, a2={a2}")
    if n0 > N:
        raise ArgumentError(f"inverted window [{n0}, {N}]")
    if N < 1:
        raise ArgumentError("N must be positive")
    y_value = _y_value(y, N)
    lo = max(n0, a1, 1)
    b_values: list[int] = []
    pairs: list[tuple[int, int]] = []
    if lo + (a2 - a1) <= N:
        sol = smooth_pair_difference(y_value, a2 - a1, lo, N, table)
        pairs = sol.int_pairs()
        b_values = [Y - a1 for _, Y in pairs]
    return _assemble(1, y_value, N, 1, b_values, pairs)


def theorem2_pipeline(
    y: ThresholdLike,
    a1: int,
    a2: int,
    n0: int,
    N: int,
    m: int,
    table: FactorTable | None = None,
) -> PipelineReport:
    """Multiplicative analogue: M from b in (n0/a1, N/a2], lhs = Psi^(1/2)/(3m)."""
    if m < 1:
        raise ArgumentError(f"m must be >= 1, got {m}")
    if N < 1:
        raise ArgumentError("N must be positive")
    y_value = _y_value(y, N)
    mp = multiplicative_pairs(a1, a2, y_value, n0, N, table)
    return _assemble(2, y_value, N, m, mp.b_values, mp.solutions.int_pairs())
