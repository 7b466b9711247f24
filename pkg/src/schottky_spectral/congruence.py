"""Principal congruence subgroups, coset permutations and lattice counting.

Membership in the level-n subgroup is always decided on exact integer
matrices; the reduced images are only used to index cosets.
"""

from __future__ import annotations

import math
import os
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import EnumerationCapError, InfeasibleParameters
from .moebius import Mat2
from .schottky import SchottkyData, TauBlock, Word, build_tau_block, gamma_of_word, interval_length

Residue = tuple[int, int, int, int]

DEFAULT_COUNT_CAP = 200.0


def _mul_mod(x: Residue, y: Residue, n: int) -> Residue:
    a, b, c, d = x
    e, f, g, h = y
    return ((a * e + b * g) % n, (a * f + b * h) % n, (c * e + d * g) % n, (c * f + d * h) % n)


def _inv_mod(x: Residue, n: int) -> Residue:
    a, b, c, d = x
    return (d % n, -b % n, -c % n, a % n)


def factorize(n: int) -> dict[int, int]:
    if n < 1:
        raise InfeasibleParameters("factorize needs n >= 1")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def sl2_order(n: int) -> int:
    """``#SL(2, Z/n) = ∏ p^{3a-2}(p²-1)`` over ``p^a || n``."""
    order = 1
    for p, a in factorize(n).items():
        order *= p ** (3 * a - 2) * (p * p - 1)
    return order


def sl2_order_bruteforce(n: int) -> int:
    return sum(
        1
        for a in range(n) for b in range(n) for c in range(n) for d in range(n)
        if (a * d - b * c) % n == 1 % n
    )


@dataclass
class CongruenceContext:
    """Image of the group in ``SL(2, Z/n)`` with a coset indexing.

    ``elements[i]`` is a residue ``(a, b, c, d)`` mod ``n``; coset ``i`` of
    the level-n subgroup corresponds to that element.
    """

    n: int
    elements: list[Residue]
    index_of: dict[Residue, int]
    surjective: bool
    _perm_cache: dict[Residue, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def index(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> Residue:
        return (1 % self.n, 0, 0, 1 % self.n)

    def residue(self, m: Mat2) -> Residue:
        if self.n == 1:
            return (0, 0, 0, 0)
        return m.mod(self.n)

    def right_permutation(self, m: Mat2) -> np.ndarray:
        """Permutation ``x -> x · m̄`` on coset indices."""
        key = self.residue(m)
        perm = self._perm_cache.get(key)
        if perm is None:
            if self.n == 1:
                perm = np.zeros(1, dtype=np.intp)
            else:
                perm = np.array([self.index_of[_mul_mod(x, key, self.n)] for x in self.elements],
                                dtype=np.intp)
            self._perm_cache[key] = perm
        return perm

    def is_closed(self) -> bool:
        S = set(self.elements)
        if self.n == 1:
            return True
        return all(_mul_mod(x, y, self.n) in S for x in S for y in S) and all(
            _inv_mod(x, self.n) in S for x in S
        )


def build_context(data: SchottkyData, n: int) -> CongruenceContext:
    """Breadth-first closure of the generator images mod ``n``."""
    if not isinstance(n, int) or n < 1:
        raise InfeasibleParameters(f"modulus must be a positive integer, got {n!r}")
    if n == 1:
        return CongruenceContext(1, [(0, 0, 0, 0)], {(0, 0, 0, 0): 0}, True)
    if not data.integral:
        raise InfeasibleParameters("congruence subgroups need integral generators")
    gens = [g.mod(n) for g in data.gens]
    start = (1 % n, 0, 0, 1 % n)
    seen = {start: 0}
    elements = [start]
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = _mul_mod(x, g, n)
            if y not in seen:
                seen[y] = len(elements)
                elements.append(y)
                queue.append(y)
    return CongruenceContext(n, elements, seen, len(elements) == sl2_order(n))


def in_gamma_n(ctx: CongruenceContext, m: Mat2) -> bool:
    """True when every entry of ``m - I`` is divisible by ``n``."""
    if not m.integral:
        raise InfeasibleParameters("membership test needs an integral matrix")
    n = ctx.n
    return (m.a - 1) % n == 0 and m.b % n == 0 and m.c % n == 0 and (m.d - 1) % n == 0


def trace_sigma(ctx: CongruenceContext, m: Mat2) -> int:
    """Trace of the coset permutation representation at ``m``."""
    return ctx.index if in_gamma_n(ctx, m) else 0


# ---------------------------------------------------------------------------
# lattice-point counting


def count_cap() -> float:
    return float(os.environ.get("SCHOTTKY_SPECTRAL_COUNT_CAP", DEFAULT_COUNT_CAP))


def count_Nn(n: int, R: float, cap: float | None = None) -> tuple[int, list[tuple[int, int, int, int]]]:
    """Integral ``m ≡ I mod n`` with ``det m = 1``, ``bc ≠ 0`` and ``‖m‖ <= R``.

    Loops over ``(a, d, b)`` and solves ``c = (ad - 1)/b``.  Returns the
    count and the witness list ``(a, b, c, d)``.
    """
    if n < 1:
        raise InfeasibleParameters("n must be >= 1")
    if not R > 1:
        raise InfeasibleParameters("R must exceed 1")
    cap = count_cap() if cap is None else cap
    if R > cap:
        raise EnumerationCapError(f"R = {R} exceeds the enumeration cap {cap}")
    K = int(math.floor(R))
    R2 = R * R
    witnesses = []
    diag = [x for x in range(-K, K + 1) if (x - 1) % n == 0]
    offdiag = [x for x in range(-K, K + 1) if x != 0 and x % n == 0]
    for a in diag:
        for d in diag:
            rest = R2 - a * a - d * d
            if rest < 2:
                continue
            ad1 = a * d - 1
            if ad1 == 0:
                continue
            for b in offdiag:
                if ad1 % b:
                    continue
                c = ad1 // b
                if c % n == 0 and b * b + c * c <= rest:
                    witnesses.append((a, b, c, d))
    return len(witnesses), witnesses


def count_Nn_bruteforce(n: int, R: float) -> int:
    """Independent oracle over all four entries."""
    K = int(math.floor(R))
    rng = range(-K, K + 1)
    return sum(
        1
        for a in rng for b in rng for c in rng for d in rng
        if a * d - b * c == 1 and b * c != 0
        and (a - 1) % n == 0 and b % n == 0 and c % n == 0 and (d - 1) % n == 0
        and a * a + b * b + c * c + d * d <= R * R
    )


def counting_bound_shape(n: int, R: float, eps: float = 0.1) -> float:
    return (R / n) ** eps * (R * R / n**3 + R / n + 1)


def divisor_count(k: int) -> int:
    """Number of divisors of ``k`` counted with both signs."""
    if k == 0:
        raise InfeasibleParameters("divisor_count(0) is undefined")
    count = 1
    for _, a in factorize(abs(k)).items():
        count *= a + 1
    return 2 * count


def omega(n: int) -> int:
    """Number of distinct prime factors."""
    return len(factorize(n))


def new_eig_threshold(n: int) -> Fraction:
    """``n / 3^{ω(n)}``."""
    return Fraction(n, 3 ** omega(n))


# ---------------------------------------------------------------------------
# pair audit


@dataclass(frozen=True)
class PairDecomposition:
    prefix: Word
    middle1: Word
    middle2: Word
    suffix: Word
    bucket: tuple[int, int]


@dataclass
class PairAudit:
    tau: float
    n: int
    block_size: int
    pairs: list[tuple[Word, Word]]
    diagonal: int
    decompositions: dict[tuple[Word, Word], PairDecomposition]
    buckets: dict[tuple[int, int], int]
    bucket_constant: float
    size_bound_ratio: float
    eps: float

    @property
    def size(self) -> int:
        return len(self.pairs)

    def bucket_rows(self) -> list[tuple[int, int, int, float]]:
        return [(a, c, k, 2.0 ** (a + c) * self.n * self.tau)
                for (a, c), k in sorted(self.buckets.items())]

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "n": self.n,
            "block_size": self.block_size,
            "pair_count": self.size,
            "diagonal_pairs": self.diagonal,
            "offdiagonal_pairs": self.size - self.diagonal,
            "buckets": [{"a": a, "c": c, "count": k, "scaled": v}
                        for a, c, k, v in self.bucket_rows()],
            "bucket_constant": self.bucket_constant,
            "size_bound_ratio": self.size_bound_ratio,
            "eps": self.eps,
        }


def decompose_pair(w1: Word, w2: Word) -> tuple[Word, Word, Word, Word]:
    """Split ``w1 = A B1 C``, ``w2 = A B2 C`` with maximal nonempty ``A`` and ``C``.

    Maximality makes the middles start (and end) with different letters,
    an empty middle counting as different from any letter.
    """
    if w1 == w2 or w1[0] != w2[0] or w1[-1] != w2[-1]:
        raise InfeasibleParameters("decomposition needs distinct words with equal ends")
    short = min(len(w1), len(w2))
    i = 0
    while i < short - 1 and w1[i] == w2[i]:
        i += 1
    j = 0
    while j < short - i and w1[len(w1) - 1 - j] == w2[len(w2) - 1 - j]:
        j += 1
    A, C = w1[:i], w1[len(w1) - j:]
    return A, w1[i:len(w1) - j], w2[i:len(w2) - j], C


def _bucket_index(length: float, G: float) -> int:
    # the a with 2^{-(a+1)} <= length/G < 2^{-a}
    x = length / G
    a = max(0, math.ceil(-math.log2(x)) - 1)
    while x < 2.0 ** -(a + 1):
        a += 1
    while a > 0 and x >= 2.0 ** -a:
        a -= 1
    return a


def size_bound_rhs(tau: float, n: int, delta: float, eps: float = 0.1) -> float:
    """Shape of the pair-count bound with its constant set to one."""
    L = math.log(1 / tau)
    return L**5 * (tau ** -(2 + eps) / n ** (3 + eps) + tau ** -(1 + eps) / n ** (1 + eps)) + tau**-delta


def audit_ptau(data: SchottkyData, ctx: CongruenceContext, tau: float, *,
               delta: float | None = None, eps: float = 0.1,
               block: TauBlock | None = None) -> PairAudit:
    """Enumerate pairs of block words with equal ends whose quotient is in the level-n subgroup."""
    if not 0 < tau < min(1.0, data.max_boundary_length):
        raise InfeasibleParameters(f"tau must lie in (0, min(1, L)), got {tau}")
    block = build_tau_block(data, tau) if block is None else block
    words = list(block.words)
    mats = {w: gamma_of_word(data, w) for w in words}
    groups: dict[tuple[int, int], list[Word]] = defaultdict(list)
    for w in words:
        groups[(w[0], w[-1])].append(w)

    G = 2 * data.max_boundary_length
    pairs = []
    decomps = {}
    buckets: dict[tuple[int, int], int] = defaultdict(int)
    diagonal = 0
    lengths: dict[Word, float] = {}
    for group in groups.values():
        for w1 in group:
            for w2 in group:
                q = mats[w1] @ mats[w2].inverse()
                if not in_gamma_n(ctx, q):
                    continue
                pairs.append((w1, w2))
                if w1 == w2:
                    diagonal += 1
                    continue
                A, B1, B2, C = decompose_pair(w1, w2)
                for part in (A, C):
                    if part not in lengths:
                        lengths[part] = interval_length(data, part)
                key = (_bucket_index(lengths[A], G), _bucket_index(lengths[C], G))
                decomps[(w1, w2)] = PairDecomposition(A, B1, B2, C, key)
                buckets[key] += 1

    H = max((2.0 ** (a + c) * ctx.n * tau for a, c in buckets), default=0.0)
    if delta is None:
        from .spectral import estimate_delta

        delta = estimate_delta(data)
    ratio = len(pairs) / size_bound_rhs(tau, ctx.n, delta, eps)
    return PairAudit(
        tau=tau,
        n=ctx.n,
        block_size=len(words),
        pairs=pairs,
        diagonal=diagonal,
        decompositions=decomps,
        buckets=dict(buckets),
        bucket_constant=H,
        size_bound_ratio=ratio,
        eps=eps,
    )


def min_offdiagonal_norm_squared(witnesses: Sequence[tuple[int, int, int, int]]) -> int | None:
    return min((a * a + b * b + c * c + d * d for a, b, c, d in witnesses), default=None)
