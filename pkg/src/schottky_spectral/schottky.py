"""Schottky data, reduced words and their boundary intervals.

Letters are ``1..2N``; letter ``a <= N`` is a generator and ``a + N`` its
inverse.  A word is a plain tuple of letters.  For a word ``w`` the disk
``D_w`` is the image of ``D_{E(w)}`` under the product of all but the last
letter, and ``I_w`` is its trace on the real line.
"""

from __future__ import annotations

import json
import math
import random
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InfeasibleParameters, InputError, PoleError, ValidationError, WordError
from .moebius import INF, Disk, Mat2, RInterval, mobius_apply, pole

Word = tuple[int, ...]

BUILTIN_DATA = {
    "gamma_ex": "gamma_ex.json",
    "thick_ex": "thick_ex.json",
}

PRECISION_FLOOR = 1e-14


class PrecisionWarning(UserWarning):
    """An interval length below what double precision resolves reliably."""


# ---------------------------------------------------------------------------
# data


@dataclass(frozen=True)
class SchottkyData:
    """Generators ``gens[a-1]`` and disks ``disks[a-1]`` for letters ``a = 1..2N``."""

    N: int
    disks: tuple[Disk, ...]
    gens: tuple[Mat2, ...]

    def __post_init__(self):
        if self.N < 1:
            raise ValidationError("N must be a positive integer")
        if len(self.disks) != 2 * self.N or len(self.gens) != 2 * self.N:
            raise ValidationError(
                f"expected {2 * self.N} disks and generators, got "
                f"{len(self.disks)} and {len(self.gens)}"
            )

    @property
    def letters(self) -> range:
        return range(1, 2 * self.N + 1)

    def disk(self, a: int) -> Disk:
        return self.disks[a - 1]

    def gen(self, a: int) -> Mat2:
        return self.gens[a - 1]

    def mirror_letter(self, a: int) -> int:
        return mirror_letter(a, self.N)

    @property
    def exact(self) -> bool:
        """True when every generator entry, center and radius is rational."""
        nums = [d.center for d in self.disks] + [d.radius for d in self.disks]
        return all(g.exact for g in self.gens) and all(
            isinstance(x, (int, Fraction)) for x in nums
        )

    @property
    def integral(self) -> bool:
        return all(g.integral for g in self.gens)

    @property
    def max_boundary_length(self) -> float:
        """``L_Γ``: the longest of the basic intervals ``I_a``."""
        return float(max(2 * d.radius for d in self.disks))

    @classmethod
    def from_dict(cls, doc: dict) -> "SchottkyData":
        try:
            n = doc["N"]
            disks = tuple(Disk(_number(d["center"]), _number(d["radius"])) for d in doc["disks"])
            gens = tuple(Mat2.from_rows([[_number(x) for x in row] for row in g])
                         for g in doc["generators"])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ValidationError):
                raise
            raise InputError(f"malformed Schottky document: {exc!r}") from exc
        if not isinstance(n, int) or isinstance(n, bool):
            raise InputError("N must be an integer")
        return cls(n, disks, gens)

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "disks": [{"center": _jsonable(d.center), "radius": _jsonable(d.radius)}
                      for d in self.disks],
            "generators": [[[_jsonable(x) for x in row] for row in g.rows()] for g in self.gens],
        }


def _number(x):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InputError(f"expected a number, got {x!r}")
    if isinstance(x, float) and not math.isfinite(x):
        raise InputError("non-finite number in Schottky data")
    return x


def _jsonable(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else float(x)
    return x


def from_isometric_circles(centers: Sequence, radii: Sequence) -> SchottkyData:
    """Build data whose generator ``a`` maps the exterior of ``D(-x, r)`` onto ``D(x, r)``.

    The generator is ``(1/r) [[x, x² - r²], [1, x]]``; integer centers with
    unit radii give integral generators.
    """
    if len(centers) != len(radii):
        raise InputError("centers and radii differ in length")
    gens, disks = [], []
    for x, r in zip(centers, radii):
        if r == 1:
            gens.append(Mat2(x, x * x - 1, 1, x))
        else:
            if isinstance(x, (int, Fraction)) and isinstance(r, (int, Fraction)):
                r = Fraction(r)
            gens.append(Mat2(x / r, (x * x - r * r) / r, 1 / r, x / r))
        disks.append(Disk(x, r))
    inverses = [g.inverse() for g in gens]
    mirrored = [Disk(-d.center, d.radius) for d in disks]
    return SchottkyData(len(centers), tuple(disks + mirrored), tuple(gens + inverses))


def load_schottky(source, *, check: bool = True, tol: float = 1e-12) -> SchottkyData:
    """Load Schottky data from a JSON path or a builtin name (``gamma_ex``, ``thick_ex``)."""
    text = _read_source(source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{source}: top-level JSON value must be an object")
    data = SchottkyData.from_dict(doc)
    if check:
        validate(data, tol)
    return data


def _read_source(source) -> str:
    name = str(source)
    if name in BUILTIN_DATA:
        return resources.files("schottky_spectral.data").joinpath(BUILTIN_DATA[name]).read_text()
    try:
        return Path(source).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {source}: {exc}") from exc


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    passed: bool
    min_gap: float
    gaps: dict[str, float]
    max_boundary_residual: float
    pairing_residual: float
    orientation_ok: bool
    tol: float
    messages: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "min_gap": self.min_gap,
            "gaps": self.gaps,
            "max_boundary_residual": self.max_boundary_residual,
            "pairing_residual": self.pairing_residual,
            "orientation_ok": self.orientation_ok,
            "tol": self.tol,
            "messages": self.messages,
        }


def validate(data: SchottkyData, tol: float = 1e-12, *, samples: int = 64,
             raise_on_fail: bool = True) -> ValidationReport:
    """Check disjointness, inverse pairing and the boundary-mapping condition."""
    msgs: list[str] = []
    gaps = {}
    for i in data.letters:
        for j in data.letters:
            if i < j:
                di, dj = data.disk(i), data.disk(j)
                gaps[f"{i}-{j}"] = float(abs(di.center - dj.center) - di.radius - dj.radius)
    min_gap = min(gaps.values()) if gaps else math.inf
    for key, gap in gaps.items():
        if gap <= 0:
            msgs.append(f"closures of disks {key} intersect (gap {gap:.6g})")

    pairing = 0.0
    for a in data.letters:
        inv = data.gen(a).inverse()
        other = data.gen(data.mirror_letter(a))
        diff = max(abs(float(x - y)) for x, y in
                   zip((inv.a, inv.b, inv.c, inv.d), (other.a, other.b, other.c, other.d)))
        pairing = max(pairing, diff)
    pairing_limit = 0 if all(g.exact for g in data.gens) else tol
    if pairing > pairing_limit:
        msgs.append(f"generator pairing broken (residual {pairing:.3g})")

    theta = 2 * np.pi * np.arange(samples) / samples
    residual = 0.0
    orientation_ok = True
    for a in data.letters:
        g = data.gen(a)
        src = data.disk(data.mirror_letter(a))
        dst = data.disk(a)
        ga, gb, gc, gd = g.as_float()
        pts = float(src.center) + float(src.radius) * np.exp(1j * theta)
        with np.errstate(divide="ignore", invalid="ignore"):
            img = (ga * pts + gb) / (gc * pts + gd)
        res = np.abs(np.abs(img - float(dst.center)) - float(dst.radius))
        residual = max(residual, float(np.nan_to_num(res, nan=np.inf).max()))
        # exterior of D_ã lands inside D_a exactly when the pole sits in D_ã
        p = pole(g)
        if p is INF or not src.contains(float(p)):
            orientation_ok = False
            msgs.append(f"generator {a} does not send the exterior of disk "
                        f"{data.mirror_letter(a)} into disk {a}")
    if residual > tol:
        msgs.append(f"boundary-mapping residual {residual:.3g} exceeds {tol:.3g}")

    report = ValidationReport(
        passed=not msgs,
        min_gap=min_gap,
        gaps=gaps,
        max_boundary_residual=residual,
        pairing_residual=pairing,
        orientation_ok=orientation_ok,
        tol=tol,
        messages=msgs,
    )
    if raise_on_fail and not report.passed:
        raise ValidationError("; ".join(msgs), report)
    return report


# ---------------------------------------------------------------------------
# word algebra


def mirror_letter(a: int, N: int) -> int:
    return a + N if a <= N else a - N


def check_word(w: Sequence[int], N: int) -> Word:
    w = tuple(w)
    for a in w:
        if not (isinstance(a, int) and 1 <= a <= 2 * N):
            raise WordError(f"letter {a!r} outside 1..{2 * N}")
    if not is_reduced(w, N):
        raise WordError(f"word {w} is not reduced")
    return w


def is_reduced(w: Sequence[int], N: int) -> bool:
    return all(w[i + 1] != mirror_letter(w[i], N) for i in range(len(w) - 1))


def mirror(w: Sequence[int], N: int) -> Word:
    """Reverse the word and swap every letter with its inverse."""
    return tuple(mirror_letter(a, N) for a in reversed(w))


def concat(w1: Sequence[int], w2: Sequence[int]) -> Word:
    return tuple(w1) + tuple(w2)


def arrow(w1: Sequence[int], w2: Sequence[int], N: int) -> bool:
    """``w1 → w2``: the concatenation is reduced."""
    if not w1 or not w2:
        return True
    return w2[0] != mirror_letter(w1[-1], N)


def squiggle(w1: Sequence[int], w2: Sequence[int]) -> bool:
    """``w1 ⇝ w2``: the last letter of ``w1`` is the first letter of ``w2``."""
    return bool(w1) and bool(w2) and w1[-1] == w2[0]


def children(w: Word, N: int) -> Iterator[Word]:
    """Reduced one-letter extensions of ``w`` (all letters for the empty word)."""
    if not w:
        for a in range(1, 2 * N + 1):
            yield (a,)
        return
    banned = mirror_letter(w[-1], N)
    for a in range(1, 2 * N + 1):
        if a != banned:
            yield w + (a,)


def enumerate_words(data_or_N, m: int) -> list[Word]:
    """All reduced words of length exactly ``m`` in lexicographic order."""
    N = data_or_N.N if isinstance(data_or_N, SchottkyData) else int(data_or_N)
    if m < 0:
        raise WordError("word length must be non-negative")
    level: list[Word] = [()]
    for _ in range(m):
        level = [c for w in level for c in children(w, N)]
    return level


def random_reduced_word(rng: random.Random, N: int, length: int) -> Word:
    w: list[int] = []
    for _ in range(length):
        choices = [a for a in range(1, 2 * N + 1) if not w or a != mirror_letter(w[-1], N)]
        w.append(rng.choice(choices))
    return tuple(w)


# ---------------------------------------------------------------------------
# matrices and intervals


def gamma_of_word(data: SchottkyData, w: Sequence[int]) -> Mat2:
    w = check_word(w, data.N)
    g = Mat2.identity()
    for a in w:
        g = g @ data.gen(a)
    return g


def _image_interval(m: Mat2, iv: RInterval):
    """Image of an interval avoiding the pole, plus its length via the stable formula."""
    x, y = iv.lo, iv.hi
    p = pole(m)
    if p is not INF and x <= p <= y:
        raise PoleError("Möbius image of an interval containing the pole")
    u, v = mobius_apply(m, x), mobius_apply(m, y)
    lo, hi = (u, v) if u < v else (v, u)
    length = abs((y - x) / ((m.c * x + m.d) * (m.c * y + m.d)))
    return RInterval(lo, hi), length


def interval_of_word(data: SchottkyData, w: Sequence[int]) -> RInterval:
    """``I_w``: exact rational endpoints when the data are rational."""
    w = check_word(w, data.N)
    if not w:
        raise WordError("the empty word has no interval")
    iv, _ = _image_interval(gamma_of_word(data, w[:-1]), data.disk(w[-1]).interval)
    return iv


def interval_length(data: SchottkyData, w: Sequence[int]) -> float:
    """``|I_w|`` as a float, computed without endpoint cancellation."""
    w = check_word(w, data.N)
    if not w:
        raise WordError("the empty word has no interval")
    _, length = _image_interval(gamma_of_word(data, w[:-1]), data.disk(w[-1]).interval)
    value = float(length)
    if value < PRECISION_FLOOR and not data.exact:
        warnings.warn(f"|I_w| = {value:.3g} for a word of length {len(w)} is below "
                      f"{PRECISION_FLOOR:g}", PrecisionWarning, stacklevel=2)
    return value


def interval_length_exact(data: SchottkyData, w: Sequence[int]) -> Fraction:
    """High-precision re-evaluation: rational arithmetic on the stored values."""
    w = check_word(w, data.N)
    g = gamma_of_word(data, w[:-1])
    q = Mat2._trusted(*(Fraction(x) for x in (g.a, g.b, g.c, g.d)))
    d = data.disk(w[-1])
    iv = RInterval(Fraction(d.center) - Fraction(d.radius), Fraction(d.center) + Fraction(d.radius))
    return _image_interval(q, iv)[1]


# ---------------------------------------------------------------------------
# distortion


def distortion(g: Mat2, J: RInterval) -> float:
    """``log((p - y)/(p - x))`` with ``p = g⁻¹(∞)``; zero for affine ``g``."""
    p = pole(g)
    if p is INF:
        return 0.0
    if J.lo <= p <= J.hi:
        raise PoleError(f"pole {p} of g lies in [{J.lo}, {J.hi}]")
    return math.log(float((p - J.hi) / (p - J.lo)))


def affine_chart(J: RInterval) -> Mat2:
    """The affine map sending ``[0, 1]`` onto ``J``, normalised to determinant one."""
    length, x = float(J.length), float(J.lo)
    root = math.sqrt(length)
    return Mat2._trusted(root, x / root, 0.0, 1.0 / root)


def distortion_model(alpha: float) -> Mat2:
    """The map fixing 0 and 1 whose distortion on ``[0, 1]`` is ``alpha``."""
    up, down = math.exp(alpha / 2), math.exp(-alpha / 2)
    return Mat2._trusted(up, 0.0, up - down, down)


def distortion_decomposition_residual(data: SchottkyData, w: Sequence[int]) -> float:
    """Entrywise gap between ``γ_{w'}`` and ``± T_{I_w} g_α T_{I_E}⁻¹``."""
    w = check_word(w, data.N)
    g = gamma_of_word(data, w[:-1])
    src = data.disk(w[-1]).interval
    alpha = distortion(g, src)
    model = affine_chart(interval_of_word(data, w)) @ distortion_model(alpha) @ affine_chart(src).inverse()
    target = np.array(g.as_float())
    got = np.array(model.as_float())
    return float(min(np.abs(target - got).max(), np.abs(target + got).max()))


# ---------------------------------------------------------------------------
# B(τ) blocks and partitions


@dataclass(frozen=True)
class TauBlock:
    """Words ``w`` (length >= 2) with ``|I_{w̃}| <= τ < |I_{(w̃)'}|``.

    ``mirror_words`` holds the mirror images, which form a complete prefix
    code; ``uncovered`` lists first letters whose interval is already <= τ
    (the mirror set then fails to cover words starting there).
    """

    tau: float
    N: int
    words: tuple[Word, ...]
    mirror_words: tuple[Word, ...]
    mirror_lengths: tuple[float, ...]
    uncovered: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, w) -> bool:
        return tuple(w) in self._word_set

    @cached_property
    def _word_set(self) -> frozenset:
        return frozenset(self.words)

    @property
    def max_word_length(self) -> int:
        return max(len(w) for w in self.words)


def build_tau_block(data: SchottkyData, tau: float) -> TauBlock:
    """Depth-first search over mirror words, stopping where ``|I_u|`` first drops to τ."""
    L = data.max_boundary_length
    if not 0 < tau < L:
        raise InfeasibleParameters(f"tau must lie in (0, {L:g}), got {tau!r}")
    N = data.N
    found: list[tuple[Word, float]] = []
    uncovered = []
    stack: list[tuple[Word, Mat2]] = []
    for a in data.letters:
        if float(data.disk(a).radius) * 2 > tau:
            stack.append(((a,), data.gen(a)))
        else:
            uncovered.append(a)
    while stack:
        u, g_u = stack.pop()
        # g_u = γ_u; the child u+b has interval γ_u(I_b)
        for b in range(1, 2 * N + 1):
            if b == mirror_letter(u[-1], N):
                continue
            _, length = _image_interval(g_u, data.disk(b).interval)
            length = float(length)
            if length <= tau:
                found.append((u + (b,), length))
            else:
                stack.append((u + (b,), g_u @ data.gen(b)))
    found.sort()
    mirror_words = tuple(u for u, _ in found)
    return TauBlock(
        tau=tau,
        N=N,
        words=tuple(mirror(u, N) for u in mirror_words),
        mirror_words=mirror_words,
        mirror_lengths=tuple(length for _, length in found),
        uncovered=tuple(uncovered),
    )


def is_partition(words: Iterable[Sequence[int]], N: int) -> bool:
    """True when every long enough reduced word has exactly one prefix in ``words``."""
    S = {tuple(w) for w in words}
    if not S or () in S:
        return False
    prefixes = {w[:i] for w in S for i in range(len(w))}
    if S & prefixes:
        return False
    return all(c in S or c in prefixes for p in prefixes for c in children(p, N))


def count_prefixes_in(w: Sequence[int], words) -> int:
    S = words if isinstance(words, (set, frozenset)) else {tuple(x) for x in words}
    return sum(tuple(w[:i]) in S for i in range(1, len(w) + 1))


def count_suffixes_in(w: Sequence[int], words) -> int:
    S = words if isinstance(words, (set, frozenset)) else {tuple(x) for x in words}
    return sum(tuple(w[i:]) in S for i in range(len(w)))


def partition_sum(data: SchottkyData, P: Iterable[Sequence[int]], s: float) -> float:
    """``Σ_{w∈P} |I_w|^s`` over a partition ``P``."""
    P = [tuple(w) for w in P]
    if not is_partition(P, data.N):
        raise WordError("partition_sum needs a partition (complete prefix code)")
    return float(sum(interval_length(data, w) ** s for w in P))


# ---------------------------------------------------------------------------
# lemma audit


@dataclass
class RatioBand:
    lo: float
    hi: float

    @property
    def spread(self) -> float:
        return self.hi / self.lo

    def to_dict(self) -> dict:
        return {"min": self.lo, "max": self.hi, "max_over_min": self.spread}


@dataclass
class LemmaAudit:
    max_len: int
    word_count: int
    nesting_ok: bool
    contraction: float
    concatenation: RatioBand
    mirror: RatioBand
    norm_length: RatioBand
    tau_grid: list[float]
    block_sizes: list[int]
    block_slope: float
    block_intercept: float
    word_length_min: list[int]
    word_length_max: list[int]
    envelope_C: float
    envelope_A: float
    block_length_band: RatioBand

    def to_dict(self) -> dict:
        return {
            "max_len": self.max_len,
            "word_count": self.word_count,
            "nesting_ok": self.nesting_ok,
            "contraction": self.contraction,
            "concatenation": self.concatenation.to_dict(),
            "mirror": self.mirror.to_dict(),
            "norm_length": self.norm_length.to_dict(),
            "tau_block": {
                "tau": self.tau_grid,
                "size": self.block_sizes,
                "fitted_exponent": self.block_slope,
                "fitted_intercept": self.block_intercept,
                "word_length_min": self.word_length_min,
                "word_length_max": self.word_length_max,
                "envelope_C": self.envelope_C,
                "envelope_A": self.envelope_A,
                "length_over_tau": self.block_length_band.to_dict(),
            },
        }


@dataclass
class WordTable:
    """All reduced words up to a length with exact matrices and interval data."""

    words: list[Word]
    matrices: dict[Word, Mat2]
    intervals: dict[Word, RInterval]
    lengths: dict[Word, float]


def word_table(data: SchottkyData, max_len: int) -> WordTable:
    N = data.N
    matrices: dict[Word, Mat2] = {(): Mat2.identity()}
    intervals: dict[Word, RInterval] = {}
    lengths: dict[Word, float] = {}
    words: list[Word] = []
    level: list[Word] = [()]
    for _ in range(max_len):
        nxt = []
        for u in level:
            g_u = matrices[u]
            for w in children(u, N):
                iv, length = _image_interval(g_u, data.disk(w[-1]).interval)
                intervals[w] = iv
                lengths[w] = float(length)
                matrices[w] = g_u @ data.gen(w[-1])
                nxt.append(w)
        words.extend(nxt)
        level = nxt
    return WordTable(words, matrices, intervals, lengths)


DEFAULT_TAU_GRID = (0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001)


def audit_lemmas(data: SchottkyData, max_len: int,
                 tau_grid: Sequence[float] = DEFAULT_TAU_GRID) -> LemmaAudit:
    """Empirical constants behind the interval-length estimates."""
    if max_len < 3:
        raise InfeasibleParameters("max_len must be at least 3")
    N = data.N
    table = word_table(data, max_len)
    lengths = table.lengths

    nesting_ok = all(
        table.intervals[(w[0],)].contains_interval(table.intervals[w])
        for w in table.words if len(w) >= 2
    )
    contraction = max(lengths[w] / lengths[w[:-1]] for w in table.words if len(w) >= 2)

    concat_lo = mirror_lo = norm_lo = math.inf
    concat_hi = mirror_hi = norm_hi = 0.0
    for w in table.words:
        lw = lengths[w]
        for i in range(1, len(w)):
            r = lw / (lengths[w[:i]] * lengths[w[i:]])
            concat_lo, concat_hi = min(concat_lo, r), max(concat_hi, r)
        r = lengths[mirror(w, N)] / lw
        mirror_lo, mirror_hi = min(mirror_lo, r), max(mirror_hi, r)
        r = float(table.matrices[w].norm_squared()) * lw
        norm_lo, norm_hi = min(norm_lo, r), max(norm_hi, r)

    taus = [t for t in tau_grid if 0 < t < data.max_boundary_length]
    sizes, len_min, len_max = [], [], []
    band_lo, band_hi = math.inf, 0.0
    for tau in taus:
        block = build_tau_block(data, tau)
        sizes.append(len(block))
        wl = [len(w) for w in block.words]
        len_min.append(min(wl))
        len_max.append(max(wl))
        for w, lm in zip(block.words, block.mirror_lengths):
            for length in (interval_length(data, w), lm):
                band_lo, band_hi = min(band_lo, length / tau), max(band_hi, length / tau)

    slope = intercept = float("nan")
    env_C = env_A = float("nan")
    if len(taus) >= 2:
        x = np.log(1 / np.asarray(taus))
        slope, intercept = np.polyfit(x, np.log(sizes), 1)
        upper_slope, _ = np.polyfit(x, np.asarray(len_max, float), 1)
        lower_C = max(x[i] / len_min[i] for i in range(len(taus)))
        env_C = float(max(lower_C, upper_slope, 1.0))
        env_A = float(max(len_max[i] - env_C * x[i] for i in range(len(taus))))

    return LemmaAudit(
        max_len=max_len,
        word_count=len(table.words),
        nesting_ok=nesting_ok,
        contraction=contraction,
        concatenation=RatioBand(concat_lo, concat_hi),
        mirror=RatioBand(mirror_lo, mirror_hi),
        norm_length=RatioBand(norm_lo, norm_hi),
        tau_grid=taus,
        block_sizes=sizes,
        block_slope=float(slope),
        block_intercept=float(intercept),
        word_length_min=len_min,
        word_length_max=len_max,
        envelope_C=env_C,
        envelope_A=env_A,
        block_length_band=RatioBand(band_lo, band_hi),
    )


def fit_block_exponent(data: SchottkyData, taus: Sequence[float]) -> tuple[float, list[int]]:
    """Least-squares slope of ``log #B(τ)`` against ``log(1/τ)``."""
    sizes = [len(build_tau_block(data, t)) for t in taus]
    slope, _ = np.polyfit(np.log(1 / np.asarray(taus)), np.log(sizes), 1)
    return float(slope), sizes
