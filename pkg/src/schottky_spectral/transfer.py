"""Transfer operators on Bergman spaces of the Schottky disks.

An operator is given by a word set ``B``: on the disk of letter ``b`` it acts
by

    (L f)(z) = Σ_{w ∈ B, E(w) = b} c_w(z)^s σ(γ_{w'}⁻¹) f(γ_{w'} z),

where ``c_w = γ_{w'}'`` and ``f(γ_{w'} z)`` is read on the disk of ``S(w)``.
The classical operator is the case ``B = W₂`` (all reduced two-letter words).

Functions on a disk ``D(c, r)`` are expanded in the orthonormal monomials
``φ_k(z) = sqrt((k+1)/π) (z-c)^k / r^{k+1}``; matrix columns are obtained by
sampling the image on the circle of relative radius ``rho`` and taking a
discrete Fourier transform.
"""

from __future__ import annotations

import cmath
import math
import os
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .congruence import CongruenceContext, build_context, trace_sigma
from .errors import BranchCutError, InfeasibleParameters, NumericalError, PoleError, WordError
from .moebius import Disk, Mat2, translation_length
from .schottky import (
    SchottkyData,
    Word,
    build_tau_block,
    enumerate_words,
    gamma_of_word,
    mirror_letter,
)

DEFAULT_M = 24
DEFAULT_RHO = 0.75
DEFAULT_MAX_DIM = 20000


def max_dimension() -> int:
    return int(os.environ.get("SCHOTTKY_SPECTRAL_MAX_DIM", DEFAULT_MAX_DIM))


# ---------------------------------------------------------------------------
# scalar helpers


def power_s(z: complex, s: complex) -> complex:
    """``exp(s Log z)`` with the principal logarithm."""
    z = complex(z)
    if z.imag == 0 and z.real <= 0:
        raise BranchCutError(f"z = {z} lies on the branch cut (-inf, 0]")
    return cmath.exp(s * cmath.log(z))


def bergman_kernel(D: Disk, w: complex, z: complex) -> complex:
    """Reproducing kernel of the Bergman space of ``D``."""
    c, r = float(D.center), float(D.radius)
    if abs(w - c) >= r or abs(z - c) >= r:
        raise InfeasibleParameters("Bergman kernel evaluated outside its disk")
    return r * r / (math.pi * (r * r - (w - c) * np.conj(z - c)) ** 2)


def _bergman_kernel_array(c: float, r: float, w, z):
    return r * r / (np.pi * (r * r - (w - c) * np.conj(z - c)) ** 2)


def disk_quadrature(D: Disk, n_radial: int, n_angular: int):
    """Gauss-Legendre in the radius times the trapezoid rule in the angle."""
    x, wx = np.polynomial.legendre.leggauss(n_radial)
    rho = 0.5 * (x + 1)
    w_rho = 0.5 * wx
    theta = 2 * np.pi * np.arange(n_angular) / n_angular
    c, r = float(D.center), float(D.radius)
    pts = c + r * np.outer(rho, np.exp(1j * theta))
    weights = np.outer(w_rho * rho, np.full(n_angular, 2 * np.pi / n_angular)) * r * r
    return pts.ravel(), weights.ravel()


@dataclass(frozen=True)
class BergmanBasis:
    """Orthonormal monomials of degree ``0..M`` on each disk."""

    disks: tuple[Disk, ...]
    M: int

    def evaluate(self, disk: int, k: int, z):
        D = self.disks[disk]
        c, r = float(D.center), float(D.radius)
        return math.sqrt((k + 1) / math.pi) * (np.asarray(z) - c) ** k / r ** (k + 1)

    def coefficients_of_constant(self, value: complex = 1.0) -> np.ndarray:
        """Coefficient vector of the function equal to ``value`` on every disk."""
        out = np.zeros((len(self.disks), self.M + 1), dtype=complex)
        for i, D in enumerate(self.disks):
            out[i, 0] = value * math.sqrt(math.pi) * float(D.radius)
        return out.ravel()


# ---------------------------------------------------------------------------
# representations


@dataclass(frozen=True)
class RepDescriptor:
    """Trivial representation or the coset permutation representation mod ``n``."""

    kind: str
    ctx: CongruenceContext | None = None

    @classmethod
    def trivial(cls) -> "RepDescriptor":
        return cls("trivial")

    @classmethod
    def regular(cls, ctx: CongruenceContext) -> "RepDescriptor":
        return cls("regular", ctx)

    @property
    def dimension(self) -> int:
        return 1 if self.kind == "trivial" else self.ctx.index

    def describe(self) -> dict:
        if self.kind == "trivial":
            return {"kind": "trivial", "dimension": 1}
        return {"kind": "regular", "n": self.ctx.n, "dimension": self.ctx.index}


# ---------------------------------------------------------------------------
# assembly


def classical_words(data: SchottkyData) -> list[Word]:
    """The two-letter words indexing the single moves ``a ≠ b̃``."""
    return enumerate_words(data, 2)


@dataclass
class TransferMatrix:
    matrix: np.ndarray
    metadata: dict

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def block(self, target: int, source: int) -> np.ndarray:
        """Sub-matrix mapping the disk of letter ``source`` into that of ``target``."""
        size = self.metadata["block_size"]
        t, s = (target - 1) * size, (source - 1) * size
        return self.matrix[t:t + size, s:s + size]


class TransferFamily:
    """Precomputed geometry for ``L_{B,s,σ}`` so that many ``s`` are cheap.

    Only the weights ``c_w(z)^s`` depend on ``s``; the sample points, the
    images ``γ_{w'}(z)`` and the coset permutations are computed once.
    """

    def __init__(self, data: SchottkyData, words: Sequence[Sequence[int]],
                 rep: RepDescriptor | None = None, M: int = DEFAULT_M,
                 rho: float = DEFAULT_RHO, quad_points: int | None = None):
        rep = rep or RepDescriptor.trivial()
        if M < 4:
            raise InfeasibleParameters("basis cutoff M must be at least 4")
        if not 0 < rho < 1:
            raise InfeasibleParameters("rho must lie in (0, 1)")
        self.data = data
        self.rep = rep
        self.M = M
        self.rho = rho
        self.Q = quad_points or 4 * (M + 1)
        N = data.N
        self.disk_count = 2 * N
        self.block_size = (M + 1) * rep.dimension
        self.dimension = self.disk_count * self.block_size
        if self.dimension > max_dimension():
            raise InfeasibleParameters(
                f"matrix dimension {self.dimension} exceeds SCHOTTKY_SPECTRAL_MAX_DIM={max_dimension()}")
        words = [tuple(w) for w in words]
        for w in words:
            if len(w) < 2:
                raise WordError(f"transfer words need length >= 2, got {w}")
        self.words = words

        theta = 2 * np.pi * np.arange(self.Q) / self.Q
        circle = np.exp(1j * theta)
        k = np.arange(M + 1)
        W = len(words)
        self.log_weight = np.zeros((W, self.Q), dtype=complex)
        self.powers = np.zeros((W, self.Q, M + 1), dtype=complex)
        self.target = np.zeros(W, dtype=np.intp)
        self.source = np.zeros(W, dtype=np.intp)
        self.scale = np.zeros(W)
        prefix_mats = []
        for i, w in enumerate(words):
            src, tgt = w[0], w[-1]
            g = gamma_of_word(data, w[:-1])
            prefix_mats.append(g)
            Dt, Ds = data.disk(tgt), data.disk(src)
            ct, rt = float(Dt.center), float(Dt.radius)
            cs, rs = float(Ds.center), float(Ds.radius)
            z = ct + rho * rt * circle
            self.log_weight[i] = _log_derivative(g, z, w)
            ga, gb, gc, gd = g.as_float()
            u = ((ga * z + gb) / (gc * z + gd) - cs) / rs
            if np.max(np.abs(u)) >= 1:
                raise NumericalError(f"image of the sampling circle escapes disk {src} for word {w}")
            self.powers[i] = u[:, None] ** k[None, :]
            self.target[i] = tgt - 1
            self.source[i] = src - 1
            self.scale[i] = rt / rs
        self.prefix_mats = prefix_mats
        self.degree_scale = np.sqrt((k[None, :] + 1) / (k[:, None] + 1)) / (rho ** k)[:, None]

        # group words sharing (target, source, coset permutation)
        groups: dict[tuple, list[int]] = {}
        self.perms: list[np.ndarray | None] = []
        for i, g in enumerate(prefix_mats):
            if rep.kind == "regular":
                perm = rep.ctx.right_permutation(g)
                key = (self.target[i], self.source[i], perm.tobytes())
            else:
                perm = None
                key = (self.target[i], self.source[i])
            self.perms.append(perm)
            groups.setdefault(key, []).append(i)
        self.groups = list(groups.values())

    def metadata(self, s) -> dict:
        return {
            "s": [float(np.real(s)), float(np.imag(s))],
            "word_count": len(self.words),
            "max_word_length": max((len(w) for w in self.words), default=0),
            "rep": self.rep.describe(),
            "M": self.M,
            "rho": self.rho,
            "quad_points": self.Q,
            "disk_count": self.disk_count,
            "block_size": self.block_size,
            "dimension": self.dimension,
        }

    def kernels(self, s: complex) -> np.ndarray:
        """Per-word coefficient blocks ``K_w[j, k]``."""
        if not self.words:
            return np.zeros((0, self.M + 1, self.M + 1), dtype=complex)
        weights = np.exp(s * self.log_weight)
        coef = np.fft.fft(weights[:, :, None] * self.powers, axis=1) / self.Q
        coef = coef[:, : self.M + 1, :]
        return coef * self.degree_scale[None, :, :] * self.scale[:, None, None]

    def matrix(self, s: complex) -> np.ndarray:
        K = self.kernels(s)
        m1 = self.M + 1
        I = self.rep.dimension
        T = np.zeros((self.dimension, self.dimension), dtype=complex)
        for idx in self.groups:
            first = idx[0]
            t, src = self.target[first], self.source[first]
            block = K[idx].sum(axis=0)
            rows = slice(t * self.block_size, (t + 1) * self.block_size)
            cols = slice(src * self.block_size, (src + 1) * self.block_size)
            if I == 1:
                T[rows, cols] += block
            else:
                P = np.zeros((I, I))
                perm = self.perms[first]
                P[perm, np.arange(I)] = 1.0
                T[rows, cols] += np.kron(block, P)
        assert T.shape == (self.disk_count * m1 * I,) * 2
        return T

    def assemble(self, s: complex) -> TransferMatrix:
        return TransferMatrix(self.matrix(s), self.metadata(s))


def _log_derivative(g: Mat2, z: np.ndarray, w) -> np.ndarray:
    """Principal ``Log(1/(cz+d)^2)``, guarding against the branch cut."""
    _, _, c, d = g.as_float()
    den = c * z + d
    # ±den stays in the right half-plane for valid data, so its square never
    # reaches the negative axis
    sign = 1.0 if np.real(den).mean() >= 0 else -1.0
    den = sign * den
    bad = np.real(den) <= 0
    if bad.any():
        z0 = z[np.argmax(bad)]
        raise BranchCutError(f"c_w(z) meets the branch cut for word {w} at z = {z0}")
    return -2.0 * np.log(den)


def assemble(data: SchottkyData, B: Sequence[Sequence[int]] | str, s: complex,
             rep: RepDescriptor | None = None, M: int = DEFAULT_M,
             rho: float = DEFAULT_RHO) -> TransferMatrix:
    """Matrix of ``L_{B,s,σ}``; ``B = "classical"`` selects the single-move operator."""
    words = classical_words(data) if isinstance(B, str) and B == "classical" else B
    return TransferFamily(data, words, rep, M, rho).assemble(s)


def _as_array(T) -> np.ndarray:
    return T.matrix if isinstance(T, TransferMatrix) else np.asarray(T)


def fredholm_logdet(T) -> tuple[complex, float]:
    """``(phase, log|det(I - T)|)`` from a pivoted LU factorization."""
    A = _as_array(T)
    sign, logabs = np.linalg.slogdet(np.eye(A.shape[0]) - A)
    return complex(sign), float(logabs)


def fredholm_det(T) -> complex:
    """``det(I - T)``; raises instead of overflowing."""
    sign, logabs = fredholm_logdet(T)
    if logabs > 700:
        raise NumericalError(f"det(I - T) overflows (log|det| = {logabs:.1f})")
    if logabs == -np.inf:
        return 0j
    return sign * math.exp(logabs)


# ---------------------------------------------------------------------------
# zeta functions


class ClassicalDeterminant:
    """``s -> det(I - L_s)`` for the classical operator (optionally twisted)."""

    def __init__(self, data: SchottkyData, M: int = DEFAULT_M, rep: RepDescriptor | None = None,
                 rho: float = DEFAULT_RHO):
        self.family = TransferFamily(data, classical_words(data), rep, M, rho)

    def __call__(self, s: complex) -> complex:
        return fredholm_det(self.family.matrix(s))


class ZetaTauN:
    """``s -> det(I - L²)`` with ``L`` the block operator of ``B(τ)`` twisted mod ``n``."""

    def __init__(self, data: SchottkyData, ctx: CongruenceContext, tau: float,
                 M: int = DEFAULT_M, rho: float = DEFAULT_RHO):
        self.tau = tau
        self.ctx = ctx
        self.block = build_tau_block(data, tau)
        self.family = TransferFamily(data, self.block.words, RepDescriptor.regular(ctx), M, rho)

    def operator(self, s: complex) -> np.ndarray:
        return self.family.matrix(s)

    def logdet(self, s: complex) -> tuple[complex, float]:
        # det(I - L²) = det(I - L)·det(I + L): two LU factorizations, no product
        L = self.family.matrix(s)
        minus_phase, minus_log = fredholm_logdet(L)
        plus_phase, plus_log = fredholm_logdet(-L)
        return minus_phase * plus_phase, minus_log + plus_log

    def log_abs(self, s: complex) -> float:
        return self.logdet(s)[1]

    def __call__(self, s: complex) -> complex:
        phase, logabs = self.logdet(s)
        if logabs > 700:
            raise NumericalError(f"det(I - L²) overflows (log|det| = {logabs:.1f})")
        if logabs == -np.inf:
            return 0j
        return phase * math.exp(logabs)

    def squared_route(self, s: complex) -> complex:
        """``det(I - L²)`` from the explicit square, kept as an independent check."""
        L = self.family.matrix(s)
        return fredholm_det(L @ L)

    def linear_factor(self, s: complex) -> complex:
        """``det(I - L)``, the factor carrying the eigenvalue-forced zeros."""
        return fredholm_det(self.family.matrix(s))


def zeta_tau_n(data: SchottkyData, ctx: CongruenceContext, tau: float, s: complex,
               M: int = DEFAULT_M) -> complex:
    return ZetaTauN(data, ctx, tau, M)(s)


# ---------------------------------------------------------------------------
# Hilbert-Schmidt norms


@dataclass
class HSNorm:
    formula: float
    frobenius: float
    quadrature_error: float

    @property
    def relative_gap(self) -> float:
        return abs(self.formula - self.frobenius) / max(self.formula, self.frobenius)


def hs_norm_formula(data: SchottkyData, words: Sequence[Sequence[int]], s: complex,
                    ctx: CongruenceContext | None = None, *, n_radial: int = 24,
                    n_angular: int = 48, pair_filter=None) -> float:
    """Squared HS norm from the double sum over word pairs with equal ends.

    Pairs are weighted by the trace of the coset representation (the index
    when the prefix quotient lies in the level-n subgroup, zero otherwise).
    ``pair_filter(w1, w2)`` can drop pairs from the sum.
    """
    ctx = ctx or build_context(data, 1)
    groups: dict[tuple[int, int], list[Word]] = {}
    for w in words:
        w = tuple(w)
        groups.setdefault((w[0], w[-1]), []).append(w)
    total = 0.0
    for (a, b), group in groups.items():
        pts, wts = disk_quadrature(data.disk(b), n_radial, n_angular)
        Da = data.disk(a)
        ca, ra = float(Da.center), float(Da.radius)
        mats = [gamma_of_word(data, w[:-1]) for w in group]
        weights = np.array([np.exp(s * _log_derivative(g, pts, w)) for g, w in zip(mats, group)])
        images = np.array([(lambda f: (f[0] * pts + f[1]) / (f[2] * pts + f[3]))(g.as_float())
                           for g in mats])
        trace = np.zeros((len(group), len(group)))
        for i, gi in enumerate(mats):
            for j, gj in enumerate(mats):
                if pair_filter is not None and not pair_filter(group[i], group[j]):
                    continue
                trace[i, j] = trace_sigma(ctx, gi @ gj.inverse())
        for i in range(len(group)):
            nz = np.nonzero(trace[i])[0]
            if nz.size == 0:
                continue
            kern = _bergman_kernel_array(ca, ra, images[i][None, :], images[nz])
            vals = weights[i][None, :] * np.conj(weights[nz]) * kern
            total += float(np.real((vals @ wts) @ trace[i, nz]))
    return total


def hs_norm(data: SchottkyData, ctx: CongruenceContext, tau: float, s: complex,
            M: int = DEFAULT_M, *, n_radial: int = 24, n_angular: int = 48,
            rel_tol: float = 1e-6) -> HSNorm:
    """HS norm of ``L_{B(τ),s,σ_n}`` by the pair formula and by the matrix Frobenius norm."""
    block = build_tau_block(data, tau)
    coarse = hs_norm_formula(data, block.words, s, ctx, n_radial=n_radial, n_angular=n_angular)
    fine = hs_norm_formula(data, block.words, s, ctx, n_radial=2 * n_radial,
                           n_angular=2 * n_angular)
    err = abs(fine - coarse) / max(abs(fine), 1e-300)
    if err > rel_tol:
        raise NumericalError(f"HS quadrature not converged (relative change {err:.2e})")
    family = TransferFamily(data, block.words, RepDescriptor.regular(ctx), M)
    frob = float(np.linalg.norm(family.matrix(s)))
    return HSNorm(math.sqrt(max(fine, 0.0)), frob, err)


# ---------------------------------------------------------------------------
# Euler product over primitive classes


@dataclass
class EulerProduct:
    value: complex
    class_count: int
    length_cutoff: float
    warning: str | None = None

    def __complex__(self) -> complex:
        return complex(self.value)


def _interval_floor(data: SchottkyData) -> float:
    """Empirical lower bound for ``|I_w| e^{ℓ(w)}`` over cyclically reduced words."""
    N = data.N
    best = math.inf
    level: list[tuple[Word, Mat2]] = [((a,), data.gen(a)) for a in data.letters]
    for _ in range(6):
        nxt = []
        for w, g in level:
            if w[-1] != mirror_letter(w[0], N) and abs(g.trace) > 2:
                _, _, c, d = g.as_float()
                prefix = g @ data.gen(w[-1]).inverse()
                _, _, pc, pd = prefix.as_float()
                D = data.disk(w[-1])
                x, y = float(D.center - D.radius), float(D.center + D.radius)
                length = (y - x) / abs((pc * x + pd) * (pc * y + pd))
                best = min(best, length * math.exp(translation_length(g)))
            for b in data.letters:
                if b != mirror_letter(w[-1], N):
                    nxt.append((w + (b,), g @ data.gen(b)))
        level = nxt
    return best


@lru_cache(maxsize=16)
def primitive_classes(data: SchottkyData, length_cutoff: float,
                      safety: float = 100.0) -> tuple[tuple[Word, float], ...]:
    """Lyndon representatives of primitive classes with ``ℓ <= length_cutoff``.

    Cyclically reduced words are enumerated up to rotation with the
    Fredricksen-Kessler-Maiorana recursion; a prefix is abandoned once its
    interval is shorter than ``κ e^{-L} / safety``, where ``κ`` bounds
    ``|I_w| e^{ℓ(w)}`` from below on short words.
    """
    N = data.N
    K = 2 * N
    gens = [g.as_float() for g in data.gens]
    ends = [(float(D.center - D.radius), float(D.center + D.radius)) for D in data.disks]
    mir = [mirror_letter(a + 1, N) - 1 for a in range(K)]
    threshold = _interval_floor(data) * math.exp(-length_cutoff) / safety
    half_cosh = math.cosh(length_cutoff / 2)
    out: list[tuple[Word, float]] = []
    letters: list[int] = []

    def rec(t: int, p: int, m) -> None:
        # letters[0..t-1] is a prenecklace with period p and matrix m
        if t >= 1 and p == t and letters[-1] != mir[letters[0]]:
            tr = abs(m[0] + m[3]) / 2
            if 1 < tr <= half_cosh:
                out.append((tuple(a + 1 for a in letters), 2 * math.acosh(tr)))
        if t == 0:
            candidates = [(j, 1) for j in range(K)]
        else:
            prev = letters[t - p]
            candidates = [(prev, p)] + [(j, t + 1) for j in range(prev + 1, K)]
        a0, b0, c0, d0 = m if t else (1.0, 0.0, 0.0, 1.0)
        for j, q in candidates:
            if t and j == mir[letters[-1]]:
                continue
            x, y = ends[j]
            if t and (y - x) / abs((c0 * x + d0) * (c0 * y + d0)) < threshold:
                continue
            ga, gb, gc, gd = gens[j]
            letters.append(j)
            rec(t + 1, q, (a0 * ga + b0 * gc, a0 * gb + b0 * gd,
                           c0 * ga + d0 * gc, c0 * gb + d0 * gd))
            letters.pop()

    rec(0, 1, None)
    out.sort(key=lambda item: item[1])
    return tuple(out)


def selberg_zeta_euler(data: SchottkyData, s: complex, length_cutoff: float = 12.0,
                       safety: float = 100.0) -> EulerProduct:
    """Truncated product ``∏_γ ∏_k (1 - e^{-(s+k)ℓ(γ)})`` over primitive classes."""
    classes = primitive_classes(data, float(length_cutoff), safety)
    ls = np.array([length for _, length in classes])
    log_total = 0j
    k = 0
    while ls.size:
        terms = np.exp(-(s + k) * ls)
        live = np.abs(terms) > 1e-17
        if not live.any():
            break
        log_total += np.log1p(-terms[live]).sum()
        k += 1
    warning = None
    if len(classes) < 10:
        warning = f"only {len(classes)} classes below cutoff {length_cutoff}"
        warnings.warn(warning, RuntimeWarning, stacklevel=2)
    return EulerProduct(complex(np.exp(log_total)), len(classes), float(length_cutoff), warning)
