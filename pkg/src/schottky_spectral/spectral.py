"""Zero counting and location for analytic functions, and the gap pipeline.

Counting uses two independent routes: Jensen's formula (a boundary average
of ``log|f|``) and the winding number of ``f`` along a contour.  Zeros are
located by quadrisection guided by winding numbers, then polished by Newton
steps with a numerical derivative.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .congruence import build_context, new_eig_threshold
from .errors import InfeasibleParameters, NumericalError, ZeroOnContourError
from .schottky import SchottkyData
from .transfer import DEFAULT_M, ClassicalDeterminant, RepDescriptor, TransferFamily, ZetaTauN, classical_words

AnalyticFn = Callable[[complex], complex]


# ---------------------------------------------------------------------------
# contours


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def point(self, t: float) -> complex:
        return self.center + self.radius * cmath.exp(2j * math.pi * t)

    def contains(self, z: complex) -> bool:
        return abs(z - self.center) < self.radius

    def bounding_box(self) -> "Rect":
        c, r = complex(self.center), self.radius
        return Rect(c.real - r, c.real + r, c.imag - r, c.imag + r)

    def to_dict(self) -> dict:
        c = complex(self.center)
        return {"kind": "disk", "center": [c.real, c.imag], "radius": self.radius}


@dataclass(frozen=True)
class Rect:
    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise InfeasibleParameters(f"degenerate rectangle {self}")

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    @property
    def center(self) -> complex:
        return complex((self.x0 + self.x1) / 2, (self.y0 + self.y1) / 2)

    def point(self, t: float) -> complex:
        """Counter-clockwise walk along the boundary, uniform in arc length."""
        w, h = self.width, self.height
        s = (t % 1.0) * 2 * (w + h)
        if s < w:
            return complex(self.x0 + s, self.y0)
        s -= w
        if s < h:
            return complex(self.x1, self.y0 + s)
        s -= h
        if s < w:
            return complex(self.x1 - s, self.y1)
        s -= w
        return complex(self.x0, self.y1 - s)

    def contains(self, z: complex, pad: float = 0.0) -> bool:
        return (self.x0 - pad <= z.real <= self.x1 + pad) and (self.y0 - pad <= z.imag <= self.y1 + pad)

    def split(self, fx: float, fy: float) -> list["Rect"]:
        xm = self.x0 + fx * self.width
        ym = self.y0 + fy * self.height
        return [Rect(self.x0, xm, self.y0, ym), Rect(xm, self.x1, self.y0, ym),
                Rect(self.x0, xm, ym, self.y1), Rect(xm, self.x1, ym, self.y1)]

    def to_dict(self) -> dict:
        return {"kind": "rectangle", "x0": self.x0, "x1": self.x1, "y0": self.y0, "y1": self.y1}


class _CachedFunction:
    def __init__(self, f: AnalyticFn):
        self.f = f
        self.cache: dict[complex, complex] = {}
        self.calls = 0

    def __call__(self, z: complex) -> complex:
        z = complex(z)
        val = self.cache.get(z)
        if val is None:
            val = complex(self.f(z))
            self.calls += 1
            self.cache[z] = val
        return val


# ---------------------------------------------------------------------------
# Jensen's formula


@dataclass
class JensenResult:
    value: float
    center: float
    radius: float
    nodes: int
    retries: int
    log_abs_center: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def jensen_eval(f: AnalyticFn | None, c: float, R: float, Q: int = 1024, *,
                log_abs: Callable[[complex], float] | None = None,
                jitter: float = 1.01, retries: int = 5, zero_tol: float = 1e-10) -> JensenResult:
    """Trapezoid evaluation of ``(1/2π)∫ log|f(c + R e^{iθ})| dθ - log|f(c)|``.

    ``log_abs`` may be given instead of ``f`` when ``log|f|`` is cheaper or
    safer to compute directly.  When a node value is tiny relative to the
    typical size on the circle, the radius is multiplied by ``jitter`` and
    the evaluation repeated.
    """
    if log_abs is None:
        if f is None:
            raise InfeasibleParameters("jensen_eval needs f or log_abs")

        def log_abs(z):
            v = abs(f(z))
            return math.log(v) if v > 0 else -math.inf

    center_val = log_abs(complex(c))
    if not math.isfinite(center_val):
        raise ZeroOnContourError(f"function vanishes at the Jensen center {c}")
    theta = 2 * np.pi * np.arange(Q) / Q
    radius = R
    for attempt in range(retries + 1):
        vals = np.array([log_abs(c + radius * np.exp(1j * t)) for t in theta])
        finite = vals[np.isfinite(vals)]
        typical = float(np.median(finite)) if finite.size else 0.0
        if finite.size == Q and vals.min() > typical + math.log(zero_tol):
            return JensenResult(float(vals.mean() - center_val), float(c), float(radius), Q,
                                attempt, float(center_val))
        radius *= jitter
    raise ZeroOnContourError(f"zero on the Jensen circle persists after {retries} radius shifts")


def jensen_rhs(f: AnalyticFn, c: float, R: float, Q: int = 1024, **kwargs) -> float:
    """Right side of Jensen's formula: ``Σ log(R/|z_j - c|)`` over zeros in the disk."""
    return jensen_eval(f, c, R, Q, **kwargs).value


# ---------------------------------------------------------------------------
# argument principle


def argument_count(f: AnalyticFn, contour, Q: int = 64, *, max_depth: int = 24,
                   max_step: float = math.pi / 2, zero_tol: float = 1e-14) -> int:
    """Winding number of ``f`` along ``contour`` with adaptive phase tracking."""
    g = f if isinstance(f, _CachedFunction) else _CachedFunction(f)
    ts = np.arange(Q + 1) / Q
    vals = [g(contour.point(t)) for t in ts[:-1]]
    vals.append(vals[0])
    scale = max(abs(v) for v in vals)
    if scale == 0:
        raise ZeroOnContourError("function vanishes identically on the contour")
    for t, v in zip(ts, vals):
        if abs(v) <= zero_tol * scale:
            raise ZeroOnContourError(f"zero on contour near {contour.point(t)}")

    def segment(t0, f0, t1, f1, depth):
        step = cmath.phase(f1 / f0)
        if abs(step) < max_step:
            return step
        if depth >= max_depth:
            raise NumericalError(f"phase step {step:.3f} unresolved near {contour.point(t0)}")
        tm = 0.5 * (t0 + t1)
        fm = g(contour.point(tm))
        if abs(fm) <= zero_tol * scale:
            raise ZeroOnContourError(f"zero on contour near {contour.point(tm)}")
        return segment(t0, f0, tm, fm, depth + 1) + segment(tm, fm, t1, f1, depth + 1)

    total = sum(segment(ts[i], vals[i], ts[i + 1], vals[i + 1], 0) for i in range(Q))
    winding = total / (2 * math.pi)
    count = int(round(winding))
    if abs(winding - count) > 1e-6:
        raise NumericalError(f"non-integral winding {winding}")
    return count


# ---------------------------------------------------------------------------
# zero location


@dataclass
class Zero:
    location: complex
    multiplicity: int
    residual: float
    step: float
    cluster: bool = False

    def to_dict(self) -> dict:
        return {
            "re": self.location.real,
            "im": self.location.imag,
            "multiplicity": self.multiplicity,
            "residual": self.residual,
            "step": self.step,
            "cluster": self.cluster,
        }


@dataclass
class ZeroReport:
    region: dict
    zeros: list[Zero]
    argument_principle: int
    jensen_bound: float | None
    method: dict = field(default_factory=dict)

    @property
    def total_multiplicity(self) -> int:
        return sum(z.multiplicity for z in self.zeros)

    def to_dict(self) -> dict:
        return {
            "region": self.region,
            "zeros": [z.to_dict() for z in self.zeros],
            "counts": {"argument_principle": self.argument_principle,
                       "jensen_bound": self.jensen_bound},
            "method": self.method,
        }


def newton_refine(f: AnalyticFn, z0: complex, multiplicity: int = 1, tol: float = 1e-10,
                  max_iter: int = 60, h: float = 1e-6,
                  bounds: Rect | None = None) -> tuple[complex, float, float, bool]:
    """Modified Newton iteration ``z -= m f/f'`` with a central-difference derivative.

    Iterates leaving ``bounds`` stop the refinement unconverged.
    """
    z = complex(z0)
    step = math.inf
    for _ in range(max_iter):
        if bounds is not None and not bounds.contains(z):
            return z, math.inf, step, False
        fz = f(z)
        if fz == 0:
            return z, 0.0, 0.0, True
        hh = h * max(1.0, abs(z))
        df = (f(z + hh) - f(z - hh)) / (2 * hh)
        if df == 0 or not cmath.isfinite(df):
            return z, abs(fz), step, False
        dz = -multiplicity * fz / df
        z += dz
        step = abs(dz)
        if step < tol:
            return z, abs(f(z)), step, True
    return z, abs(f(z)), step, False


_SPLITS = (0.5 + 0.0317, 0.5 - 0.0419, 0.5 + 0.0733, 0.5 - 0.0871)


def find_zeros(f: AnalyticFn, region, tol: float = 1e-10, *, min_box: float = 1e-6,
               Q: int = 32, max_boxes: int = 4000) -> ZeroReport:
    """Locate all zeros of ``f`` inside a rectangle or disk."""
    g = _CachedFunction(f)
    box0 = region.bounding_box() if isinstance(region, Circle) else region
    zeros: list[Zero] = []
    boxes_seen = 0

    def count(box: Rect, nodes: int = Q) -> int:
        return argument_count(g, box, nodes)

    def split_counts(box: Rect, nodes: int = Q):
        last_err = None
        for fx in _SPLITS:
            for fy in _SPLITS:
                try:
                    kids = box.split(fx, fy)
                    return kids, [count(k, nodes) for k in kids]
                except ZeroOnContourError as exc:
                    last_err = exc
        raise last_err

    def accept(box: Rect, m: int) -> bool:
        size = max(box.width, box.height)
        fence = Rect(box.x0 - size, box.x1 + size, box.y0 - size, box.y1 + size)
        z, res, step, ok = newton_refine(g, box.center, m, tol, bounds=fence)
        if not ok or not box.contains(z, pad=1e-12 * size):
            return False
        probe = max(1e-3 * size, 1e3 * tol)
        try:
            if argument_count(g, Circle(z, probe), Q) != m:
                return False
        except ZeroOnContourError:
            return False
        zeros.append(Zero(z, m, res, step))
        return True

    def process(box: Rect, m: int) -> None:
        nonlocal boxes_seen
        boxes_seen += 1
        if boxes_seen > max_boxes:
            raise NumericalError("zero search exceeded its box budget")
        if m == 0:
            return
        size = max(box.width, box.height)
        if (m == 1 or size < 1e-2 * max(box0.width, box0.height)) and accept(box, m):
            return
        if size < min_box:
            zeros.append(Zero(box.center, m, abs(g(box.center)), size, cluster=True))
            return
        kids, counts = split_counts(box)
        if sum(counts) != m:
            # a zero hugging an edge can alias the phase steps; recount finer
            m = count(box, 16 * Q)
            kids, counts = split_counts(box, 16 * Q)
        if sum(counts) != m:
            raise NumericalError(f"child winding numbers {counts} do not add up to {m}")
        for kid, k in zip(kids, counts):
            process(kid, k)

    total = count(box0)
    process(box0, total)
    jensen = None
    if isinstance(region, Circle):
        zeros = [z for z in zeros if region.contains(z.location)]
        total = argument_count(g, region, 4 * Q)
        try:
            jensen = jensen_rhs(g, complex(region.center).real, region.radius, 8 * Q,
                                jitter=1.0, retries=0)
        except ZeroOnContourError:
            jensen = None
    zeros.sort(key=lambda z: (-z.location.real, z.location.imag))
    return ZeroReport(
        region=region.to_dict(),
        zeros=zeros,
        argument_principle=total,
        jensen_bound=jensen,
        method={"tol": tol, "min_box": min_box, "nodes_per_contour": Q,
                "evaluations": g.calls, "boxes": boxes_seen},
    )


# ---------------------------------------------------------------------------
# growth exponent


def leading_eigenvalue(T: np.ndarray, tol: float = 1e-15, max_iter: int = 2000) -> tuple[float, np.ndarray]:
    """Dominant eigenvalue by power iteration, with a dense fallback."""
    A = np.real_if_close(T, tol=1e6)
    v = np.ones(A.shape[0], dtype=A.dtype)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = A @ v
        new = float(np.real(np.vdot(v, w)))
        nrm = np.linalg.norm(w)
        if nrm == 0:
            break
        v = w / nrm
        if abs(new - lam) <= tol * max(1.0, abs(new)):
            return new, v
        lam = new
    vals, vecs = np.linalg.eig(A)
    i = int(np.argmax(np.abs(vals)))
    return float(np.real(vals[i])), vecs[:, i]


@dataclass
class DeltaEstimate:
    eigenvalue_route: float
    determinant_route: float
    residual: float
    M: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def largest_real_zero(fun: Callable[[float], float], hi: float = 2.0, lo: float = 0.0,
                      step: float = 0.05, xtol: float = 1e-14) -> float:
    """Scan down from ``hi`` for the first sign change of a real function, then bracket."""
    s_hi = hi
    v_hi = fun(s_hi)
    s = s_hi - step
    while s >= lo:
        v = fun(s)
        if v == 0:
            return s
        if np.sign(v) != np.sign(v_hi):
            return brentq(fun, s, s_hi, xtol=xtol, rtol=4 * np.finfo(float).eps)
        s_hi, v_hi = s, v
        s -= step
    raise NumericalError(f"no sign change of the determinant in [{lo}, {hi}]")


@lru_cache(maxsize=32)
def delta_two_methods(data: SchottkyData, M: int = DEFAULT_M, tol: float = 1e-8) -> DeltaEstimate:
    """Growth exponent by the eigenvalue-one crossing and by the determinant zero."""
    family = TransferFamily(data, classical_words(data), None, M)

    def excess(s: float) -> float:
        return leading_eigenvalue(family.matrix(s))[0] - 1.0

    hi = 1.0
    while excess(hi) > 0:
        hi += 0.5
        if hi > 10:
            raise NumericalError("leading eigenvalue stays above one")
    lo = 0.0
    eig_route = brentq(excess, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    residual = abs(excess(eig_route))
    if residual >= tol:
        raise NumericalError(f"|λ(δ̂) - 1| = {residual:.2e} exceeds {tol:g}")

    def det_real(s: float) -> float:
        return float(np.real(np.linalg.det(np.eye(family.dimension) - family.matrix(s))))

    det_route = largest_real_zero(det_real, hi=hi + 0.5)
    if abs(det_route - eig_route) > 10 * tol:
        raise NumericalError(f"growth exponent routes disagree: {eig_route} vs {det_route}")
    return DeltaEstimate(eig_route, det_route, residual, M)


def estimate_delta(data: SchottkyData, M: int = DEFAULT_M, tol: float = 1e-8) -> float:
    """Exponent where the leading eigenvalue of the classical operator equals one."""
    return delta_two_methods(data, M, tol).eigenvalue_route


def fixed_vector(data: SchottkyData, s: float, M: int = DEFAULT_M) -> np.ndarray:
    """Coefficient vector of the eigenfunction for the leading eigenvalue at real ``s``."""
    family = TransferFamily(data, classical_words(data), None, M)
    _, v = leading_eigenvalue(family.matrix(s))
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# gap parameters


@dataclass(frozen=True)
class GapParameters:
    delta: float
    beta: float
    t: float
    ell: float
    r: float
    eps: float
    alpha: float

    def inequalities(self, beta1: float | None = None, rel_tol: float = 1e-12) -> dict:
        """The three constraints on ``alpha``; one of them is tight by construction."""
        b1 = self.ell if beta1 is None else beta1
        e, a, d = self.eps, self.alpha, self.delta
        upper = (1 - e) / (2 + e - 2 * b1)
        lower1 = (1 + e) / (2 * b1 - 1 - e)
        lower2 = (2 + e) / (2 * b1 - d)
        slack = rel_tol * a
        return {
            "alpha_le_upper": a <= upper + slack,
            "alpha_ge_lower1": a >= lower1 - slack,
            "alpha_ge_lower2": a >= lower2 - slack,
            "upper": upper,
            "lower1": lower1,
            "lower2": lower2,
        }

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def choose_alpha(delta: float, beta: float) -> GapParameters:
    """Closed-form ``(t, ℓ, ε, α)`` for ``4/5 < δ <= 1`` and ``t < β <= δ``."""
    if not 0.8 < delta <= 1:
        raise InfeasibleParameters(f"delta = {delta} outside (4/5, 1]")
    t = delta / 6 + 2 / 3
    if not t < beta <= delta:
        raise InfeasibleParameters(f"beta = {beta} outside ({t}, {delta}]")
    ell = t + (beta - t) / 4
    p = 4 - delta
    r = (-p + math.sqrt(p * p + 6 * (beta - t))) / 2
    eps = min(r, 1 / 15)
    alpha = (2 + eps) / (2 * ell - delta)
    if not (0 < eps < 1 and 2 < alpha < 5):
        raise NumericalError(f"eps = {eps}, alpha = {alpha} outside their ranges")
    return GapParameters(delta, beta, t, ell, r, eps, alpha)


# ---------------------------------------------------------------------------
# pipeline


REFERENCE_REGIME = (0.9, 0.85)


@dataclass
class PipelineReport:
    summary: dict
    c_grid: list[tuple[float, float]]
    zeros: list[dict]
    stability: list[dict]

    def to_dict(self) -> dict:
        return {"summary": self.summary, "c_grid": [{"c": c, "minus_log_abs": v} for c, v in self.c_grid],
                "zeros": self.zeros, "stability": self.stability}


def multiplicity_pipeline(data: SchottkyData, n: int, beta: float, M: int = DEFAULT_M, *,
                          c_window: tuple[float, float] = (3.0, 10.0), c_step: float = 0.5,
                          Q: int = 1024, reference: tuple[float, float] = REFERENCE_REGIME,
                          stability_taus: Sequence[float] = (0.02, 0.05, 0.1),
                          tol: float = 1e-10) -> PipelineReport:
    """Jensen-circle zero bound for the congruence zeta function of level ``n``.

    When the growth exponent lies in ``(4/5, 1]`` and ``β`` in ``(t, δ]`` the
    exponent ``α`` and the inner radius follow the closed formulas; otherwise
    ``α`` is taken at the ``reference`` pair and the circle passes through a
    point between 1/2 and ``β``.
    """
    delta_est = delta_two_methods(data, M)
    delta = delta_est.eigenvalue_route
    t_delta = delta / 6 + 2 / 3
    if 0.8 < delta <= 1 and t_delta < beta <= delta:
        regime = "closed-form"
        params = choose_alpha(delta, beta)
        beta1_lo, beta1_hi = params.ell, (params.t + beta) / 2
    else:
        regime = "reference"
        if not 0.5 < beta < 1:
            raise InfeasibleParameters(f"beta = {beta} must lie in (1/2, 1)")
        params = choose_alpha(*reference)
        beta1_lo, beta1_hi = (0.5 + beta) / 2, beta
    ineq = params.inequalities()

    ctx = build_context(data, n)
    tau = float(n) ** -params.alpha
    L = data.max_boundary_length
    if not tau < L:
        raise InfeasibleParameters(f"tau_n = {tau:.4g} is not below L = {L:g}: infeasible n")
    zeta = ZetaTauN(data, ctx, tau, M)

    bound = tau * ctx.index
    c_grid = []
    chosen = None
    c = c_window[0]
    while c <= c_window[1] + 1e-12:
        val = -zeta.log_abs(c)
        c_grid.append((c, val))
        if chosen is None and math.isfinite(val) and val <= bound:
            chosen = c
        c += c_step
    pointwise_holds = chosen is not None
    if chosen is None:
        chosen = min(c_grid, key=lambda item: item[1])[0]

    R = chosen - beta1_lo
    jensen = jensen_eval(None, chosen, R, Q, log_abs=zeta.log_abs, jitter=0.99)
    beta1 = chosen - jensen.radius
    if not beta1 < beta1_hi:
        raise ZeroOnContourError("radius jitter pushed the inner point past its range")
    target_radius = chosen - beta
    ratio = math.log(jensen.radius / target_radius)
    jensen_bound = max(jensen.value, 0.0) / ratio

    located = find_zeros(zeta, Circle(chosen, target_radius), tol)
    eigen_zeros = []
    for z in located.zeros:
        s = z.location
        entry = z.to_dict()
        entry["eigenvalue"] = (s * (1 - s)).real if s.real > 0.5 else None
        entry["linear_factor_abs"] = abs(zeta.linear_factor(s))
        eigen_zeros.append(entry)

    stability = []
    for tau2 in stability_taus:
        if not tau2 < L:
            continue
        other = ZetaTauN(data, ctx, tau2, M)
        for z in located.zeros:
            if z.location.real <= 0.5:
                continue
            fence = Rect(z.location.real - 0.1, z.location.real + 0.1,
                         z.location.imag - 0.1, z.location.imag + 0.1)
            moved, res, step, ok = newton_refine(other, z.location, z.multiplicity, tol,
                                                 bounds=fence)
            stability.append({"tau": tau2, "re": z.location.real, "im": z.location.imag,
                              "re_other": moved.real, "im_other": moved.imag,
                              "shift": abs(moved - z.location), "converged": ok})

    untwisted = find_zeros(ClassicalDeterminant(data, M), Circle(chosen, target_radius), tol)
    twisted = ClassicalDeterminant(data, M, RepDescriptor.regular(ctx))
    divisibility = [{"re": z.location.real, "im": z.location.imag,
                     "twisted_abs": abs(twisted(z.location))} for z in untwisted.zeros]

    threshold = new_eig_threshold(n)
    summary = {
        "n": n,
        "beta": beta,
        "M": M,
        "regime": regime,
        "delta": delta,
        "delta_determinant_route": delta_est.determinant_route,
        "gap_parameters": params.to_dict(),
        "alpha_inequalities": ineq,
        "tau_n": tau,
        "index": ctx.index,
        "surjective": ctx.surjective,
        "pointwise_bound": bound,
        "pointwise_bound_holds": pointwise_holds,
        "c": chosen,
        "beta1": beta1,
        "jensen_radius": jensen.radius,
        "jensen_nodes": Q,
        "jensen_retries": jensen.retries,
        "jensen_sum": jensen.value,
        "jensen_zero_bound": jensen_bound,
        "target_radius": target_radius,
        "argument_count": located.argument_principle,
        "located_multiplicity": located.total_multiplicity,
        "new_eigenvalue_threshold": float(threshold),
        "untwisted_zeros_in_target": len(untwisted.zeros),
        "divisibility": divisibility,
        "jensen_bound_covers_count": jensen_bound + 1e-9 >= located.argument_principle,
    }
    return PipelineReport(summary, c_grid, eigen_zeros, stability)
