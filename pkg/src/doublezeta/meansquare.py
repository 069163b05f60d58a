"""Mean-square laboratory.

Computes I(T) = int_2^T |zeta(s1, s2, sigma3 + i t3)|^2 dt3 for the av2 or
mt2 function along a rising t3 path, compares the leading coefficient
against the squared companion series at (s1, s2, 2 sigma3), classifies
which asymptotic regime applies at the parameter point, and fits the
residual exponent

    I(T) - ref * T  ~  T^alpha (log T)^beta.

The verification stance is one-sided throughout: the asymptotics give
upper bounds for the residual, so tests assert "fitted exponent <=
predicted + slack", never equality.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__ as _pkg_version
from .constants import Constants, DEFAULT_CONSTANTS
from .errors import (DomainError, InsufficientDataError, PathError, RegionError)
from .kernel import NeumaierSum, QuadratureSpec, ensure_finite
from .series import (
    DiagonalSeries,
    av2_region_check,
    av2_sq,
    av2_tail_majorant,
    choose_cutoff,
    mt2_region_check,
    mt2_sq,
    mt2_tail_majorant,
)

_EQ = 1e-9


# ---------------------------------------------------------------------------
# regime classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegimeClassification:
    """Which asymptotic regime governs a parameter point.

    ``error_exponent``/``log_power`` describe the residual bound
    T^exponent (log T)^log_power; rows of the form (T log T)^(1/2) are
    encoded as exponent 1/2 with log_power 1 and ``log_inside_sqrt`` set,
    i.e. the log factor sits inside the square root.
    """

    theorem: str
    error_exponent: float
    log_power: int
    log_inside_sqrt: bool
    target: str
    margins: dict = field(default_factory=dict)
    alternates: tuple = ()

    @property
    def beta_effective(self) -> float:
        """log-factor power on the residual scale (0.5 per log inside a root)."""
        return self.log_power * (0.5 if self.log_inside_sqrt else 1.0)


def _growth_key(exponent: float, log_power: int) -> tuple:
    return (exponent, log_power)


def classify_regime(target: str, s1: complex, s2: complex,
                    sigma3: float) -> RegimeClassification:
    """Return the applicable regime (or 'none') at (s1, s2, sigma3).

    The hypothesis sets of the four statements are pairwise disjoint for a
    fixed target, but the selection is written defensively: every matching
    row is collected, the smallest-growth one wins and the others are
    recorded as alternates.
    """
    if target not in ("AV", "MT"):
        raise DomainError("target must be 'AV' or 'MT'")
    s1, s2 = complex(s1), complex(s2)
    g1, g2, g3 = s1.real, s2.real, float(sigma3)
    t1, t2 = s1.imag, s2.imag
    p13 = g1 + g3
    p23 = g2 + g3
    tot = g1 + g2 + g3

    rows: list[RegimeClassification] = []

    def add(theorem, exponent, log_power, inside, margins):
        rows.append(RegimeClassification(
            theorem=theorem, error_exponent=exponent, log_power=log_power,
            log_inside_sqrt=inside, target=target, margins=margins))

    if target == "AV":
        if p13 > 1.0 and tot > 2.0:
            add("T1_1", 0.0, 0, False,
                {"sigma1+sigma3-1": p13 - 1.0, "sigmasum-2": tot - 2.0})
        if g1 >= 0.0 and g3 > 0.0 and 0.5 < p13 <= 1.0 and tot > 2.0 and t1 >= 0.0:
            margins = {"sigma1": g1, "sigma3": g3, "sigma1+sigma3-1/2": p13 - 0.5,
                       "1-(sigma1+sigma3)": 1.0 - p13, "sigmasum-2": tot - 2.0,
                       "t1": t1}
            if p13 <= 0.75:
                add("T1_2_a", 2.0 - 2.0 * p13, 1, False, margins)
            else:
                add("T1_2_b", 0.5, 0, False, margins)
        if g1 >= 0.0 and t1 >= 0.0 and g3 > 0.0 and p13 > 0.5 and 1.5 < tot <= 2.0:
            margins = {"sigma1": g1, "sigma3": g3, "sigma1+sigma3-1/2": p13 - 0.5,
                       "sigmasum-3/2": tot - 1.5, "2-sigmasum": 2.0 - tot, "t1": t1}
            if g2 >= 0.5 + p13:
                add("T1_3_a", 2.0 - 2.0 * p13, 1, False, margins)
            elif abs(tot - 2.0) <= _EQ:
                add("T1_3_c", 0.5, 1, True, margins)
            else:
                add("T1_3_b", 2.5 - tot, 0, False, margins)
    else:
        if (g1 >= 0.0 and g2 >= 0.0 and g3 > 0.0 and t1 >= 0.0 and t2 >= 0.0
                and p13 <= 1.0 and p23 <= 1.0 and tot > 1.5):
            margins = {"sigma1": g1, "sigma2": g2, "sigma3": g3,
                       "1-(sigma1+sigma3)": 1.0 - p13, "1-(sigma2+sigma3)": 1.0 - p23,
                       "sigmasum-3/2": tot - 1.5, "t1": t1, "t2": t2}
            if abs(tot - 2.0) <= _EQ:
                add("T1_4_b", 0.5, 1, True, margins)
            else:
                add("T1_4_a", 2.5 - tot, 0, False, margins)

    if not rows:
        return RegimeClassification(theorem="none", error_exponent=math.nan,
                                    log_power=0, log_inside_sqrt=False,
                                    target=target)
    rows.sort(key=lambda r: _growth_key(r.error_exponent, r.log_power))
    best = rows[0]
    if len(rows) > 1:
        best = RegimeClassification(
            theorem=best.theorem, error_exponent=best.error_exponent,
            log_power=best.log_power, log_inside_sqrt=best.log_inside_sqrt,
            target=best.target, margins=best.margins,
            alternates=tuple(r.theorem for r in rows[1:]))
    return best


# ---------------------------------------------------------------------------
# mean-square plan / report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeanSquarePlan:
    target: str                   # 'AV' | 'MT'
    s1: complex
    s2: complex
    sigma3: float
    T_samples: tuple[float, ...]
    evaluator: str = "direct"     # 'direct' | 'second_approx'
    quad: QuadratureSpec = QuadratureSpec()
    eps: float = 1e-8

    def __post_init__(self):
        if self.target not in ("AV", "MT"):
            raise DomainError("target must be 'AV' or 'MT'")
        if self.evaluator not in ("direct", "second_approx"):
            raise DomainError("evaluator must be 'direct' or 'second_approx'")
        ensure_finite(self.s1, "s1")
        ensure_finite(self.s2, "s2")
        if not math.isfinite(self.sigma3):
            raise DomainError("sigma3 must be finite")
        ts = tuple(float(t) for t in self.T_samples)
        if not ts:
            raise DomainError("T_samples must be non-empty")
        if ts[0] < 2.0:
            raise DomainError("first T sample must be >= 2")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise DomainError("T_samples must be strictly increasing")
        object.__setattr__(self, "T_samples", ts)
        if not (self.eps > 0):
            raise DomainError("eps > 0 required")


@dataclass(frozen=True)
class MeanSquareReport:
    I_values: tuple[tuple[float, float], ...]
    zeta_sq_ref: float
    ref_error_bound: float
    coefficient_estimates: tuple[float, ...]
    residuals: tuple[float, ...]
    fitted_exponent: float
    fitted_exponent_stderr: float
    dropped_samples: int
    regime: RegimeClassification
    run_manifest: dict


def _check_path(plan: MeanSquarePlan, constants: Constants) -> None:
    """Up-front admissibility of the chosen evaluator along t3 in [2, Tmax].

    Raises :class:`PathError` naming the first failing t3 (hyperplane
    standoff) or :class:`RegionError` for t3-independent violations.
    """
    g1, g2, g3 = plan.s1.real, plan.s2.real, plan.sigma3
    t1, t2 = plan.s1.imag, plan.s2.imag
    Tmax = plan.T_samples[-1]
    if plan.evaluator == "direct":
        if plan.target == "AV":
            av2_region_check(g1, g2, g3)
        else:
            mt2_region_check(g1, g2, g3)
        return

    # second_approx: sigma-conditions
    if not (g1 >= 0.0):
        raise RegionError(f"sigma1 >= 0 required (got {g1:g})")
    if t1 < 0.0:
        raise RegionError(f"t1 >= 0 required (got {t1:g})")
    if plan.target == "AV":
        floor3 = max(0.0, 0.5 - g1, 1.5 - g1 - g2)
        planes = [("s1+s3=1", g1 + g3 - 1.0, t1)]
    else:
        if not (g2 >= 0.0):
            raise RegionError(f"sigma2 >= 0 required (got {g2:g})")
        if t2 < 0.0:
            raise RegionError(f"t2 >= 0 required (got {t2:g})")
        floor3 = max(0.0, 0.5 - g1, 0.5 - g2, 1.5 - g1 - g2)
        planes = [("s1+s3=1", g1 + g3 - 1.0, t1), ("s2+s3=1", g2 + g3 - 1.0, t2)]
    if not (g3 > floor3):
        raise RegionError(f"sigma3 > {floor3:g} required (got {g3:g})")
    planes.append(("s1+s2+s3=2", g1 + g2 + g3 - 2.0, t1 + t2))

    for name, re_dist, im_base in planes:
        t3_star = min(max(-im_base, 2.0), Tmax)
        dist = math.hypot(re_dist, im_base + t3_star)
        if dist < constants.hyperplane_standoff:
            raise PathError(
                f"path hits hyperplane {name} at t3 = {t3_star:g} "
                f"(distance {dist:.3g} < standoff {constants.hyperplane_standoff:g})",
                t3=t3_star)


def _node_spacing(cutoff: int) -> float:
    return min(0.25, math.pi / (4.0 * (1.0 + math.log(max(cutoff, 2)))))


class _Evaluator:
    """Node-value provider |zeta(., sigma3 + i t3)|^2 on an ascending grid."""

    def __init__(self, plan: MeanSquarePlan, constants: Constants):
        kind = "av" if plan.target == "AV" else "mt"
        self.plan = plan
        self.series = DiagonalSeries(kind, plan.s1, plan.s2)
        self.a = max(1.0, abs(plan.s1.imag))
        if plan.target == "MT":
            self.a = max(self.a, abs(plan.s2.imag))
        if plan.evaluator == "direct":
            g1, g2, g3 = plan.s1.real, plan.s2.real, plan.sigma3
            if plan.target == "AV":
                maj = lambda M: av2_tail_majorant(g1, g2, g3, M)
            else:
                maj = lambda M: mt2_tail_majorant(g1, g2, g3, M)
            self.M_fixed, self.eval_bound, _ = choose_cutoff(maj, plan.eps)
            self.series.grow(self.M_fixed)
            self.cutoff_max = self.M_fixed
        else:
            self.M_fixed = None
            self.eval_bound = None
            self.cutoff_max = int(math.floor(self.a * plan.T_samples[-1]))

    def cutoff_at(self, t3: float) -> int:
        if self.M_fixed is not None:
            return self.M_fixed
        return max(2, int(math.floor(self.a * t3)))

    def values_squared(self, t3s: np.ndarray, threads: int = 1) -> np.ndarray:
        sg3 = self.plan.sigma3
        if self.M_fixed is not None:
            def one(t3: float) -> float:
                v = self.series.value(complex(sg3, t3))
                return v.real * v.real + v.imag * v.imag
            if threads > 1 and len(t3s) > 64:
                chunks = np.array_split(np.asarray(t3s), threads * 4)
                with ThreadPoolExecutor(max_workers=threads) as pool:
                    parts = list(pool.map(
                        lambda ch: np.array([one(t) for t in ch]), chunks))
                return np.concatenate(parts)
            return np.array([one(t) for t in t3s])
        # growing cutoff: sequential by construction (ascending t3 updates)
        out = np.empty(len(t3s))
        for i, t3 in enumerate(t3s):
            v = self.series.value(complex(sg3, t3), M=self.cutoff_at(t3))
            out[i] = v.real * v.real + v.imag * v.imag
        return out


def _simpson_segment(f_left: float, t_left: float, t_right: float,
                     evaluator: _Evaluator, spacing: float,
                     threads: int) -> tuple[float, float]:
    """Composite-Simpson integral over [t_left, t_right]; returns
    (integral, f(t_right)).  Panel sums use w*(f0+4f1+f2)/6 so a constant
    integrand integrates exactly."""
    length = t_right - t_left
    if length <= 0:
        return 0.0, f_left
    panels = max(1, int(math.ceil(length / (2.0 * spacing))))
    nodes = np.linspace(t_left, t_right, 2 * panels + 1)
    fs = np.empty(len(nodes))
    fs[0] = f_left
    fs[1:] = evaluator.values_squared(nodes[1:], threads)
    w = length / panels
    contrib = w * (fs[0:-1:2] + 4.0 * fs[1::2] + fs[2::2]) / 6.0
    acc = NeumaierSum()
    for c in contrib:
        acc.add(float(c))
    return acc.total, float(fs[-1])


def mean_square(plan: MeanSquarePlan, constants: Constants = DEFAULT_CONSTANTS,
                threads: int = 1, spacing_scale: float = 1.0) -> MeanSquareReport:
    """Run the plan: I(T) at each sample, reference coefficient, residuals
    and the fitted residual exponent.

    Node spacing obeys min(0.25, pi / (4 (1 + log cutoff))) so the fastest
    phase term k^(i t3), k <= 2*cutoff, is resolved; ``spacing_scale`` < 1
    refines it (used by the quadrature-stability checks).  I(T) is
    cumulative over segments, each integrated by composite Simpson with
    non-negative weights, so I is non-decreasing in T.
    """
    if not (0.0 < spacing_scale <= 1.0):
        raise DomainError("spacing_scale must be in (0, 1]")
    _check_path(plan, constants)
    regime = classify_regime(plan.target, plan.s1, plan.s2, plan.sigma3)

    if plan.target == "AV":
        ref = av2_sq(plan.s1, plan.s2, 2.0 * plan.sigma3, plan.eps)
    else:
        ref = mt2_sq(plan.s1, plan.s2, 2.0 * plan.sigma3, plan.eps, accelerate=True)
    ref_value = ref.value.real

    ev = _Evaluator(plan, constants)
    spacing = _node_spacing(2 * max(ev.cutoff_max, 2)) * spacing_scale

    I_pairs: list[tuple[float, float]] = []
    I_acc = NeumaierSum()
    t_prev = 2.0
    f_prev = float(ev.values_squared(np.array([2.0]), 1)[0])
    for T in plan.T_samples:
        seg, f_prev = _simpson_segment(f_prev, t_prev, T, ev, spacing, threads)
        I_acc.add(seg)
        t_prev = T
        I_pairs.append((T, I_acc.total))

    Ts = np.array([p[0] for p in I_pairs])
    Is = np.array([p[1] for p in I_pairs])
    coeffs = Is / Ts
    residuals = Is - ref_value * Ts

    if len(Ts) >= 4:
        expo, stderr, dropped = fit_residual_exponent(
            Ts, residuals, beta=regime.beta_effective,
            drop_below=1e-3 * abs(ref_value))
    else:
        expo, stderr, dropped = math.nan, math.nan, 0

    manifest = {
        "package_version": _pkg_version,
        "target": plan.target,
        "s1": [plan.s1.real, plan.s1.imag],
        "s2": [plan.s2.real, plan.s2.imag],
        "sigma3": plan.sigma3,
        "T_samples": list(plan.T_samples),
        "evaluator": plan.evaluator,
        "eps": plan.eps,
        "quad": {"rule": plan.quad.rule, "panels": plan.quad.panels,
                 "nodes_per_panel": plan.quad.nodes_per_panel,
                 "abs_tol": plan.quad.abs_tol},
        "node_spacing": spacing,
        "cutoff_max": ev.cutoff_max,
        "ref_cutoff": ref.truncation.cutoff if ref.truncation else None,
        "ref_rigor": ref.rigor,
        "constants_sha256": constants.sha256,
        "regime": regime.theorem,
    }
    return MeanSquareReport(
        I_values=tuple(I_pairs),
        zeta_sq_ref=ref_value,
        ref_error_bound=ref.error_bound,
        coefficient_estimates=tuple(float(c) for c in coeffs),
        residuals=tuple(float(r) for r in residuals),
        fitted_exponent=expo,
        fitted_exponent_stderr=stderr,
        dropped_samples=dropped,
        regime=regime,
        run_manifest=manifest,
    )


def fit_residual_exponent(Ts: np.ndarray, residuals: np.ndarray, beta: float = 0.0,
                          drop_below: float = 0.0) -> tuple[float, float, int]:
    """OLS slope of log|R| (minus beta * log log T) against log T over the
    upper half of the samples.

    Small-T transients are dominated by unmodeled lower-order terms, hence
    the upper-half restriction; near-zero residuals are dropped (count
    reported) because their logs destabilize the regression.
    """
    Ts = np.asarray(Ts, dtype=float)
    residuals = np.asarray(residuals, dtype=float)
    if len(Ts) < 4:
        raise InsufficientDataError(
            f"residual fit needs >= 4 samples (got {len(Ts)})")
    start = len(Ts) // 2
    T_u = Ts[start:]
    R_u = residuals[start:]
    keep = np.abs(R_u) > drop_below
    dropped = int(np.sum(~keep))
    T_u, R_u = T_u[keep], R_u[keep]
    if len(T_u) < 2:
        raise InsufficientDataError(
            "residual fit needs >= 2 usable samples after dropping near-zero residuals")
    x = np.log(T_u)
    y = np.log(np.abs(R_u)) - beta * np.log(np.log(T_u))
    xbar, ybar = x.mean(), y.mean()
    sxx = float(np.sum((x - xbar) ** 2))
    slope = float(np.sum((x - xbar) * (y - ybar)) / sxx)
    resid = y - (ybar + slope * (x - xbar))
    dof = max(len(x) - 2, 1)
    stderr = math.sqrt(float(np.sum(resid**2)) / dof / sxx) if len(x) > 2 else 0.0
    return slope, stderr, dropped


def residual_exponent_fit(report: MeanSquareReport) -> tuple[float, float]:
    """Spec-facing wrapper: refit the exponent from a finished report."""
    Ts = np.array([p[0] for p in report.I_values])
    expo, stderr, _ = fit_residual_exponent(
        Ts, np.array(report.residuals), beta=report.regime.beta_effective,
        drop_below=1e-3 * abs(report.zeta_sq_ref))
    return expo, stderr


# ---------------------------------------------------------------------------
# Dirichlet-polynomial mean value check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DirichletPoly:
    """Finite Dirichlet polynomial sum a_n n^(it), n strictly increasing."""

    coefficients: tuple[tuple[int, complex], ...]

    def __post_init__(self):
        prev = 0
        for n, a in self.coefficients:
            if n <= prev:
                raise DomainError("indices must be strictly increasing positive integers")
            ensure_finite(a, f"coefficient a_{n}")
            prev = n

    @property
    def n_max(self) -> int:
        return self.coefficients[-1][0] if self.coefficients else 0


def mv_check(poly: DirichletPoly, T: float, quad: QuadratureSpec) -> tuple[float, float, float]:
    """(lhs, main, budget) for the Dirichlet-polynomial mean value:

        lhs    = int_2^T |sum a_n n^(it)|^2 dt    (composite Simpson)
        main   = T * sum |a_n|^2
        budget = sum n |a_n|^2

    Callers assert |lhs - main| <= kappa * budget with the frozen kappa.
    An empty polynomial short-circuits to (0, 0, 0).
    """
    if not poly.coefficients:
        return 0.0, 0.0, 0.0
    if not (T > 2.0):
        raise DomainError("T > 2 required")
    ns = np.array([n for n, _ in poly.coefficients], dtype=np.float64)
    a = np.array([c for _, c in poly.coefficients], dtype=complex)
    main = float(T * np.sum(np.abs(a) ** 2))
    budget = float(np.sum(ns * np.abs(a) ** 2))

    spacing = min(0.25, math.pi / (4.0 * (1.0 + math.log(poly.n_max))))
    length = T - 2.0
    panels = max(1, int(math.ceil(length / (2.0 * spacing))))
    if (2 * panels + 1) > quad.hard_cap:
        raise DomainError("node count exceeds the quadrature hard cap")
    nodes = np.linspace(2.0, T, 2 * panels + 1)
    ln = np.log(ns)
    vals = np.exp(1j * np.outer(nodes, ln)) @ a
    fs = vals.real**2 + vals.imag**2
    w = length / panels
    contrib = w * (fs[0:-1:2] + 4.0 * fs[1::2] + fs[2::2]) / 6.0
    acc = NeumaierSum()
    for c in contrib:
        acc.add(float(c))
    return acc.total, main, budget
