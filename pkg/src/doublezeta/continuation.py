"""Evaluation outside the absolute-convergence regions.

Two routes continue av2 (and, through the symmetric relation, mt2) beyond
the defining series:

* the *first* formula: a finite double sum over n <= x, n < m <= y plus
  four explicit correction terms (a boundary term, two tail-integral sums
  and a Dirichlet tail), exact up to an O(x^...) remainder whose constant
  is heuristic;
* the *second* formula: the bare double sum cut at m <= a t3 with
  a = max(1, |t1|), whose remainder decays in t3 with a case split on
  sigma2 against 3/2.

Route selection is always explicit.  The regions overlap and differ in
cost; silent switching would make reports unreproducible, so callers (and
the CLI) name the route.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .constants import Constants, DEFAULT_CONSTANTS
from .errors import DomainError, RegionError, SingularHyperplaneError
from .kernel import (
    HEURISTIC,
    ApproxValue,
    ComplexNeumaierSum,
    QuadratureSpec,
    Truncation,
    dirichlet_tail,
    ensure_finite,
    recip_pow_array,
    tail_integral,
    zeta_auto,
)
from .series import (
    ZetaArgs,
    _EQ_TOL,
    _power_table,
    av2_direct,
    av2_truncated,
    mt2_direct,
    mt2_truncated,
)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class FirstApproxParams:
    """Window parameters of the first formula: 1 <= x <= y and C > 1.

    Admissibility additionally requires |t3| <= 2 pi x / C - |t1|, checked
    against concrete arguments by :meth:`check_admissible`.
    """

    x: float
    y: float
    C: float

    def __post_init__(self):
        if not (self.x >= 1.0):
            raise DomainError(f"x >= 1 required (got {self.x:g})")
        if not (self.y >= self.x):
            raise DomainError(f"y >= x required (got y = {self.y:g} < x = {self.x:g})")
        if not (self.C > 1.0):
            raise DomainError(f"C > 1 required (got {self.C:g})")

    def t3_budget(self, t1: float) -> float:
        return TWO_PI * self.x / self.C - abs(t1)

    def check_admissible(self, t1: float, t3: float) -> None:
        if abs(t3) > self.t3_budget(t1):
            raise RegionError(
                "window inadmissible: need |t3| <= 2 pi x / C - |t1| "
                f"(|t3| = {abs(t3):.6g} > {self.t3_budget(t1):.6g})")


def _check_hyperplane(z: complex, label: str, standoff: float) -> None:
    if abs(z) < standoff:
        raise SingularHyperplaneError(
            f"{label} is within {standoff:g} of a singular hyperplane "
            f"(distance {abs(z):.3g})")


def _same_sign_pair(t1: float, t3: float) -> None:
    if t1 == 0.0 and t3 == 0.0:
        raise RegionError("(t1, t3) = (0, 0) is excluded")
    if not ((t1 >= 0.0 and t3 >= 0.0) or (t1 <= 0.0 and t3 <= 0.0)):
        raise RegionError(
            f"(t1, t3) must lie in the same-sign set (got t1 = {t1:g}, t3 = {t3:g}); "
            "mixed-sign pairs are not supported by this formula")


def _x_power_bound(sigma1: float, sigma2: float, sigma3: float, x: float) -> float:
    """The remainder shape of the first formula: case split on sigma2 vs 1."""
    if sigma2 > 1.0 + _EQ_TOL:
        return x ** (-sigma1 - sigma3)
    if abs(sigma2 - 1.0) <= _EQ_TOL:
        return x ** (-sigma1 - sigma3) * math.log(max(x, math.e))
    return x ** (1.0 - sigma1 - sigma2 - sigma3)


def _dirichlet_tail_from(w: complex, N: int) -> ApproxValue:
    """sum_{n > N} n^(-w) for Re(w) > 1, bridging to a cutoff where the
    Euler-Maclaurin bound is small."""
    N_safe = max(N, int(math.ceil(2.0 * (1.0 + abs(w.imag)))), 32)
    tail = dirichlet_tail(w, N_safe)
    if N_safe == N:
        return tail
    n = np.arange(N + 1, N_safe + 1, dtype=np.float64)
    bridge = complex(np.sum(recip_pow_array(n, w)))
    return ApproxValue(value=bridge + tail.value, error_bound=tail.error_bound,
                       rigor=tail.rigor)


def av2_approx_first(args: ZetaArgs, p: FirstApproxParams, quad: QuadratureSpec,
                     constants: Constants = DEFAULT_CONSTANTS) -> ApproxValue:
    """First approximation formula.

    Value = finite double sum (n <= x, n < m <= y)
          + y^(1-s1)/(s1+s3-1) * sum_{n<=x} n^(-s2) (y+n)^(-s3)
          + s3/(s1+s3-1) * sum_{n<=x} n^(1-s2) * int_y^inf u^-s1 (u+n)^-(s3+1) du
          + 2^(-s3)/(s1+s3-1) * sum_{n>x} n^(1-s1-s2-s3)
          + s3/(s1+s3-1) * sum_{n>x} n^(1-s2) * int_n^inf u^-s1 (u+n)^-(s3+1) du.

    The last sum collapses exactly: substituting u = n v shows the integral
    equals n^(-s1-s3) * Phi with Phi = int_1^inf v^-s1 (1+v)^-(s3+1) dv, so
    the sum is Phi times the same Dirichlet tail as the fourth term.  The
    error bound combines the formula's own remainder (heuristic constant
    times the x-power case split on sigma2) with every quadrature and
    Dirichlet-tail budget.
    """
    s1, s2, s3 = args.s1, args.s2, args.s3
    sg1, sg2, sg3 = args.sigma1, args.sigma2, args.sigma3
    _check_hyperplane(s1 + s3 - 1.0, "s1+s3-1", constants.hyperplane_standoff)
    if not (sg1 >= 0.0):
        raise RegionError(f"sigma1 >= 0 required (got {sg1:g})")
    floor3 = max(0.0, 2.0 - sg1 - sg2)
    if not (sg3 > floor3):
        raise RegionError(
            f"sigma3 > max(0, 2 - sigma1 - sigma2) required (got {sg3:g} <= {floor3:g})")
    _same_sign_pair(args.t1, args.t3)
    p.check_admissible(args.t1, args.t3)

    xi = int(math.floor(p.x))
    yi = int(math.floor(p.y))
    denom = s1 + s3 - 1.0
    budget = 0.0

    # (i) finite double sum over n <= x, n < m <= y
    main = ComplexNeumaierSum()
    if xi >= 1 and yi >= 2:
        pow1 = _power_table(s1, yi, True)
        pow2 = _power_table(s2, xi, True)
        pow3 = _power_table(s3, yi + xi, True)
        for n in range(1, xi + 1):
            if n + 1 > yi:
                break
            inner = np.einsum("i,i->", pow1[n + 1:yi + 1], pow3[2 * n + 1:yi + n + 1])
            main.add(complex(pow2[n] * inner))

    # (ii) boundary term at m = y
    ns = np.arange(1, xi + 1, dtype=np.float64)
    b_sum = complex(np.sum(recip_pow_array(ns, s2) *
                           np.exp(-s3 * np.log(p.y + ns)))) if xi >= 1 else 0.0
    term2 = cmath.exp((1.0 - s1) * math.log(p.y)) / denom * b_sum

    # (iii) tail integrals anchored at y, summed over n <= x
    coef3 = s3 / denom
    t3_sum = ComplexNeumaierSum()
    for n in range(1, xi + 1):
        ti = tail_integral(n, p.y, s1, s3, quad)
        weight = cmath.exp((1.0 - s2) * math.log(n))
        t3_sum.add(weight * ti.value)
        budget += abs(coef3) * abs(weight) * ti.error_bound
    term3 = coef3 * t3_sum.total

    # (iv) Dirichlet tail  sum_{n>x} n^{-(s1+s2+s3-1)}
    w = s1 + s2 + s3 - 1.0
    tail4 = _dirichlet_tail_from(w, xi if xi >= 2 else 2)
    extra4 = 0.0 + 0.0j
    if xi < 2:  # bridge n = 2 down to n > x manually
        extra4 = sum(cmath.exp(-w * math.log(n)) for n in range(xi + 1, 3))
    coef4 = cmath.exp(-s3 * math.log(2.0)) / denom
    term4 = coef4 * (tail4.value + extra4)
    budget += abs(coef4) * tail4.error_bound

    # (v) scale-collapsed tail integrals: Phi * the same Dirichlet tail
    phi = tail_integral(1, 1.0, s1, s3, quad)
    coef5 = s3 / denom
    term5 = coef5 * phi.value * (tail4.value + extra4)
    budget += abs(coef5) * (phi.error_bound * abs(tail4.value + extra4)
                            + abs(phi.value) * tail4.error_bound)

    value = main.total + term2 + term3 + term4 + term5
    rem = constants.approx_first_constant * _x_power_bound(sg1, sg2, sg3, p.x)
    bound = rem + budget + constants.fp_slack * (1.0 + abs(value))
    return ApproxValue(value=ensure_finite(value), error_bound=bound, rigor=HEURISTIC,
                       truncation=Truncation(cutoff=max(yi, 2), requested_eps=quad.abs_tol))


def _t3_power_bound_av(sigma1: float, sigma2: float, sigma3: float, t3: float) -> float:
    """Remainder shape of the second formula: case split on sigma2 vs 3/2."""
    if sigma2 > 1.5 + _EQ_TOL:
        return t3 ** (0.5 - sigma1 - sigma3)
    if abs(sigma2 - 1.5) <= _EQ_TOL:
        return t3 ** (0.5 - sigma1 - sigma3) * math.log(max(t3, math.e))
    return t3 ** (1.5 - sigma1 - sigma2 - sigma3)


def av2_approx_second(args: ZetaArgs,
                      constants: Constants = DEFAULT_CONSTANTS,
                      threads: int = 1) -> ApproxValue:
    """Second approximation formula: the double sum cut at m <= a t3.

    a = max(1, |t1|); requires sigma1 >= 0, t1 >= 0, t3 >= 2 and
    sigma3 > max(0, 1/2 - sigma1, 3/2 - sigma1 - sigma2), away from the
    hyperplanes s1+s3 = 1 and s1+s2+s3 = 2.  Negative t1 callers must
    conjugate at the call site.
    """
    s1, s2, s3 = args.s1, args.s2, args.s3
    sg1, sg2, sg3 = args.sigma1, args.sigma2, args.sigma3
    standoff = constants.hyperplane_standoff
    _check_hyperplane(s1 + s3 - 1.0, "s1+s3-1", standoff)
    _check_hyperplane(s1 + s2 + s3 - 2.0, "s1+s2+s3-2", standoff)
    if args.t3 < 2.0:
        raise DomainError(f"t3 >= 2 required (got {args.t3:g})")
    if not (sg1 >= 0.0):
        raise RegionError(f"sigma1 >= 0 required (got {sg1:g})")
    if args.t1 < 0.0:
        raise RegionError(
            f"t1 >= 0 required (got {args.t1:g}); use conjugate symmetry for t1 < 0")
    floor3 = max(0.0, 0.5 - sg1, 1.5 - sg1 - sg2)
    if not (sg3 > floor3):
        raise RegionError(
            "sigma3 > max(0, 1/2 - sigma1, 3/2 - sigma1 - sigma2) required "
            f"(got {sg3:g} <= {floor3:g})")

    a = max(1.0, abs(args.t1))
    M = int(math.floor(a * args.t3))
    value = av2_truncated(args, M, threads)
    bound = constants.approx_second_constant * _t3_power_bound_av(sg1, sg2, sg3, args.t3)
    return ApproxValue(value=ensure_finite(value), error_bound=bound, rigor=HEURISTIC,
                       truncation=Truncation(cutoff=max(M, 2), requested_eps=bound))


def _t3_power_bound_mt(sigma1: float, sigma2: float, sigma3: float, t3: float) -> float:
    """Remainder shape of the square-cutoff formula: max(sigma1, sigma2) vs 3/2."""
    top = max(sigma1, sigma2)
    if top > 1.5 + _EQ_TOL:
        return t3 ** (-min(sigma1 + sigma3, sigma2 + sigma3))
    if abs(top - 1.5) <= _EQ_TOL:
        return t3 ** (-min(sigma1 + sigma3, sigma2 + sigma3)) * math.log(max(t3, math.e))
    return t3 ** (1.5 - sigma1 - sigma2 - sigma3)


def mt2_approx(args: ZetaArgs,
               constants: Constants = DEFAULT_CONSTANTS,
               threads: int = 1) -> ApproxValue:
    """Square-cutoff formula for mt2: both indices cut at b t3,
    b = max(1, |t1|, |t2|)."""
    s1, s2, s3 = args.s1, args.s2, args.s3
    sg1, sg2, sg3 = args.sigma1, args.sigma2, args.sigma3
    standoff = constants.hyperplane_standoff
    _check_hyperplane(s1 + s3 - 1.0, "s1+s3-1", standoff)
    _check_hyperplane(s2 + s3 - 1.0, "s2+s3-1", standoff)
    _check_hyperplane(s1 + s2 + s3 - 2.0, "s1+s2+s3-2", standoff)
    if args.t3 < 2.0:
        raise DomainError(f"t3 >= 2 required (got {args.t3:g})")
    for name, v in (("sigma1", sg1), ("sigma2", sg2)):
        if not (v >= 0.0):
            raise RegionError(f"{name} >= 0 required (got {v:g})")
    for name, v in (("t1", args.t1), ("t2", args.t2)):
        if v < 0.0:
            raise RegionError(f"{name} >= 0 required (got {v:g})")
    floor3 = max(0.0, 0.5 - sg1, 0.5 - sg2, 1.5 - sg1 - sg2)
    if not (sg3 > floor3):
        raise RegionError(
            "sigma3 > max(0, 1/2 - sigma1, 1/2 - sigma2, 3/2 - sigma1 - sigma2) "
            f"required (got {sg3:g} <= {floor3:g})")

    b = max(1.0, abs(args.t1), abs(args.t2))
    M = int(math.floor(b * args.t3))
    value = mt2_truncated(args, M, threads)
    bound = constants.approx_mt_constant * _t3_power_bound_mt(sg1, sg2, sg3, args.t3)
    return ApproxValue(value=ensure_finite(value), error_bound=bound, rigor=HEURISTIC,
                       truncation=Truncation(cutoff=max(M, 2), requested_eps=bound))


# ---------------------------------------------------------------------------
# the symmetric three-term relation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RelationResidual:
    """LHS - RHS of  mt2 = 2^(-s3) zeta(s1+s2+s3) + av2(s1,s2,.) + av2(s2,s1,.),
    with the summed error budget of the four constituents."""

    residual: complex
    budget: float
    mt_value: complex
    rhs_value: complex


def functional_relation_residual(args: ZetaArgs, eps: float, route: str = "direct",
                                 constants: Constants = DEFAULT_CONSTANTS,
                                 threads: int = 1) -> RelationResidual:
    """Evaluate both sides of the relation along the chosen route.

    ``route='direct'`` uses the defining series (absolute region required
    for all four constituents); ``route='approx'`` uses the finite-cutoff
    formulas (t3 >= 2 required).  The residual magnitude should not exceed
    the returned budget.
    """
    if route == "direct":
        mt = mt2_direct(args, eps, threads)
        av_a = av2_direct(args, eps, threads)
        av_b = av2_direct(args.swap12(), eps, threads)
    elif route == "approx":
        mt = mt2_approx(args, constants, threads)
        av_a = av2_approx_second(args, constants, threads)
        av_b = av2_approx_second(args.swap12(), constants, threads)
    else:
        raise DomainError(f"route must be 'direct' or 'approx', got {route!r}")
    z = zeta_auto(args.s1 + args.s2 + args.s3, eps)
    half = cmath.exp(-args.s3 * math.log(2.0))
    rhs = half * z.value + av_a.value + av_b.value
    residual = mt.value - rhs
    budget = (mt.error_bound + av_a.error_bound + av_b.error_bound
              + abs(half) * z.error_bound
              + constants.fp_slack * (1.0 + abs(mt.value) + abs(rhs)))
    return RelationResidual(residual=residual, budget=budget,
                            mt_value=mt.value, rhs_value=rhs)
