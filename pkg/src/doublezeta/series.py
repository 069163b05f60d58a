"""Truncated-series evaluation of the four double zeta sums.

The two value functions

    av2(s1,s2,s3) = sum_{m>=2} sum_{n<m}  m^-s1 n^-s2 (m+n)^-s3
    mt2(s1,s2,s3) = sum_{m>=1} sum_{n>=1} m^-s1 n^-s2 (m+n)^-s3

and their squared companions

    av2_sq(s1,s2,q) = sum_{k>=2} | sum_{k/2<m<=k-1} m^-s1 (k-m)^-s2 |^2 k^-q
    mt2_sq(s1,s2,q) = sum_{k>=2} | sum_{1<=m<=k-1} m^-s1 (k-m)^-s2 |^2 k^-q

are evaluated inside their absolute-convergence regions with cutoffs chosen
so an explicit integral-test tail majorant falls below the requested eps.
The majorant constants are carried explicitly, so the reported error bound
is a provable bound and rigor stays ``rigorous`` unless the cutoff hits the
configured hard cap.

Accumulation discipline: inner reductions run in ascending index order via
``np.einsum`` (single-threaded, thread-count independent); outer terms are
combined with compensated (Neumaier) accumulation in fixed ascending order,
in blocks of 4096 that may be dispatched to a thread pool and are always
reduced in block order, so results are bit-reproducible for any thread
count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RegionError
from .kernel import (
    HEURISTIC,
    RIGOROUS,
    ApproxValue,
    ComplexNeumaierSum,
    NeumaierSum,
    Truncation,
    ensure_finite,
    recip_pow_array,
)

BLOCK = 4096
DEFAULT_OUTER_CAP = 10**7
_EQ_TOL = 1e-9  # boundary tolerance for the sigma2-vs-1 case split


@dataclass(frozen=True)
class ZetaArgs:
    """The argument triple (s1, s2, s3) of a double zeta evaluation."""

    s1: complex
    s2: complex
    s3: complex

    def __post_init__(self):
        for name in ("s1", "s2", "s3"):
            ensure_finite(getattr(self, name), name)

    @property
    def sigma1(self) -> float:
        return self.s1.real

    @property
    def sigma2(self) -> float:
        return self.s2.real

    @property
    def sigma3(self) -> float:
        return self.s3.real

    @property
    def t1(self) -> float:
        return self.s1.imag

    @property
    def t2(self) -> float:
        return self.s2.imag

    @property
    def t3(self) -> float:
        return self.s3.imag

    def conj(self) -> "ZetaArgs":
        return ZetaArgs(self.s1.conjugate(), self.s2.conjugate(), self.s3.conjugate())

    def swap12(self) -> "ZetaArgs":
        return ZetaArgs(self.s2, self.s1, self.s3)

    def is_real(self) -> bool:
        return self.t1 == 0.0 and self.t2 == 0.0 and self.t3 == 0.0


# ---------------------------------------------------------------------------
# explicit majorants (integral test, constants carried)
# ---------------------------------------------------------------------------

def _pair_power_factor(a: float) -> float:
    """kappa with (m+n)^(-a) <= kappa * max(m,n)^(-a) for 1 <= min < max+max."""
    return max(1.0, 2.0 ** (-a))


def _half_power_factor(a: float) -> float:
    """kappa with m^(-a) <= kappa * k^(-a) whenever k/2 < m <= k."""
    return max(1.0, 2.0 ** a)


def power_sum_envelope(a: float) -> tuple[float, float, int]:
    """(C, p, L) with sum_{n<=x} n^(-a) <= C x^p (1+log x)^L for all x >= 1.

    a > 1 gives a constant, a = 1 the log row, a < 1 the power row; the
    boundary |a-1| < 1e-9 is routed to the log row for continuity.
    """
    if a > 1.0 + _EQ_TOL:
        return (1.0 + 1.0 / (a - 1.0), 0.0, 0)
    if abs(a - 1.0) <= _EQ_TOL:
        return (1.0, 0.0, 1)
    return (1.0 + 1.0 / (1.0 - a), 1.0 - a, 0)


def tail_sum_bound(q: float, L: int, M: int) -> float:
    """Upper bound for sum_{k>M} k^(-q) (1+log k)^L, for q > 1, M >= 3.

    Integral test with the closed antiderivatives; the summand is decreasing
    on [3, inf) whenever q > 1 and L <= 2, which the callers guarantee.
    """
    if not (q > 1.0):
        raise RegionError(
            f"tail majorant diverges: needs exponent > 1, got {q:.6g}")
    if M < 3:
        raise DomainError("tail majorant defined for M >= 3")
    b = q - 1.0
    u = 1.0 + math.log(M)
    scale = M ** (-b)
    if L == 0:
        return scale / b
    if L == 1:
        return scale * (u / b + 1.0 / b**2)
    if L == 2:
        return scale * (u**2 / b + 2.0 * u / b**2 + 2.0 / b**3)
    raise DomainError("log power must be 0, 1 or 2")


def av2_region_check(sigma1: float, sigma2: float, sigma3: float) -> None:
    if not (sigma1 + sigma3 > 1.0):
        raise RegionError(
            f"absolute convergence needs sigma1+sigma3 > 1 (got {sigma1 + sigma3:.6g})")
    if not (sigma1 + sigma2 + sigma3 > 2.0):
        raise RegionError(
            "absolute convergence needs sigma1+sigma2+sigma3 > 2 "
            f"(got {sigma1 + sigma2 + sigma3:.6g})")


def mt2_region_check(sigma1: float, sigma2: float, sigma3: float) -> None:
    if not (sigma1 + sigma3 > 1.0):
        raise RegionError(
            f"absolute convergence needs sigma1+sigma3 > 1 (got {sigma1 + sigma3:.6g})")
    if not (sigma2 + sigma3 > 1.0):
        raise RegionError(
            f"absolute convergence needs sigma2+sigma3 > 1 (got {sigma2 + sigma3:.6g})")
    if not (sigma1 + sigma2 + sigma3 > 2.0):
        raise RegionError(
            "absolute convergence needs sigma1+sigma2+sigma3 > 2 "
            f"(got {sigma1 + sigma2 + sigma3:.6g})")


def av2_sq_region_check(sigma1: float, sigma2: float, sigma3: float) -> None:
    if not (2.0 * sigma1 + sigma3 > 1.0):
        raise RegionError(
            f"absolute convergence needs 2*sigma1+sigma3 > 1 (got {2 * sigma1 + sigma3:.6g})")
    if not (2.0 * sigma1 + 2.0 * sigma2 + sigma3 > 3.0):
        raise RegionError(
            "absolute convergence needs 2*sigma1+2*sigma2+sigma3 > 3 "
            f"(got {2 * sigma1 + 2 * sigma2 + sigma3:.6g})")


def mt2_sq_region_check(sigma1: float, sigma2: float, sigma3: float) -> None:
    if not (2.0 * sigma1 + sigma3 > 1.0):
        raise RegionError(
            f"absolute convergence needs 2*sigma1+sigma3 > 1 (got {2 * sigma1 + sigma3:.6g})")
    if not (2.0 * sigma2 + sigma3 > 1.0):
        raise RegionError(
            f"absolute convergence needs 2*sigma2+sigma3 > 1 (got {2 * sigma2 + sigma3:.6g})")
    if not (2.0 * sigma1 + 2.0 * sigma2 + sigma3 > 2.0):
        raise RegionError(
            "absolute convergence needs 2*sigma1+2*sigma2+sigma3 > 2 "
            f"(got {2 * sigma1 + 2 * sigma2 + sigma3:.6g})")


def av2_tail_majorant(sigma1: float, sigma2: float, sigma3: float, M: int) -> float:
    """Provable bound for |sum over outer index m > M| of the av2 series."""
    C2, p2, L2 = power_sum_envelope(sigma2)
    q = sigma1 + sigma3 - p2
    return _pair_power_factor(sigma3) * C2 * tail_sum_bound(q, L2, M)


def mt2_tail_majorant(sigma1: float, sigma2: float, sigma3: float, M: int) -> float:
    """Provable bound for the mt2 remainder outside the square [1,M]^2."""
    kap = _pair_power_factor(sigma3)

    def one_side(sa: float, sb: float) -> float:
        # sum over {a-index > M, all b-index}; split at b <= a and b > a
        Cb, pb, Lb = power_sum_envelope(sb)
        near = Cb * tail_sum_bound(sa + sigma3 - pb, Lb, M)
        far = tail_sum_bound(sa + sb + sigma3 - 1.0, 0, M) / (sb + sigma3 - 1.0)
        return near + far

    return kap * (one_side(sigma1, sigma2) + one_side(sigma2, sigma1))


def av2_sq_tail_majorant(sigma1: float, sigma2: float, sigma3: float, K: int) -> float:
    """Provable bound for sum_{k>K} |b_k|^2 k^(-sigma3), half-diagonal b_k."""
    C2, p2, L2 = power_sum_envelope(sigma2)
    kap = _half_power_factor(sigma1)
    q = 2.0 * sigma1 + sigma3 - 2.0 * p2
    return (kap * C2) ** 2 * tail_sum_bound(q, 2 * L2, K)


def mt2_sq_tail_majorant(sigma1: float, sigma2: float, sigma3: float, K: int) -> float:
    """Provable bound for the mt2_sq tail via |b_k|^2 <= 2 A_k^2 + 2 B_k^2."""
    def one(sa: float, sb: float) -> float:
        # A_k = kappa(sb) k^-sb S_sa(k) covers the half with the b-factor large
        Ca, pa, La = power_sum_envelope(sa)
        kap = _half_power_factor(sb)
        q = 2.0 * sb + sigma3 - 2.0 * pa
        return 2.0 * (kap * Ca) ** 2 * tail_sum_bound(q, 2 * La, K)

    return one(sigma1, sigma2) + one(sigma2, sigma1)


def choose_cutoff(majorant, eps: float, cap: int = DEFAULT_OUTER_CAP) -> tuple[int, float, str]:
    """Smallest integer M in [3, cap] with majorant(M) <= eps.

    The majorant is monotone decreasing, so integer bisection finds M.
    Hitting the cap clamps M and downgrades rigor to heuristic.
    """
    if not (eps > 0):
        raise DomainError("eps > 0 required")
    if majorant(cap) > eps:
        return cap, majorant(cap), HEURISTIC
    lo, hi = 3, cap  # invariant: majorant(hi) <= eps
    if majorant(lo) <= eps:
        return lo, majorant(lo), RIGOROUS
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if majorant(mid) <= eps:
            hi = mid
        else:
            lo = mid
    return hi, majorant(hi), RIGOROUS


# ---------------------------------------------------------------------------
# power tables and blocked compensated summation
# ---------------------------------------------------------------------------

def _power_table(s: complex, upto: int, force_complex: bool) -> np.ndarray:
    """[0, 1^-s, 2^-s, ..., upto^-s]; index 0 is a guard zero."""
    n = np.arange(1, upto + 1, dtype=np.float64)
    vals = recip_pow_array(n, complex(s))
    if force_complex:
        vals = vals.astype(complex, copy=False)
    out = np.zeros(upto + 1, dtype=vals.dtype)
    out[1:] = vals
    return out


def _blocks(lo: int, hi: int, size: int = BLOCK):
    out = []
    a = lo
    while a < hi:
        b = min(a + size, hi)
        out.append((a, b))
        a = b
    return out


def _reduce_blocks(fn, blocks, threads: int) -> complex:
    """Run fn over blocks (possibly in parallel) and combine the per-block
    totals with compensated accumulation in fixed block order."""
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(fn, blocks))
    else:
        partials = [fn(b) for b in blocks]
    acc = ComplexNeumaierSum()
    for p in partials:
        acc.add(complex(p))
    return acc.total


def av2_truncated(args: ZetaArgs, M: int, threads: int = 1) -> complex:
    """Partial sum over 2 <= m <= M, 1 <= n < m (compensated accumulation)."""
    if M < 2:
        return 0.0 + 0.0j
    force_c = not args.is_real()
    pow1 = _power_table(args.s1, M, force_c)
    pow2 = _power_table(args.s2, M, force_c)
    pow3 = _power_table(args.s3, 2 * M, force_c)

    def block_sum(rng) -> complex:
        a, b = rng
        acc = ComplexNeumaierSum()
        for m in range(a, b):
            inner = np.einsum("i,i->", pow2[1:m], pow3[m + 1:2 * m])
            acc.add(complex(pow1[m] * inner))
        return acc.total

    return _reduce_blocks(block_sum, _blocks(2, M + 1), threads)


def _mt2_diagonal(args: ZetaArgs, M: int) -> complex:
    """sum_{m<=M} m^(-s1-s2) (2m)^(-s3) (the m = n diagonal)."""
    m = np.arange(1, M + 1, dtype=np.float64)
    vals = recip_pow_array(m, complex(args.s1 + args.s2)) * \
        recip_pow_array(2.0 * m, complex(args.s3))
    acc = ComplexNeumaierSum()
    step = 65536
    for a in range(0, len(vals), step):
        acc.add(complex(np.sum(vals[a:a + step])))
    return acc.total


def mt2_truncated(args: ZetaArgs, M: int, threads: int = 1) -> complex:
    """Partial sum over the full square 1 <= m, n <= M.

    For s1 = s2 the square splits as twice the strict lower triangle plus
    the diagonal, halving the work; otherwise full rows are reduced.
    """
    if M < 1:
        return 0.0 + 0.0j
    if args.s1 == args.s2:
        tri = av2_truncated(args, M, threads)
        return 2.0 * tri + _mt2_diagonal(args, M)
    force_c = not args.is_real()
    pow1 = _power_table(args.s1, M, force_c)
    pow2 = _power_table(args.s2, M, force_c)
    pow3 = _power_table(args.s3, 2 * M, force_c)

    def block_sum(rng) -> complex:
        a, b = rng
        acc = ComplexNeumaierSum()
        for m in range(a, b):
            inner = np.einsum("i,i->", pow2[1:M + 1], pow3[m + 1:m + M + 1])
            acc.add(complex(pow1[m] * inner))
        return acc.total

    return _reduce_blocks(block_sum, _blocks(1, M + 1), threads)


def av2_direct(args: ZetaArgs, eps: float, threads: int = 1,
               cap: int = DEFAULT_OUTER_CAP) -> ApproxValue:
    """av2 value with the outer cutoff solved from the tail majorant."""
    av2_region_check(args.sigma1, args.sigma2, args.sigma3)
    maj = lambda M: av2_tail_majorant(args.sigma1, args.sigma2, args.sigma3, M)
    M, bound, rigor = choose_cutoff(maj, eps, cap)
    value = av2_truncated(args, M, threads)
    return ApproxValue(value=ensure_finite(value), error_bound=bound, rigor=rigor,
                       truncation=Truncation(cutoff=M, requested_eps=eps))


def mt2_direct(args: ZetaArgs, eps: float, threads: int = 1,
               cap: int = DEFAULT_OUTER_CAP) -> ApproxValue:
    """mt2 value with the square cutoff solved from the two-sided majorant."""
    mt2_region_check(args.sigma1, args.sigma2, args.sigma3)
    maj = lambda M: mt2_tail_majorant(args.sigma1, args.sigma2, args.sigma3, M)
    M, bound, rigor = choose_cutoff(maj, eps, cap)
    value = mt2_truncated(args, M, threads)
    return ApproxValue(value=ensure_finite(value), error_bound=bound, rigor=rigor,
                       truncation=Truncation(cutoff=M, requested_eps=eps))


# ---------------------------------------------------------------------------
# half-diagonal inner sums  b_k = sum_{k/2 < m <= k-1} m^-s1 (k-m)^-s2
# ---------------------------------------------------------------------------

_DIRECT_K = 256  # below this, per-k reduction; above, the binomial expansion


def _half_diag_direct(pow1: np.ndarray, pow2: np.ndarray, k_lo: int, k_hi: int,
                      out: np.ndarray) -> None:
    for k in range(k_lo, k_hi + 1):
        m_lo = k // 2 + 1
        if m_lo > k - 1:
            continue
        # n = k - m runs down from k - m_lo to 1
        out[k] = np.einsum("i,i->", pow1[m_lo:k], pow2[k - m_lo:0:-1])


def _binomial_coeffs(s1: complex, J: int) -> np.ndarray:
    """C_j of (1-x)^(-s1) = sum_j C_j x^j."""
    C = np.empty(J + 1, dtype=complex)
    C[0] = 1.0
    for j in range(1, J + 1):
        C[j] = C[j - 1] * (s1 + (j - 1)) / j
    return C


def half_diagonal_sums(s1: complex, s2: complex, K: int) -> np.ndarray:
    """b_k for 2 <= k <= K as an array indexed by k (entries 0,1 unused).

    Direct reduction for small k; for large k the factor (k-n)^(-s1) is
    expanded as k^(-s1) (1 - n/k)^(-s1) with the binomial series, which
    converges geometrically because n/k < 1/2 on the half diagonal.  Each
    power of the expansion needs only a prefix sum of n^(j-s2), so a dyadic
    bucket of k values costs O(J * bucket width) instead of O(k) per k.
    """
    s1 = complex(s1)
    s2 = complex(s2)
    if K < 2:
        raise DomainError("K >= 2 required")
    real_case = s1.imag == 0.0 and s2.imag == 0.0
    dtype = np.float64 if real_case else complex
    b = np.zeros(K + 1, dtype=dtype)

    k_direct = min(K, _DIRECT_K)
    pow1 = _power_table(s1, k_direct, not real_case)
    pow2 = _power_table(s2, k_direct, not real_case)
    _half_diag_direct(pow1, pow2, 2, k_direct, b)
    if K <= _DIRECT_K:
        return b

    J = max(72, int(2.0 * abs(s1)) + 48)
    C = _binomial_coeffs(s1, J)
    if real_case:
        C = C.real.copy()
    # remainder of the binomial series is geometric with ratio < ~0.55 once
    # j exceeds |s1|; verify the worst case is negligible
    ratio_max = 0.5
    tail_scale = np.abs(C[J]) * ratio_max**J
    if not (tail_scale < 1e-16):
        raise DomainError(
            f"binomial expansion for |s1| = {abs(s1):.3g} needs more than {J} terms")

    L = _DIRECT_K
    while L < K:
        lo, hi = L + 1, min(2 * L, K)
        ks = np.arange(lo, hi + 1)
        q_k = (ks + 1) // 2 - 1          # inner length: n runs 1..q_k
        n_ref = L                         # q_k <= L for k <= 2L
        n = np.arange(1, n_ref + 1, dtype=np.float64)
        base = recip_pow_array(n, s2)
        if not real_case:
            base = base.astype(complex, copy=False)
        x = n / n_ref

        ratio = n_ref / ks.astype(np.float64)      # (n_ref / k) <= 1
        kpow = recip_pow_array(ks.astype(np.float64), s1)
        acc = np.zeros(len(ks), dtype=dtype)
        r_pow = np.ones(len(ks), dtype=np.float64)
        term = base.copy()
        idx = q_k - 1
        for j in range(J + 1):
            cums = np.cumsum(term)
            acc += (C[j] * r_pow) * cums[idx]
            if j < J:
                term *= x
                r_pow *= ratio
        b[lo:hi + 1] = kpow * acc
        L = hi
    return b


def _sq_assemble(b: np.ndarray, sigma3: float, K: int) -> float:
    """sum_{k=2}^{K} |b_k|^2 k^(-sigma3), compensated across 64k chunks."""
    k = np.arange(2, K + 1, dtype=np.float64)
    mags = (b[2:K + 1].real ** 2 + b[2:K + 1].imag ** 2) if np.iscomplexobj(b) \
        else b[2:K + 1] ** 2
    vals = mags * np.exp(-sigma3 * np.log(k))
    acc = NeumaierSum()
    step = 65536
    for a in range(0, len(vals), step):
        acc.add(float(np.sum(vals[a:a + step])))
    return acc.total


def av2_sq(s1: complex, s2: complex, sigma3: float, eps: float,
           cap: int = DEFAULT_OUTER_CAP) -> ApproxValue:
    """Half-diagonal squared series; real-valued, imaginary part exactly 0."""
    s1, s2 = complex(s1), complex(s2)
    av2_sq_region_check(s1.real, s2.real, sigma3)
    maj = lambda K: av2_sq_tail_majorant(s1.real, s2.real, sigma3, K)
    K, bound, rigor = choose_cutoff(maj, eps, cap)
    b = half_diagonal_sums(s1, s2, K)
    total = _sq_assemble(b, sigma3, K)
    return ApproxValue(value=complex(total, 0.0), error_bound=bound, rigor=rigor,
                       truncation=Truncation(cutoff=K, requested_eps=eps))


def mt2_sq(s1: complex, s2: complex, sigma3: float, eps: float,
           cap: int = DEFAULT_OUTER_CAP, accelerate: bool = False) -> ApproxValue:
    """Full-diagonal squared series, assembled from two half diagonals plus
    the midpoint term (k even).

    With ``accelerate=True`` a clamped cutoff additionally gets the tail
    estimated from the diagonal sum's three-term asymptotic (power, plus two
    zeta corrections); the asymptotic's quality is measured against the
    exact diagonal sums near the cutoff, so the added bound is empirical
    (rigor stays heuristic, which a clamped cutoff forces anyway).  This
    matters when the series decays barely faster than 1/k and no feasible
    cutoff reaches the requested eps.
    """
    s1, s2 = complex(s1), complex(s2)
    mt2_sq_region_check(s1.real, s2.real, sigma3)
    maj = lambda K: mt2_sq_tail_majorant(s1.real, s2.real, sigma3, K)
    K, bound, rigor = choose_cutoff(maj, eps, cap)
    b = half_diagonal_sums(s1, s2, K)
    b2 = half_diagonal_sums(s2, s1, K) if s1 != s2 else b
    b_full = b.astype(complex) + b2
    evens = np.arange(2, K + 1, 2)
    b_full[evens] += recip_pow_array((evens // 2).astype(np.float64), s1 + s2)
    total = _sq_assemble(b_full, sigma3, K)
    if accelerate and rigor == HEURISTIC:
        est, est_err = _mt2_sq_tail_estimate(s1, s2, sigma3, K, b_full)
        if est_err < bound:
            total += est
            bound = est_err
    return ApproxValue(value=complex(total, 0.0), error_bound=bound, rigor=rigor,
                       truncation=Truncation(cutoff=K, requested_eps=eps))


def _mt2_sq_tail_estimate(s1: complex, s2: complex, sigma3: float, K: int,
                          b_full: np.ndarray) -> tuple[float, float]:
    """Estimate sum_{k>K} |b_k|^2 k^(-sigma3) from the asymptotic

        b_k ~ Beta(1-s1, 1-s2) k^(1-s1-s2) + zeta(s2) k^(-s1) + zeta(s1) k^(-s2)

    valid for 0 < Re(s1), Re(s2) < 1.  The estimate's own error is taken
    from the observed misfit of the asymptotic against the exact b_k over
    the top decade below K.  Returns (0, inf) when not applicable.
    """
    from .kernel import dirichlet_tail, log_gamma, riemann_zeta_em

    sg1, sg2 = s1.real, s2.real
    if not (0.0 < sg1 < 1.0 and 0.0 < sg2 < 1.0):
        return 0.0, math.inf
    exps = (s1 + s2 - 1.0, s1, s2)
    min_q = min((ea + eb.conjugate()).real for ea in exps for eb in exps) + sigma3
    if min_q <= 1.0:
        return 0.0, math.inf

    import cmath
    B = cmath.exp(log_gamma(1.0 - s1) + log_gamma(1.0 - s2) - log_gamma(2.0 - s1 - s2))
    z1 = riemann_zeta_em(s1, max(64, int(4 * (1 + abs(s1.imag)))), 8).value
    z2 = riemann_zeta_em(s2, max(64, int(4 * (1 + abs(s2.imag)))), 8).value
    coefs = (B, z2, z1)

    def beta_of(k: np.ndarray) -> np.ndarray:
        out = np.zeros(len(k), dtype=complex)
        for c, e in zip(coefs, exps):
            out += c * recip_pow_array(k, e)
        return out

    ks = np.arange(max(K // 2, 3), K + 1, dtype=np.float64)
    misfit = np.abs(b_full[int(ks[0]):K + 1] - beta_of(ks))
    rel = float(np.max(misfit / np.maximum(1e-300, np.abs(beta_of(ks)))))

    est = 0.0
    for ca, ea in zip(coefs, exps):
        for cb, eb in zip(coefs, exps):
            q = ea + eb.conjugate() + sigma3
            est += (ca * cb.conjugate() * dirichlet_tail(q, K).value).real
    # |b|^2 vs |beta|^2 differs by <= 2 rel + rel^2 relatively
    err = abs(est) * (2.0 * rel + rel * rel) * 1.5 + 1e-12 * (1.0 + abs(est))
    return est, err


# ---------------------------------------------------------------------------
# diagonal-weight representation for repeated evaluation in s3
# ---------------------------------------------------------------------------

class DiagonalSeries:
    """Coefficient sums over the diagonal m+n = k for a growing outer cutoff.

    For fixed (s1, s2) the truncated double sum becomes a Dirichlet
    polynomial in s3:

        sum = sum_k w_k(M) k^(-s3),
        w_k(M) = sum over admitted (m, n) with m+n = k.

    kind 'av' admits n < m <= M, kind 'mt' admits m, n <= M.  Growing M only
    appends terms, so a t3 sweep with a rising cutoff reuses all previous
    work; updates are applied in ascending m, making the weights (and every
    value computed from them) independent of how the sweep is chunked.
    """

    def __init__(self, kind: str, s1: complex, s2: complex):
        if kind not in ("av", "mt"):
            raise DomainError("kind must be 'av' or 'mt'")
        self.kind = kind
        self.s1 = complex(s1)
        self.s2 = complex(s2)
        # nothing admitted yet: av admits m >= 2, mt admits m >= 1
        self.M = 1 if kind == "av" else 0
        self._cap = 1024
        self._pow1 = _power_table(self.s1, self._cap, True)
        self._pow2 = _power_table(self.s2, self._cap, True)
        self._w = np.zeros(2 * self._cap + 1, dtype=complex)
        self._lnk = np.concatenate([[0.0], np.log(np.arange(1, 2 * self._cap + 1))])

    def _ensure_capacity(self, M: int) -> None:
        if M <= self._cap:
            return
        cap = self._cap
        while cap < M:
            cap *= 2
        self._pow1 = _power_table(self.s1, cap, True)
        self._pow2 = _power_table(self.s2, cap, True)
        w = np.zeros(2 * cap + 1, dtype=complex)
        w[:len(self._w)] = self._w
        self._w = w
        self._lnk = np.concatenate([[0.0], np.log(np.arange(1, 2 * cap + 1))])
        self._cap = cap

    def grow(self, M: int) -> None:
        """Extend the admitted index set up to outer cutoff M."""
        if M <= self.M:
            return
        self._ensure_capacity(M)
        w, p1, p2 = self._w, self._pow1, self._pow2
        if self.kind == "av":
            for m in range(self.M + 1, M + 1):
                if m >= 2:
                    w[m + 1:2 * m] += p1[m] * p2[1:m]
        else:
            for m in range(self.M + 1, M + 1):
                # new row (m, n <= m) and new column (mu < m, m)
                w[m + 1:2 * m + 1] += p1[m] * p2[1:m + 1]
                if m >= 2:
                    w[m + 1:2 * m] += p2[m] * p1[1:m]
        self.M = M

    def value(self, s3: complex, M: int | None = None) -> complex:
        """sum_k w_k k^(-s3) at the current (or requested) cutoff."""
        if M is not None:
            self.grow(M)
        hi = 2 * self.M
        phase = np.exp(-complex(s3) * self._lnk[:hi + 1])
        return complex(np.einsum("i,i->", self._w[:hi + 1], phase))
