"""Self-contained statistics kernel.

Correlations, Student's t test for a correlation coefficient, Pearson's
chi-square test, and exact 1-D earth mover's distance over integer
histograms. p-values are computed from our own incomplete gamma / beta
evaluations (accurate to ~1e-8 absolute) so no external statistics
package is required at runtime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import ValidationError

__all__ = [
    "TestResult",
    "ContingencyTable",
    "pearson_r",
    "spearman_rho",
    "t_test_correlation",
    "chi_square",
    "emd_1d",
]


@dataclass(frozen=True)
class TestResult:
    statistic: float
    df: int
    p_value: float
    degenerate: bool = False

    def __post_init__(self):
        if not (0.0 <= self.p_value <= 1.0):
            raise ValidationError(f"p_value out of [0,1]: {self.p_value}")


@dataclass(frozen=True)
class ContingencyTable:
    rows: tuple[str, ...]
    cols: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.rows) < 2 or len(self.cols) < 2:
            raise ValidationError("contingency table needs >= 2 rows and columns")
        if any(len(r) != len(self.cols) for r in self.counts):
            raise ValidationError("ragged contingency table")
        if any(c < 0 for row in self.counts for c in row):
            raise ValidationError("negative cell count")
        if sum(c for row in self.counts for c in row) <= 0:
            raise ValidationError("empty contingency table")


def _check_vectors(x: Sequence[float], y: Sequence[float]) -> None:
    if len(x) != len(y):
        raise ValidationError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 3:
        raise ValidationError("need at least 3 observations")


def pearson_r(x: Sequence[float], y: Sequence[float]) -> float:
    """Product-moment correlation; raises on zero variance."""
    _check_vectors(x, y)
    n = len(x)
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    sxx = math.fsum((a - mx) ** 2 for a in x)
    syy = math.fsum((b - my) ** 2 for b in y)
    if sxx == 0.0 or syy == 0.0:
        raise ValidationError("zero variance in correlation input")
    sxy = math.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    r = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def _midranks(x: Sequence[float]) -> list[float]:
    order = sorted(range(len(x)), key=lambda i: x[i])
    ranks = [0.0] * len(x)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and x[order[j + 1]] == x[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1.0  # 1-based average rank of the tie block
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def spearman_rho(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation of mid-ranks."""
    _check_vectors(x, y)
    return pearson_r(_midranks(x), _midranks(y))


# --- incomplete beta / gamma machinery -------------------------------------

_EPS = 1e-15
_FPMIN = 1e-300
_MAXIT = 500


def _betacf(a: float, b: float, x: float) -> float:
    # Lentz's continued fraction for the incomplete beta function.
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h


def _reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def _reg_lower_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x)."""
    if x < 0.0 or a <= 0.0:
        raise ValidationError("invalid incomplete gamma arguments")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        # series representation
        ap = a
        term = 1.0 / a
        total = term
        for _ in range(_MAXIT):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * _EPS:
                break
        return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    # continued fraction for Q(a, x)
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAXIT + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    q = math.exp(-x + a * math.log(x) - math.lgamma(a)) * h
    return 1.0 - q


def _chi2_sf(x: float, df: int) -> float:
    if df <= 0:
        return 1.0
    p = 1.0 - _reg_lower_gamma(df / 2.0, x / 2.0)
    return min(1.0, max(0.0, p))


def _t_sf_two_sided(t: float, df: int) -> float:
    # two-sided survival: I_{df/(df+t^2)}(df/2, 1/2)
    x = df / (df + t * t)
    return min(1.0, max(0.0, _reg_inc_beta(df / 2.0, 0.5, x)))


def t_test_correlation(r: float, n: int) -> TestResult:
    """Significance of a Pearson correlation from r and the sample size."""
    if n < 3:
        raise ValidationError("t test for correlation needs n >= 3")
    if abs(r) > 1.0:
        raise ValidationError(f"|r| > 1: {r}")
    df = n - 2
    if abs(r) == 1.0:
        return TestResult(statistic=math.inf, df=df, p_value=0.0, degenerate=True)
    t = r * math.sqrt(df / (1.0 - r * r))
    return TestResult(statistic=t, df=df, p_value=_t_sf_two_sided(t, df))


def chi_square(table: ContingencyTable) -> TestResult:
    """Pearson's chi-square test of independence."""
    row_tot = [sum(row) for row in table.counts]
    col_tot = [sum(col) for col in zip(*table.counts)]
    if any(t == 0 for t in row_tot) or any(t == 0 for t in col_tot):
        raise ValidationError("zero row or column total in contingency table")
    grand = sum(row_tot)
    stat = 0.0
    for i, row in enumerate(table.counts):
        for j, obs in enumerate(row):
            exp = row_tot[i] * col_tot[j] / grand
            stat += (obs - exp) ** 2 / exp
    df = (len(table.rows) - 1) * (len(table.cols) - 1)
    return TestResult(statistic=stat, df=df, p_value=_chi2_sf(stat, df))


def emd_1d(p: Mapping[int, float], q: Mapping[int, float]) -> float:
    """Exact earth mover's distance between normalized integer histograms.

    Ground distance |i - j|; computed as the integral of the absolute CDF
    difference over the merged support.
    """
    for name, h in (("p", p), ("q", q)):
        if not h:
            raise ValidationError(f"empty histogram {name}")
        total = math.fsum(h.values())
        if abs(total - 1.0) > 1e-6:
            raise ValidationError(f"histogram {name} not normalized (mass {total})")
    support = sorted(set(p) | set(q))
    cdf_p = cdf_q = 0.0
    dist = 0.0
    for k, x in enumerate(support):
        cdf_p += p.get(x, 0.0)
        cdf_q += q.get(x, 0.0)
        if k + 1 < len(support):
            dist += abs(cdf_p - cdf_q) * (support[k + 1] - x)
    return dist
