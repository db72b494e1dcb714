"""
Deviation probabilities of the empirical mean of the site variables, and tail
exponent fits for the deviation-event probabilities.
"""

import math
from typing import Iterable, List, Sequence

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import rel_entr
from scipy.stats import binom

from idslab.core.errors import ConfigError
from idslab.core.logging import get_logger
from idslab.schemas.field import BernoulliLaw, DisorderLaw, UniformLaw, support_radius
from idslab.schemas.reports import DeviationEstimate, LdRate, TailFit

logger = get_logger("large_deviations")

MIN_TAIL_POINTS = 4
MIN_CONFORMING_SLOPE = 0.05
_EXACT_SUM_MAX_CELLS = 100_000
_BOUNDARY_TOL = 1e-9


def _range(law: DisorderLaw) -> float:
    if isinstance(law, BernoulliLaw):
        return abs(law.v1 - law.v0)
    return law.b - law.a


def hoeffding(law: DisorderLaw, threshold: float, cells: int) -> float:
    """2 exp(-2 m t^2 / range^2), capped at 1."""
    width = _range(law)
    if width == 0.0:
        return 0.0 if threshold > 0.0 else 1.0
    return min(1.0, 2.0 * math.exp(-2.0 * cells * threshold ** 2 / width ** 2))


def _bernoulli_side_rates(law: BernoulliLaw, threshold: float) -> List[float]:
    """Relative-entropy rates KL(q || p) for q = p +- t/range, inf when q leaves [0, 1]."""
    rates = []
    step = threshold / abs(law.v1 - law.v0)
    for q in (law.p + step, law.p - step):
        if q < 0.0 or q > 1.0:
            rates.append(math.inf)
        else:
            rates.append(float(rel_entr(q, law.p) + rel_entr(1.0 - q, 1.0 - law.p)))
    return rates


def _log_sinhc(x: float) -> float:
    """log(sinh(x)/x) without overflow."""
    if x < 1e-4:
        return x * x / 6.0
    if x > 20.0:
        return x + math.log1p(-math.exp(-2.0 * x)) - math.log(2.0 * x)
    return math.log(math.sinh(x) / x)


def _uniform_rate(law: UniformLaw, threshold: float) -> float:
    """Cramer rate sup_l (l t - log E exp(l X)) of the centred uniform law."""
    half = 0.5 * (law.b - law.a)
    if threshold >= half:
        return math.inf
    upper = 8.0 / (half - threshold) + 8.0 / half
    result = minimize_scalar(
        lambda lam: -(lam * threshold - _log_sinhc(lam * half)),
        bounds=(0.0, upper),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return max(0.0, -float(result.fun))


def _bernoulli_tail(law: BernoulliLaw, threshold: float, cells: int) -> float:
    """P(|K - m p| >= m t / range) for K ~ Binomial(m, p), summed from the pmf."""
    width = abs(law.v1 - law.v0)
    centre = cells * law.p
    reach = cells * threshold / width
    low = math.floor(centre - reach + _BOUNDARY_TOL)
    high = math.ceil(centre + reach - _BOUNDARY_TOL)
    if cells > _EXACT_SUM_MAX_CELLS:
        lower = binom.cdf(low, cells, law.p) if low >= 0 else 0.0
        upper = binom.sf(high - 1, cells, law.p) if high <= cells else 0.0
        return float(min(1.0, lower + upper))
    ks = np.arange(cells + 1)
    tail = (ks <= low) | (ks >= high)
    return float(min(1.0, np.sum(binom.pmf(ks[tail], cells, law.p))))


def ld_rate(disorder: DisorderLaw, threshold: float, cells: int) -> LdRate:
    """
    P(|mean of `cells` centred draws| >= threshold): the exact binomial tail for
    Bernoulli laws, the tighter of Hoeffding and Chernoff for uniform laws, with
    the Chernoff rate per cell next to it.
    """
    if cells < 1:
        raise ConfigError(f"cells must be >= 1, got {cells}")
    if threshold < 0.0 or not math.isfinite(threshold):
        raise ConfigError(f"threshold must be a finite t >= 0, got {threshold}")

    bound = hoeffding(disorder, threshold, cells)
    if threshold == 0.0:
        return LdRate(cells=cells, threshold=threshold, probability=1.0, exact=True,
                      hoeffding_bound=bound, chernoff_bound=1.0, rate=0.0)
    if threshold > support_radius(disorder):
        return LdRate(cells=cells, threshold=threshold, probability=0.0, exact=True,
                      hoeffding_bound=bound, chernoff_bound=0.0, rate=math.inf)

    if isinstance(disorder, BernoulliLaw):
        sides = _bernoulli_side_rates(disorder, threshold)
        probability = _bernoulli_tail(disorder, threshold, cells)
        exact = True
    else:
        rate = _uniform_rate(disorder, threshold)
        sides = [rate, rate]
        exact = False
        probability = None

    chernoff = min(1.0, sum(math.exp(-cells * r) for r in sides if math.isfinite(r)))
    if probability is None:
        probability = min(bound, chernoff)
    return LdRate(
        cells=cells,
        threshold=threshold,
        probability=probability,
        exact=exact,
        hoeffding_bound=bound,
        chernoff_bound=chernoff,
        rate=min(sides),
    )


def fit_tail_curve(energies: Sequence[float], probabilities: Sequence[float]) -> TailFit:
    """
    Least squares log(-log p) = tau * log(1/E) + b over the points with 0 < p < 1.
    """
    e = np.asarray(energies, dtype=float)
    p = np.asarray(probabilities, dtype=float)
    if e.shape != p.shape:
        raise ConfigError("energies and probabilities must have the same length")
    if np.any(e <= 0.0):
        raise ConfigError("tail fit energies must be positive")

    usable = (p > 0.0) & (p < 1.0)
    if p.size and not np.any(p > 0.0):
        return TailFit(points=0, conforming=True,
                       status="consistent with bound, tau unbounded below the resolution")
    if np.count_nonzero(usable) < MIN_TAIL_POINTS:
        return TailFit(points=int(np.count_nonzero(usable)), conforming=False,
                       status=f"need at least {MIN_TAIL_POINTS} estimates with 0 < p < 1")

    x = np.log(1.0 / e[usable])
    y = np.log(-np.log(p[usable]))
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    conforming = bool(slope > MIN_CONFORMING_SLOPE)
    status = "fitted" if conforming else "non-conforming: slope not positive"
    logger.debug("tail fit tau=%.4g intercept=%.4g residual=%.3g", slope, intercept, residual)
    return TailFit(
        tau=float(slope),
        intercept=float(intercept),
        residual=residual,
        points=int(x.size),
        conforming=conforming,
        status=status,
    )


def fit_tail(estimates: Iterable[DeviationEstimate]) -> TailFit:
    """Fit the tail exponent of p_hat over the energies of a deviation scan."""
    estimates = list(estimates)
    return fit_tail_curve([est.energy for est in estimates], [est.p_hat for est in estimates])
