"""
Cut-off rate of Rayleigh fading (zero specular component) when the receiver
knows an estimate of the fading.

Given the side information S = s the fading is H ~ CN(dhat_s, eps2), so the
channel is Ricean with an un-normalized specular part; unconditionally dhat_s
is CN(0, 1 - eps2), hence u = |dhat_s|^2 is exponential with mean 1 - eps2.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Union

from scipy import special

from cutoff_duality.quadrature.main import (
    DEFAULT_QUAD_SPEC,
    ExponentialEnvelope,
    QuadSpec,
    integrate_halfline,
)
from cutoff_duality.ricean.main import (
    LOG_TWO_PI,
    AmplitudeLaw,
    RiceanParams,
    asymptotic_constant_no_si,
    capacity_constant,
    lower_bound_closed_form,
    optimize_upper_bound,
    upper_bound_r0,
)
from cutoff_duality.specfun.main import elliptic_k_complement
from cutoff_duality.types.error_types import DomainError, ParameterError, PreconditionError
from cutoff_duality.types.main import BoundPoint, ExponentCurve
from cutoff_duality.utils.main import check_ascending
from cutoff_duality.utils.typing.custom_typing import FigureTwoRow, SideInfoRow

logger = logging.getLogger(__name__)


def _check_eps2(eps2: float):
    if not (math.isfinite(eps2) and 0 < eps2 <= 1):
        raise DomainError(f"eps2 must lie in (0, 1], got {eps2!r}")


@dataclass(frozen=True)
class SideInfoParams:
    """
    Attributes:
        eps2 (float): Conditional fading variance given the side information,
            in (0, 1]; 1 means no side information.
        power (float): Power E allowed per channel use.
        sigma2 (float): Noise variance.
    """

    eps2: float
    power: float
    sigma2: float = 1.0

    def __post_init__(self):
        _check_eps2(self.eps2)
        if not (math.isfinite(self.power) and self.power > 0):
            raise DomainError(f"power must be positive, got {self.power!r}")
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0):
            raise DomainError(f"sigma2 must be positive, got {self.sigma2!r}")

    @property
    def snr(self) -> float:
        return self.power / self.sigma2

    def conditional_channel(self, u: float) -> RiceanParams:
        """
        Ricean channel seen when |dhat_s|^2 = u, rescaled to unit granular
        variance: specular part sqrt(u / eps2) and power eps2 * E.
        """
        return RiceanParams(
            power=self.eps2 * self.power,
            d=math.sqrt(u / self.eps2),
            sigma2=self.sigma2,
        )


@dataclass(frozen=True)
class ConditionalRicean:
    """
    Channel given one side-information realization: fading CN(dhat, eps2).
    """

    dhat: float
    eps2: float
    sigma2: float = 1.0

    def __post_init__(self):
        if not self.eps2 > 0:
            raise DomainError("eps2 = 0 is the coherent channel, which is not handled")
        _check_eps2(self.eps2)

    @property
    def specular_ratio(self) -> float:
        return abs(self.dhat) / math.sqrt(self.eps2)


def conditional_constant(c: ConditionalRicean) -> float:
    """
    Second-order term of R0 given S = s:
    |dhat|^2/(2 eps2) - log 2 pi - 2 log I0(|dhat|^2/(4 eps2)).
    """
    return asymptotic_constant_no_si(c.specular_ratio)


def asymptotic_constant_si(eps2: float) -> float:
    """
    Second-order term of R0 with side information,
    log(1/eps2) - log K(sqrt(1 - eps2^2)) - log 4.
    """
    _check_eps2(eps2)
    return -math.log(eps2) - math.log(elliptic_k_complement(eps2 * eps2)) - math.log(4)


def small_eps_expansion(eps2: float) -> float:
    """
    log(1/eps2) - log log(4/eps2) - log 4, the small-eps2 form of
    ``asymptotic_constant_si``.
    """
    _check_eps2(eps2)
    return -math.log(eps2) - math.log(math.log(4 / eps2)) - math.log(4)


def _side_information_law(eps2: float) -> ExponentialEnvelope:
    spread = 1 - eps2
    return ExponentialEnvelope(amplitude=1 / spread, rate=1 / spread)


def si_constant_by_integration(eps2: float, spec: QuadSpec = DEFAULT_QUAD_SPEC) -> float:
    """
    -log E[exp(-conditional constant)] over the law of the side information,
    i.e. -log of the integral over u >= 0 of
    (2 pi / (1 - eps2)) exp(-u/(1 - eps2)) I0e(u/(4 eps2))^2.
    """
    _check_eps2(eps2)
    if eps2 == 1:
        return -LOG_TWO_PI
    spread = 1 - eps2

    def integrand(u: float) -> float:
        return 2 * math.pi / spread * math.exp(-u / spread) * special.i0e(u / (4 * eps2)) ** 2

    law = _side_information_law(eps2)
    envelope = ExponentialEnvelope(amplitude=2 * math.pi * law.amplitude, rate=law.rate)
    return -math.log(integrate_halfline(integrand, spec, envelope).value)


def si_upper_bound_finite(
    params: SideInfoParams,
    delta: Union[float, None] = None,
    m1: Union[float, None] = None,
    spec: QuadSpec = DEFAULT_QUAD_SPEC,
) -> float:
    """
    Upper bound on R0(E | S): -log E[exp(-U(s))], where U(s) is the Ricean
    upper bound of the channel given S = s.

    With ``delta`` and ``m1`` that pair is used for every realization where it
    keeps a(alpha, beta, delta, m1) > 0; elsewhere, and when no pair is given,
    U(s) is minimized over the default (delta, m1) grid.
    """
    if params.eps2 == 1:
        base = params.conditional_channel(0.0)
        if delta is None and m1 is None:
            return upper_bound_r0(base)
        return upper_bound_r0(base, delta=delta, m1=m1)
    if (delta is None) != (m1 is None):
        raise PreconditionError("delta and m1 must be given together")
    spread = 1 - params.eps2

    def conditional_bound(u: float) -> float:
        channel = params.conditional_channel(u)
        if delta is not None:
            try:
                return upper_bound_r0(channel, delta=delta, m1=m1)
            except ParameterError:
                logger.debug("delta=%.3g m1=%.3g infeasible at u=%.6g", delta, m1, u)
        return optimize_upper_bound(channel).value

    def integrand(u: float) -> float:
        bound = conditional_bound(u)
        return math.exp(-u / spread - bound) / spread

    total = integrate_halfline(integrand, spec, _side_information_law(params.eps2))
    return -math.log(total.value)


def si_lower_bound_finite(
    params: SideInfoParams, spec: QuadSpec = DEFAULT_QUAD_SPEC
) -> float:
    """
    Lower bound on R0(E | S): -log E[exp(-L(s))], where L(s) is the
    closed-form log-uniform lower bound of the channel given S = s.

    Raises:
        DomainError: When the noise penalty of L(s), which grows linearly in
            |dhat_s|^2, outgrows the exponential law of |dhat_s|^2, so that
            the expectation diverges.
    """
    if params.eps2 == 1:
        return lower_bound_closed_form(params.conditional_channel(0.0))
    spread = 1 - params.eps2
    law = AmplitudeLaw.log_uniform(params.eps2 * params.power)
    low, high = law.log_range
    x_min2 = law.min_radius**2
    rate = 1 / spread - params.sigma2 / (params.eps2 * (x_min2 + params.sigma2))
    if rate <= 0:
        raise DomainError(
            f"lower bound diverges at eps2={params.eps2:.6g}, E={params.power:.6g}: "
            f"noise penalty rate exceeds the side-information decay 1/(1 - eps2)"
        )

    def integrand(u: float) -> float:
        bound = lower_bound_closed_form(params.conditional_channel(u))
        return math.exp(-u / spread - bound) / spread

    amplitude = 2 * math.pi / (high - low) * (1 + params.sigma2 / x_min2) / spread
    total = integrate_halfline(integrand, spec, ExponentialEnvelope(amplitude, rate))
    return -math.log(total.value)


def figure_two_rows(eps2_grid: Sequence[float]) -> List[FigureTwoRow]:
    """
    Second-order terms of capacity and cut-off rate versus eps2, and their gap.
    """
    rows = []
    for eps2 in eps2_grid:
        capacity = capacity_constant(0.0, eps2)
        cutoff = asymptotic_constant_si(eps2)
        rows.append(
            FigureTwoRow(
                eps2=float(eps2),
                capacity_constant_nats=capacity,
                cutoff_constant_nats=cutoff,
                gap_nats=capacity - cutoff,
            )
        )
    return rows


def si_sweep(
    eps2_grid: Sequence[float],
    snr_grid: Sequence[float],
    sigma2: float = 1.0,
    delta: Union[float, None] = None,
    m1: Union[float, None] = None,
    spec: QuadSpec = DEFAULT_QUAD_SPEC,
) -> ExponentCurve:
    """
    Finite-SNR bracket of R0 with side information on an (eps2, SNR) grid,
    eps2-major, each grid in ascending order.
    """
    eps2_grid = check_ascending(eps2_grid, "eps2 grid")
    snr_grid = check_ascending(snr_grid, "SNR grid")

    curve = ExponentCurve(
        columns=tuple(SideInfoRow.__annotations__),
        metadata={"sigma2": sigma2, "delta": delta, "m1": m1},
    )
    for eps2 in eps2_grid:
        for snr in snr_grid:
            params = SideInfoParams(eps2=eps2, power=snr * sigma2, sigma2=sigma2)
            lower = si_lower_bound_finite(params, spec)
            upper = si_upper_bound_finite(params, delta, m1, spec)
            asymptote = math.log(math.log(snr)) + asymptotic_constant_si(eps2)
            point = BoundPoint(snr=snr, lower_bound=lower, upper_bound=upper, asymptote=asymptote)
            curve.append(
                dict(
                    SideInfoRow(
                        eps2=float(eps2),
                        snr=float(snr),
                        lower_nats=point.lower_bound,
                        upper_nats=point.upper_bound,
                        asymptote_nats=point.asymptote,
                        capacity_constant_nats=capacity_constant(0.0, eps2),
                    )
                )
            )
    logger.info("computed side-information bracket on %d points", len(curve.rows))
    return curve
