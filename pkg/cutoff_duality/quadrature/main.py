"""
Adaptive Gauss-Kronrod integration over intervals, half-lines and the complex
plane, built on QUADPACK. A result that misses its tolerance raises
QuadratureAccuracyError instead of warning.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple, Sequence, Union

import numpy as np
from scipy import integrate

from cutoff_duality.types.error_types import (
    PreconditionError,
    QuadratureAccuracyError,
)
from cutoff_duality.utils.typing.custom_typing import (
    PolarFunction,
    RealFunction,
    TailCutoffPolicy,
    TailCutoffPolicyEnum,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadSpec:
    """
    Tolerances for adaptive Gauss-Kronrod integration.

    Attributes:
        abs_tol (float): Absolute tolerance, defaults to 1e-12.
        rel_tol (float): Relative tolerance, defaults to 1e-10.
        max_subdivisions (int): Maximum number of subintervals, defaults to 200.
        tail_cutoff_policy (TailCutoffPolicy): ``"envelope"`` truncates
            half-line integrals where the caller's exponential envelope
            certifies a tail below ``abs_tol / 2``; ``"transform"`` maps the
            infinite range onto a finite one instead.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 200
    tail_cutoff_policy: TailCutoffPolicy = "envelope"

    def __post_init__(self):
        """
        Performs post-initialization checks for the tolerances.
        """
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise PreconditionError("tolerances must be non-negative")
        if self.abs_tol == 0 and self.rel_tol == 0:
            raise PreconditionError("abs_tol > 0 or rel_tol > 0 is required")
        if self.max_subdivisions < 1:
            raise PreconditionError("max_subdivisions must be at least 1")
        policies = [policy.value for policy in TailCutoffPolicyEnum]
        if self.tail_cutoff_policy not in policies:
            raise PreconditionError(
                f"tail_cutoff_policy must be one of {policies}, "
                f"got {self.tail_cutoff_policy!r}"
            )

    def scaled(self, factor: float) -> "QuadSpec":
        """
        Returns a copy with both tolerances multiplied by ``factor``.
        """
        return replace(
            self, abs_tol=self.abs_tol * factor, rel_tol=self.rel_tol * factor
        )


DEFAULT_QUAD_SPEC = QuadSpec()


class QuadResult(NamedTuple):
    value: float
    error: float
    subdivisions: int


@dataclass(frozen=True)
class ExponentialEnvelope:
    """
    Certifies |f(t)| <= amplitude * exp(-rate * t) on the integration range.
    """

    amplitude: float
    rate: float

    def __post_init__(self):
        if self.amplitude <= 0 or self.rate <= 0:
            raise PreconditionError("envelope amplitude and rate must be positive")

    def tail_mass(self, t: float) -> float:
        return self.amplitude / self.rate * math.exp(-self.rate * t)

    def cutoff(self, target: float) -> float:
        """
        Smallest t whose tail mass is at most ``target``.
        """
        return math.log(self.amplitude / (self.rate * target)) / self.rate


def _run_quad(
    f: RealFunction,
    a: float,
    b: float,
    spec: QuadSpec,
    points: Union[Sequence[float], None] = None,
) -> QuadResult:
    out = integrate.quad(
        f,
        a,
        b,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        limit=spec.max_subdivisions,
        points=points,
        full_output=1,
    )
    value, error, info = out[0], out[1], out[2]
    subdivisions = int(info.get("last", 0)) if isinstance(info, dict) else 0
    if len(out) > 3:
        raise QuadratureAccuracyError(
            f"quadrature on [{a}, {b}] did not converge: {out[3]}",
            estimate=value,
            error=error,
            subdivisions=subdivisions,
        )
    return QuadResult(value, error, subdivisions)


def integrate_interval(
    f: RealFunction,
    a: float,
    b: float,
    spec: QuadSpec = DEFAULT_QUAD_SPEC,
    points: Union[Sequence[float], None] = None,
) -> QuadResult:
    """
    Integrates ``f`` over the finite interval [a, b].

    Integrable endpoint singularities (e.g. t^(-1/2) at 0) are handled by the
    extrapolation of the underlying QAGS rule.

    Args:
        f (Callable[[float], float]): Integrand.
        a (float): Lower limit.
        b (float): Upper limit, must exceed ``a``.
        spec (QuadSpec): Tolerances.
        points (Sequence[float], optional): Interior breakpoints.

    Returns:
        QuadResult: Value, error estimate and number of subintervals.

    Raises:
        PreconditionError: If the interval is empty or not finite.
        QuadratureAccuracyError: If the tolerance is not reached.
    """
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise PreconditionError(f"integration interval [{a}, {b}] must satisfy a < b")
    if points is not None:
        points = [p for p in points if a < p < b]
    return _run_quad(f, a, b, spec, points or None)


def integrate_halfline(
    f: RealFunction,
    spec: QuadSpec = DEFAULT_QUAD_SPEC,
    envelope: Union[ExponentialEnvelope, None] = None,
    lower: float = 0.0,
) -> QuadResult:
    """
    Integrates ``f`` over [lower, inf).

    With the ``"envelope"`` policy and an envelope supplied, the range is
    truncated at the point where the envelope's tail mass drops below half the
    tolerance budget, and that tail bound is added to the error estimate.

    Args:
        f (Callable[[float], float]): Integrand.
        spec (QuadSpec): Tolerances and tail policy.
        envelope (ExponentialEnvelope, optional): Bound on |f| for t >= lower.
        lower (float): Lower limit, defaults to 0.

    Returns:
        QuadResult: Value, error estimate and number of subintervals.
    """
    if envelope is None or spec.tail_cutoff_policy == "transform":
        return _run_quad(f, lower, np.inf, spec)

    if spec.abs_tol > 0:
        target = spec.abs_tol / 2
    else:
        target = spec.rel_tol * envelope.tail_mass(lower) / 2
    cutoff = envelope.cutoff(target)
    tail = envelope.tail_mass(max(cutoff, lower))
    if cutoff <= lower:
        return QuadResult(0.0, tail, 0)
    logger.debug("half-line integral truncated at %.6g (tail <= %.3g)", cutoff, tail)
    body = integrate_interval(
        f, lower, cutoff, replace(spec, abs_tol=spec.abs_tol / 2)
    )
    return QuadResult(body.value, body.error + tail, body.subdivisions)


def integrate_radial_complex(
    g: PolarFunction,
    spec: QuadSpec = DEFAULT_QUAD_SPEC,
    circular: bool = False,
    envelope: Union[ExponentialEnvelope, None] = None,
) -> QuadResult:
    """
    Integrates g(rho, theta) over the complex plane in polar coordinates,
    i.e. the integral of g(rho, theta) * rho over [0, inf) x [0, 2*pi).

    Args:
        g (Callable[[float, float], float]): Integrand in polar coordinates.
        spec (QuadSpec): Tolerances.
        circular (bool): Declares g independent of the angle; the result is
            then 2*pi times a single radial integral.
        envelope (ExponentialEnvelope, optional): Bound on |g(rho, theta) * rho|
            uniform in theta.

    Returns:
        QuadResult: Value and error estimate.
    """

    def radial(theta: float) -> QuadResult:
        return integrate_halfline(
            lambda rho: g(rho, theta) * rho, spec=spec, envelope=envelope
        )

    if circular:
        inner = radial(0.0)
        return QuadResult(
            2 * math.pi * inner.value, 2 * math.pi * inner.error, inner.subdivisions
        )

    inner_errors = []

    def angular(theta: float) -> float:
        inner = radial(theta)
        inner_errors.append(inner.error)
        return inner.value

    outer = integrate_interval(angular, 0.0, 2 * math.pi, spec)
    error = outer.error + 2 * math.pi * max(inner_errors, default=0.0)
    return QuadResult(outer.value, error, outer.subdivisions)


def integrate_square_diagonal(
    f: Callable[[float, float], float],
    a: float,
    b: float,
    spec: QuadSpec = DEFAULT_QUAD_SPEC,
    symmetric: bool = True,
) -> QuadResult:
    """
    Integrates f(v, w) over the square [a, b]^2 by iterated 1-D calls, with
    the inner integral split at the diagonal w = v where kernels of the form
    K(v - w) peak. A symmetric integrand only needs the lower triangle.
    """
    inner_errors = []

    def lower_triangle(v: float) -> float:
        if v <= a:
            return 0.0
        inner = integrate_interval(lambda w: f(v, w), a, v, spec)
        inner_errors.append(inner.error)
        return inner.value

    def full_row(v: float) -> float:
        value = lower_triangle(v)
        if v < b:
            inner = integrate_interval(lambda w: f(v, w), v, b, spec)
            inner_errors.append(inner.error)
            value += inner.value
        return value

    outer = integrate_interval(lower_triangle if symmetric else full_row, a, b, spec)
    scale = 2.0 if symmetric else 1.0
    error = scale * (outer.error + (b - a) * max(inner_errors, default=0.0))
    return QuadResult(scale * outer.value, error, outer.subdivisions)
