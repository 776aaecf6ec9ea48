from typing import Dict, List, Union


class CutoffDualityError(Exception):
    """
    Base class for every error raised by cutoff_duality.
    """


class DomainError(CutoffDualityError, ValueError):
    """
    Raised when an argument lies outside the domain of a function, e.g. a
    non-finite Bessel argument, an elliptic modulus k >= 1 or a power too
    small for the log-uniform input law.
    """


class ParameterError(CutoffDualityError, ValueError):
    """
    Raised when a parameter record is inconsistent, e.g. the output-density
    parameters violate the positivity of the Bessel lower-bound factor.
    """


class PreconditionError(CutoffDualityError, ValueError):
    """
    Raised when the inputs of an operation are individually valid but do not
    fit together (dimension mismatch, cost budget exceeded by the input law).
    """


class SizeError(CutoffDualityError, ValueError):
    """
    Raised when a brute-force oracle is asked to handle an alphabet that is
    too large for it.
    """


class ValidationError(CutoffDualityError, ValueError):
    """
    Collects every structural violation found in an input document.

    Attributes:
        errors (Dict[str, List[str]]): Field name mapped to its error messages.
    """

    def __init__(self, errors: Dict[str, List[str]]):
        self.errors = errors
        super().__init__(self.format_errors(errors))

    @classmethod
    def from_errors(cls, errors: Dict[str, List[str]]) -> "ValidationError":
        """
        Builds the exception from a field-to-messages mapping, dropping fields
        without messages.

        Args:
            errors (dict): A dictionary containing field-error message pairs.

        Returns:
            ValidationError: The exception carrying the non-empty entries.
        """
        return cls({key: value for key, value in errors.items() if value})

    @staticmethod
    def format_errors(errors: Dict[str, List[str]]) -> str:
        return "; ".join(
            f"{field}: {message}"
            for field, messages in errors.items()
            for message in messages
        )

    @property
    def messages(self) -> List[str]:
        return [message for messages in self.errors.values() for message in messages]


class QuadratureAccuracyError(CutoffDualityError, ArithmeticError):
    """
    Raised when adaptive quadrature stops before reaching the requested
    tolerance. The best available estimate is kept on the exception.

    Attributes:
        estimate (float): Best integral estimate.
        error (float): Error estimate reported by the integrator.
        subdivisions (int): Number of subintervals used.
    """

    def __init__(
        self, message: str, estimate: float, error: float, subdivisions: int = 0
    ):
        self.estimate = estimate
        self.error = error
        self.subdivisions = subdivisions
        super().__init__(
            f"{message} (estimate={estimate!r}, error={error!r}, "
            f"subdivisions={subdivisions})"
        )


class ConvergenceError(CutoffDualityError, ArithmeticError):
    """
    Raised by iterative solvers run with ``strict=True`` when the iteration
    cap is reached before the duality gap closes.

    Attributes:
        value (float): Best value reached.
        gap (Union[float, None]): Certified gap at that value, if known.
    """

    def __init__(self, message: str, value: float, gap: Union[float, None] = None):
        self.value = value
        self.gap = gap
        super().__init__(f"{message} (value={value!r}, gap={gap!r})")
