from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple, Union

from cutoff_duality.types.error_types import PreconditionError
from cutoff_duality.utils.typing.custom_typing import (
    BoundRow,
    DualityTrialRow,
    MetadataDict,
)

SANDWICH_SLACK = 1e-9


@dataclass(frozen=True)
class BoundPoint:
    """
    Bracket of the cut-off rate at one SNR point.

    Attributes:
        snr (float): Signal-to-noise ratio, power over noise variance.
        lower_bound (float): Lower bound in nats.
        upper_bound (float): Upper bound in nats.
        asymptote (float): log log SNR plus the second-order constant, in nats.
        d (float): Specular component.
        sigma2 (float): Noise variance.
        delta (Union[float, None]): delta used by the upper bound.
        m1 (Union[float, None]): m1 used by the upper bound.
    """

    snr: float
    lower_bound: float
    upper_bound: float
    asymptote: float
    d: float = 0.0
    sigma2: float = 1.0
    delta: Union[float, None] = None
    m1: Union[float, None] = None

    def __post_init__(self):
        if self.lower_bound > self.upper_bound + SANDWICH_SLACK:
            raise PreconditionError(
                f"lower bound {self.lower_bound!r} exceeds upper bound "
                f"{self.upper_bound!r} at snr={self.snr!r}"
            )

    def as_row(self) -> BoundRow:
        return BoundRow(
            snr=self.snr,
            lower_nats=self.lower_bound,
            upper_nats=self.upper_bound,
            asymptote_nats=self.asymptote,
            d=self.d,
            sigma2=self.sigma2,
        )


@dataclass
class ExponentCurve:
    """
    Ordered table of curve rows sharing one set of columns, plus run metadata.
    Rows keep the order of the grid they were computed on.
    """

    columns: Tuple[str, ...]
    rows: List[Dict[str, Any]] = field(default_factory=list)
    metadata: MetadataDict = field(default_factory=dict)

    def append(self, row: Dict[str, Any]):
        missing = [column for column in self.columns if column not in row]
        if missing:
            raise PreconditionError(f"row is missing columns {missing}")
        self.rows.append({column: row[column] for column in self.columns})

    def column(self, name: str) -> List[Any]:
        return [row[name] for row in self.rows]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "columns": list(self.columns),
            "rows": [dict(row) for row in self.rows],
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_points(
        cls, points: Sequence[BoundPoint], metadata: Union[MetadataDict, None] = None
    ) -> "ExponentCurve":
        curve = cls(columns=tuple(BoundRow.__annotations__), metadata=metadata or {})
        for point in points:
            curve.append(dict(point.as_row()))
        curve.metadata.setdefault("delta", [point.delta for point in points])
        curve.metadata.setdefault("m1", [point.m1 for point in points])
        return curve


@dataclass
class DualityReport:
    """
    Outcome of the numerical check that maximizing the primal and the dual
    E0 forms over input laws gives the same value.
    """

    rho: float
    tolerance: float
    trials: List[DualityTrialRow] = field(default_factory=list)

    @property
    def max_gap(self) -> float:
        return max((trial["gap"] for trial in self.trials), default=0.0)

    @property
    def min_pointwise_slack(self) -> float:
        return min((trial["pointwise_min_slack"] for trial in self.trials), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_gap <= self.tolerance and self.min_pointwise_slack >= -1e-10

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rho": self.rho,
            "tolerance": self.tolerance,
            "max_gap": self.max_gap,
            "min_pointwise_slack": self.min_pointwise_slack,
            "passed": self.passed,
            "trials": [dict(trial) for trial in self.trials],
        }
