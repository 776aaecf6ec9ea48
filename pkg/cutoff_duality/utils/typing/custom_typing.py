from enum import Enum
from typing import Callable, Dict, List, Literal, TypedDict, Union

RealFunction = Callable[[float], float]

PolarFunction = Callable[[float, float], float]


ConstraintKind = Literal["peak", "average"]


class ConstraintKindEnum(Enum):
    PEAK = "peak"
    AVERAGE = "average"


TailCutoffPolicy = Literal["envelope", "transform"]


class TailCutoffPolicyEnum(Enum):
    ENVELOPE = "envelope"
    TRANSFORM = "transform"


LowerBoundMethod = Literal["closed_form", "numerical", "best"]


class LowerBoundMethodEnum(Enum):
    CLOSED_FORM = "closed_form"
    NUMERICAL = "numerical"
    BEST = "best"


AmplitudeLawKind = Literal["log_uniform", "discrete"]

CommandName = Literal["dmc", "verify-duality", "ricean", "sideinfo"]

OutputFormat = Literal["csv", "json"]

FigureNumber = Literal[1, 2]


class ExitCodeEnum(Enum):
    SUCCESS = 0
    CHECK_FAILED = 1
    USAGE = 2


class ChannelDocument(TypedDict, total=False):
    transition: List[List[float]]
    cost: List[float]
    budget: float


class BoundRow(TypedDict):
    snr: float
    lower_nats: float
    upper_nats: float
    asymptote_nats: float
    d: float
    sigma2: float


class SideInfoRow(TypedDict):
    eps2: float
    snr: float
    lower_nats: float
    upper_nats: float
    asymptote_nats: float
    capacity_constant_nats: float


class FigureOneRow(TypedDict):
    d: float
    capacity_constant_nats: float
    cutoff_constant_nats: float
    gap_nats: float


class FigureTwoRow(TypedDict):
    eps2: float
    capacity_constant_nats: float
    cutoff_constant_nats: float
    gap_nats: float


class DualityTrialRow(TypedDict):
    trial: int
    primal_nats: float
    dual_nats: float
    gap: float
    pointwise_min_slack: float


class E0Row(TypedDict):
    rho: float
    e0_nats: float
    tilt_r: float
    converged: bool


class ExponentRow(TypedDict):
    rate_nats: float
    random_coding_nats: float
    sphere_packing_nats: Union[float, str]


class DmcRow(TypedDict):
    quantity: Literal["e0", "cutoff_rate", "random_coding", "sphere_packing"]
    parameter: float
    value_nats: float


MetadataDict = Dict[str, Union[str, float, int, bool, None, List[float]]]
