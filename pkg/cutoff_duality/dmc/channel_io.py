import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

import numpy as np

from cutoff_duality.dmc.main import CostSpec, Dmc, stochastic_row_errors
from cutoff_duality.types.error_types import ValidationError
from cutoff_duality.utils.typing.custom_typing import ChannelDocument

logger = logging.getLogger(__name__)


def _matrix_errors(value: Any) -> Tuple[Union[np.ndarray, None], List[str]]:
    if not isinstance(value, list) or not value:
        return None, ["transition must be a non-empty list of rows"]
    if not all(isinstance(row, list) for row in value):
        return None, ["every row of transition must be a list"]
    widths = {len(row) for row in value}
    if len(widths) != 1:
        return None, [f"rows have differing lengths {sorted(widths)}"]
    if not all(_is_number(entry) for row in value for entry in row):
        return None, ["transition entries must be numbers"]
    matrix = np.array(value, dtype=float)
    return matrix, stochastic_row_errors(matrix)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def parse_channel_document(
    document: Dict[str, Any],
) -> Tuple[Dmc, Union[CostSpec, None]]:
    """
    Validates a decoded channel document and builds the channel and its
    optional cost constraint.

    The document has the form
    ``{"transition": [[...], ...], "cost": [...], "budget": x}``, where
    ``cost`` and ``budget`` are optional but must appear together.

    Args:
        document (dict): Decoded JSON object.

    Returns:
        Tuple[Dmc, Union[CostSpec, None]]: Channel and cost constraint.

    Raises:
        ValidationError: Listing every violation found, per field.
    """
    errors: Dict[str, List[str]] = {"document": [], "transition": [], "cost": [], "budget": []}
    if not isinstance(document, dict):
        raise ValidationError.from_errors({"document": ["channel document must be an object"]})

    unknown = sorted(set(document) - set(ChannelDocument.__annotations__))
    if unknown:
        errors["document"].append(f"unknown fields {unknown}")

    matrix = None
    if "transition" not in document:
        errors["transition"].append("transition is required")
    else:
        matrix, errors["transition"] = _matrix_errors(document["transition"])

    has_cost, has_budget = "cost" in document, "budget" in document
    if has_cost != has_budget:
        missing = "budget" if has_cost else "cost"
        errors[missing].append(f"{missing} is required when the other cost field is given")
    if has_cost:
        cost = document["cost"]
        if not isinstance(cost, list) or not all(_is_number(entry) for entry in cost):
            errors["cost"].append("cost must be a list of numbers")
        elif any(not math.isfinite(entry) or entry < 0 for entry in cost):
            errors["cost"].append("costs must be finite and non-negative")
        elif matrix is not None and len(cost) != matrix.shape[0]:
            errors["cost"].append(
                f"cost has {len(cost)} entries but transition has {matrix.shape[0]} rows"
            )
    if has_budget:
        budget = document["budget"]
        if not _is_number(budget) or not math.isfinite(budget) or budget < 0:
            errors["budget"].append("budget must be a non-negative number")

    if any(errors.values()):
        raise ValidationError.from_errors(errors)

    channel = Dmc(matrix)
    if not has_cost:
        return channel, None
    return channel, CostSpec(np.array(document["cost"], dtype=float), float(document["budget"]))


def load_channel(path: Union[str, Path]) -> Tuple[Dmc, Union[CostSpec, None]]:
    """
    Reads and validates a channel JSON file.

    Raises:
        ValidationError: If the file is not valid JSON or violates the schema.
    """
    path = Path(path)
    try:
        document = json.loads(path.read_text())
    except json.JSONDecodeError as error:
        raise ValidationError.from_errors(
            {"document": [f"{path} is not valid JSON: {error.msg} (line {error.lineno})"]}
        )
    logger.debug("loaded channel document from %s", path)
    return parse_channel_document(document)


def channel_document(w: Dmc, cost: Union[CostSpec, None] = None) -> ChannelDocument:
    document = ChannelDocument(transition=w.transition.tolist())
    if cost is not None:
        document["cost"] = cost.cost.tolist()
        document["budget"] = cost.budget
    return document


def dump_channel(
    path: Union[str, Path], w: Dmc, cost: Union[CostSpec, None] = None
) -> Path:
    path = Path(path)
    path.write_text(json.dumps(channel_document(w, cost), indent=2) + "\n")
    return path
