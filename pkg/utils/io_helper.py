import json
import logging
import math
import os
from typing import Any, Dict, List

import pandas as pd

from models.errors import NodeSetError
from models.fourier_models import BoundReport, NodeSet, SweepResult

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = '%.12e'


def load_nodes(path: str) -> NodeSet:
    """Read a JSON array of reals, wrap onto the torus and sort"""
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise NodeSetError(f"Cannot read node file {path}: {e}")

    if not isinstance(data, list) or not data:
        raise NodeSetError(f"Node file {path} must hold a non-empty JSON array of numbers")
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in data):
        raise NodeSetError(f"Node file {path} contains non-numeric entries")
    return NodeSet.from_values(data)


def save_nodes(X: NodeSet, path: str) -> None:
    with open(path, 'w') as f:
        json.dump(list(X.points), f)


def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def to_json(payload: Dict[str, Any]) -> str:
    return json.dumps(_json_safe(payload), indent=2)


def write_json(payload: Dict[str, Any], path: str) -> None:
    _ensure_parent(path)
    with open(path, 'w') as f:
        f.write(to_json(payload))
        f.write('\n')
    logger.info(f"Wrote {path}")


def write_csv(frame: pd.DataFrame, path: str) -> None:
    _ensure_parent(path)
    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    logger.info(f"Wrote {path} ({len(frame)} rows)")


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def sweep_frame(result: SweepResult) -> pd.DataFrame:
    return pd.DataFrame(
        [{'tau': c.tau, 'applicable': c.applicable, 'value': c.value} for c in result.candidates],
        columns=['tau', 'applicable', 'value'])


def sweep_payload(result: SweepResult) -> Dict[str, Any]:
    best = result.best_report
    return {
        'method': result.method.value,
        'm': result.m,
        'best_tau': result.best_tau,
        'best_value': result.best_value,
        'best_log_value': result.best_log_value,
        'best_report': best.to_dict() if best else None,
        'candidates': len(result.candidates),
    }


def reports_frame(reports: List[BoundReport]) -> pd.DataFrame:
    return pd.DataFrame([r.csv_row() for r in reports],
                        columns=['method', 'm', 'tau', 'delta', 'value', 'log_value'])
