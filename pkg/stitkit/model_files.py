"""stitkit Model files — JSON/YAML neighbourhood models, BT+AC models and state maps."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from stitkit.btac import BTACModel, BTFrame
from stitkit.models import ModelFileError
from stitkit.nbhd import NbhdFrame, NbhdModel

logger = logging.getLogger(__name__)

UNIFORM_KEY = "uniform"

Cells = list[list[str]]


# ── File schemas ──────────────────────────────────────────────────────


class NbhdModelFile(BaseModel):
    """Neighbourhood model file: per-agent generators by state, or one "uniform" list."""

    model_config = ConfigDict(extra="forbid")

    states: list[str] = Field(min_length=1)
    agents: list[str] = Field(min_length=1)
    choice: dict[str, dict[str, Cells]]
    valuation: dict[str, list[str]] = Field(default_factory=dict)


class BTACModelFile(BaseModel):
    """BT+AC model file; histories are named "h:" plus their maximal moment."""

    model_config = ConfigDict(extra="forbid")

    moments: list[str] = Field(min_length=1)
    order: list[tuple[str, str]] = Field(default_factory=list)
    agents: list[str] = Field(min_length=1)
    choice: dict[str, dict[str, Cells]] = Field(default_factory=dict)
    valuation: dict[str, list[tuple[str, str]]] = Field(default_factory=dict)


# ── Reading ───────────────────────────────────────────────────────────


def read_document(path: Union[str, Path]) -> Any:
    """Parse a JSON file, or YAML for .yaml/.yml suffixes."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ModelFileError(f"cannot read {path}: {e}") from e
    try:
        if path.suffix.lower() in (".yaml", ".yml"):
            return yaml.safe_load(text)
        return json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ModelFileError(f"{path.name}: not valid {path.suffix.lstrip('.') or 'json'}: {e}") from e


def _validate(schema: type[BaseModel], data: Any, origin: str) -> Any:
    try:
        return schema.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise ModelFileError(f"{origin}: {where}: {first['msg']}") from e


def nbhd_model_from_dict(data: Any, origin: str = "model") -> NbhdModel:
    doc = _validate(NbhdModelFile, data, origin)
    choice = {}
    for agent, per_state in doc.choice.items():
        if set(per_state) == {UNIFORM_KEY} and UNIFORM_KEY not in doc.states:
            choice[agent] = {w: per_state[UNIFORM_KEY] for w in doc.states}
        else:
            choice[agent] = per_state
    frame = NbhdFrame.from_names(doc.states, doc.agents, choice)
    return NbhdModel.from_names(frame, doc.valuation)


def load_nbhd_model(path: Union[str, Path]) -> NbhdModel:
    """Load a neighbourhood model file.

    Raises:
        ModelFileError: on unreadable or malformed files.
        FrameValidationError, UnknownSymbolError: on well-formed files describing no valid frame.
    """
    model = nbhd_model_from_dict(read_document(path), Path(path).name)
    logger.debug(f"load_nbhd_model | path={path} | states={len(model.states)}")
    return model


def btac_model_from_dict(data: Any, origin: str = "model") -> BTACModel:
    doc = _validate(BTACModelFile, data, origin)
    frame = BTFrame(tuple(doc.moments), frozenset(tuple(pair) for pair in doc.order))
    return BTACModel.build(frame, doc.agents, doc.choice, doc.valuation)


def load_btac_model(path: Union[str, Path]) -> BTACModel:
    """Load a BT+AC model file.

    Raises:
        ModelFileError: on unreadable or malformed files.
    """
    model = btac_model_from_dict(read_document(path), Path(path).name)
    logger.debug(f"load_btac_model | path={path} | moments={len(model.frame.moments)}")
    return model


def load_state_map(path: Union[str, Path]) -> dict[str, str]:
    """A morphism map file: an object from source state names to target state names."""
    data = read_document(path)
    if not isinstance(data, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in data.items()
    ):
        raise ModelFileError(f"{Path(path).name}: map must be an object of state names")
    return dict(data)


# ── Writing ───────────────────────────────────────────────────────────


def dump_nbhd_model(model: NbhdModel) -> dict[str, Any]:
    """The model in file form; agents with the same generators everywhere use "uniform"."""
    frame = model.frame
    states = frame.states
    choice: dict[str, Any] = {}
    for agent in frame.agents:
        if frame.is_uniform(agent):
            choice[agent] = {UNIFORM_KEY: [states.names_of(g) for g in frame.generators(agent, 0)]}
        else:
            choice[agent] = {w: [states.names_of(g) for g in frame.generators(agent, w)] for w in states}
    return {
        "states": list(states.names),
        "agents": list(frame.agents),
        "choice": choice,
        "valuation": {atom: states.names_of(bits) for atom, bits in model.valuation},
    }


def dump_btac_model(model: BTACModel) -> dict[str, Any]:
    frame = model.frame
    choice: dict[str, dict[str, Cells]] = {}
    for (agent, m), cells in model.choice:
        choice.setdefault(agent, {})[m] = [sorted(cell) for cell in cells]
    return {
        "moments": list(frame.moments),
        "order": [list(pair) for pair in sorted(frame.order)],
        "agents": list(model.agents),
        "choice": choice,
        "valuation": {
            atom: [[idx.moment, idx.history] for idx in sorted(indices, key=lambda i: (i.moment, i.history))]
            for atom, indices in model.valuation
        },
    }


def report_json(obj: Any, indent: int | None = None) -> str:
    """Deterministic JSON text: sorted object keys, list order kept."""
    from config import settings

    if isinstance(obj, BaseModel):
        obj = obj.model_dump(mode="json", by_alias=True, exclude_none=True)
    indent = settings.report_indent if indent is None else indent
    return json.dumps(obj, indent=indent or None, sort_keys=True, ensure_ascii=False)
