"""
Problem files: the JSON inputs of every command

A problem file is one JSON object with any of the sections

    {"model": {"weights": [...], "structure": {...}},
     "input": {"values": [...]}, "functional": {"values": [...]},
     "subspace": {"basis": [[...], ...]}, "action": {"action": [...]},
     "params": {"eps": 0.5, ...}, "seed": 7}

The --model/--input/--functional/--subspace/--action flags each point to a
file holding one section (bare, or wrapped under its section name).
"""
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from config.harness_config import DEFAULT_SEED
from spaces.measure_space import DualFunctional, MeasureSpace, RealFunction
from spaces.norms import SpaceModel, model_from_json
from services.extension import Subspace, SubFunctional
from utils.errors import DomainError, DualSpaceError, ProblemFileError
from utils.logger import setup_logger

logger = setup_logger("problem")

SECTIONS = ("model", "input", "functional", "subspace", "action", "params", "seed")
PARAM_KEYS = ("module", "eps", "samples", "trials", "n", "p", "r", "v", "family", "probe", "steps", "sizes")


@dataclass
class ProblemFile:
    source: str = "<flags>"
    model: SpaceModel | None = None
    function: RealFunction | None = None
    functional: DualFunctional | None = None
    subspace: Subspace | None = None
    action: SubFunctional | None = None
    params: dict = field(default_factory=dict)
    seed: int = DEFAULT_SEED

    def to_json(self) -> dict:
        data = {"source": self.source}
        if self.model is not None:
            data["model"] = self.model.to_json()
        for name, item in (("input", self.function), ("functional", self.functional),
                           ("subspace", self.subspace), ("action", self.action)):
            if item is not None:
                data[name] = item.to_json()
        data["params"] = dict(sorted(self.params.items()))
        data["seed"] = self.seed
        return data


@dataclass
class _Section:
    data: object
    path: str
    text: str


def _line_of(text: str, key: str) -> int:
    match = re.search(rf'"{re.escape(key)}"\s*:', text)
    return text.count("\n", 0, match.start()) + 1 if match else 1


def _fail(section: _Section, pointer: str, message: str, cause: Exception | None = None):
    key = pointer.rstrip("/").split("/")[-1] or pointer
    line = _line_of(section.text, key)
    error = ProblemFileError(f"{section.path}:{line}: {pointer}: {message}")
    if cause is not None:
        raise error from cause
    raise error


def _read(path: str) -> tuple[object, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ProblemFileError(f"{path}: cannot read problem file: {e.strerror or e}") from e
    try:
        return json.loads(text), text
    except json.JSONDecodeError as e:
        raise ProblemFileError(f"{path}:{e.lineno}:{e.colno}: invalid JSON: {e.msg}") from e


def _unwrap(data: object, name: str):
    if isinstance(data, dict) and name in data and len(data) == 1:
        return data[name]
    return data


def _values(section: _Section, pointer: str, key: str) -> list:
    data = section.data
    if isinstance(data, list):
        return data
    if not isinstance(data, dict) or key not in data:
        _fail(section, pointer, f'expected a list or an object with "{key}"')
    return data[key]


def _build(section: _Section, pointer: str, build):
    try:
        return build()
    except DualSpaceError as e:
        kind = "domain error" if isinstance(e, DomainError) else "schema error"
        _fail(section, pointer, f"{kind}: {e}", e)
    except (TypeError, ValueError) as e:
        _fail(section, pointer, f"schema error: {e}", e)


def _resolve(sections: dict[str, _Section], params: dict, seed: int, source: str) -> ProblemFile:
    problem = ProblemFile(source=source, params=params, seed=seed)
    if "model" in sections:
        section = sections["model"]
        if not isinstance(section.data, dict):
            _fail(section, "/model", "model must be an object")
        problem.model = _build(section, "/model", lambda: model_from_json(section.data))

    space = problem.model.space if problem.model is not None else None
    if "input" in sections:
        section = sections["input"]
        values = _values(section, "/input", "values")
        if space is None:
            # mazur accepts a bare input over the counting measure
            space = _build(section, "/input/values", lambda: MeasureSpace(np.ones(len(values))))
        problem.function = _build(section, "/input/values", lambda: RealFunction(values, space))
    if "functional" in sections:
        section = sections["functional"]
        if space is None:
            _fail(section, "/functional", "a functional needs a model")
        values = _values(section, "/functional", "values")
        problem.functional = _build(section, "/functional/values", lambda: DualFunctional(values, space))
    if "subspace" in sections:
        section = sections["subspace"]
        if problem.model is None:
            _fail(section, "/subspace", "a subspace needs a model")
        basis = _values(section, "/subspace", "basis")
        problem.subspace = _build(section, "/subspace/basis", lambda: Subspace(np.asarray(basis, dtype=float),
                                                                               problem.model))
    if "action" in sections:
        section = sections["action"]
        action = _values(section, "/action", "action")
        problem.action = _build(section, "/action/action", lambda: SubFunctional(action))
        if problem.subspace is not None and problem.action.action.size != problem.subspace.size:
            _fail(section, "/action/action",
                  f"{problem.action.action.size} values for a basis of size {problem.subspace.size}")
    return problem


def _sections_of(data: object, path: str, text: str) -> tuple[dict[str, _Section], dict, int | None]:
    whole = _Section(data, path, text)
    if not isinstance(data, dict):
        _fail(whole, "/", "a problem file must hold a JSON object")
    unknown = sorted(set(data) - set(SECTIONS))
    if unknown:
        _fail(whole, f"/{unknown[0]}", f"unknown section {unknown[0]!r}")
    params = data.get("params", {})
    if not isinstance(params, dict):
        _fail(whole, "/params", "params must be an object")
    seed = data.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool) or seed < 0):
        _fail(whole, "/seed", "seed must be a nonnegative integer")
    sections = {name: _Section(data[name], path, text) for name in SECTIONS[:5] if name in data}
    return sections, dict(params), seed


def load_problem(path: str) -> ProblemFile:
    """
    Load and validate a problem file

    Args:
        path: JSON problem file

    Returns:
        ProblemFile with every section resolved against the model

    Raises:
        ProblemFileError: parse, schema or dimension error, located by line
    """
    data, text = _read(path)
    sections, params, seed = _sections_of(data, path, text)
    problem = _resolve(sections, params, DEFAULT_SEED if seed is None else seed, path)
    logger.debug(f"loaded problem {path} with sections {sorted(sections)}")
    return problem


def problem_from_args(args) -> ProblemFile:
    """
    Combine an optional --problem file with per-section files and flag values

    Flags win over file values; the seed falls back to DUALSPACE_SEED.
    """
    sections, params, seed, source = {}, {}, None, "<flags>"
    if getattr(args, "problem", None):
        data, text = _read(args.problem)
        sections, params, seed = _sections_of(data, args.problem, text)
        source = args.problem
    for name in ("model", "input", "functional", "subspace", "action"):
        path = getattr(args, name, None)
        if path:
            data, text = _read(path)
            sections[name] = _Section(_unwrap(data, name), path, text)
    for key in PARAM_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    if getattr(args, "seed", None) is not None:
        seed = args.seed
    return _resolve(sections, params, DEFAULT_SEED if seed is None else seed, source)
