"""JSON schemas for games, experiments, strategies and reports.

Inputs are single JSON files; reports are emitted as deterministic JSON
(sorted keys, fixed indentation) or flat CSV so identical runs produce
byte-identical outputs. Validation errors name the offending field.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .errors import GameFormatError, InvariantViolation, PersuasionLabError
from .model import (
    AmbiguousExperiment,
    GameSpec,
    PriorSet,
    ReceiverStrategy,
    StatisticalExperiment,
)
from .obedience import ObedienceWitness


def _load_json(path: str | Path) -> Any:
    p = Path(path)
    if not p.exists():
        raise GameFormatError(f"file not found: {p}", field=str(p))
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise GameFormatError(f"{p}: invalid JSON ({exc})", field=str(p)) from exc


def _require(data: dict, field: str, kind: type, where: str) -> Any:
    if field not in data:
        raise GameFormatError(f"{where}: missing required field '{field}'", field=field)
    value = data[field]
    if not isinstance(value, kind):
        raise GameFormatError(
            f"{where}: field '{field}' must be a {kind.__name__}", field=field
        )
    return value


def _matrix(raw: Any, field: str, rows: int, cols: int) -> np.ndarray:
    try:
        m = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise GameFormatError(f"field '{field}' is not numeric", field=field) from exc
    if m.shape != (rows, cols):
        raise GameFormatError(
            f"field '{field}' has shape {m.shape}, expected ({rows}, {cols})", field=field
        )
    return m


def game_from_dict(data: dict, where: str = "game") -> GameSpec:
    states = _require(data, "states", list, where)
    actions = _require(data, "actions", list, where)
    n_s, n_a = len(states), len(actions)
    sender = _matrix(_require(data, "sender_payoff", list, where), "sender_payoff", n_a, n_s)
    receiver = _matrix(
        _require(data, "receiver_payoff", list, where), "receiver_payoff", n_a, n_s
    )
    raw_vertices = _require(data, "prior_vertices", list, where)
    if not raw_vertices:
        raise GameFormatError("prior_vertices must be nonempty", field="prior_vertices")
    vertices = []
    for i, row in enumerate(raw_vertices):
        field = f"prior_vertices[{i}]"
        v = _matrix([row], field, 1, n_s)[0]
        if np.any(v < -1e-12) or abs(float(v.sum()) - 1.0) > 1e-9:
            raise GameFormatError(
                f"field '{field}' is not a probability vector over the states", field=field
            )
        vertices.append(v)
    try:
        return GameSpec(tuple(states), tuple(actions), sender, receiver, PriorSet(np.array(vertices)))
    except (InvariantViolation, PersuasionLabError) as exc:
        raise GameFormatError(str(exc), field=where) from exc


def load_game(path: str | Path) -> GameSpec:
    """Parse and validate a game file; diagnostics name the failing field."""
    data = _load_json(path)
    if not isinstance(data, dict):
        raise GameFormatError("game file must contain a JSON object", field=str(path))
    return game_from_dict(data)


def game_to_dict(game: GameSpec) -> dict:
    return {
        "states": list(game.states),
        "actions": list(game.actions),
        "sender_payoff": game.sender_payoff.tolist(),
        "receiver_payoff": game.receiver_payoff.tolist(),
        "prior_vertices": game.priors.vertices.tolist(),
    }


def save_game(game: GameSpec, path: str | Path) -> None:
    Path(path).write_text(dumps_report(game_to_dict(game)))


def load_experiment(path: str | Path) -> AmbiguousExperiment:
    """Experiment file: {"messages": [...], "kernels": [[[...]]]}.

    One kernel (states x messages) per generator; a single kernel is a
    statistical experiment.
    """
    data = _load_json(path)
    if not isinstance(data, dict):
        raise GameFormatError("experiment file must contain a JSON object", field=str(path))
    messages = _require(data, "messages", list, "experiment")
    kernels = _require(data, "kernels", list, "experiment")
    if not kernels:
        raise GameFormatError("experiment needs at least one kernel", field="kernels")
    gens = []
    for i, raw in enumerate(kernels):
        field = f"kernels[{i}]"
        arr = np.asarray(raw, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != len(messages):
            raise GameFormatError(
                f"field '{field}' must be a matrix with {len(messages)} columns", field=field
            )
        try:
            gens.append(StatisticalExperiment(tuple(messages), arr))
        except (InvariantViolation, PersuasionLabError) as exc:
            raise GameFormatError(f"{field}: {exc}", field=field) from exc
    try:
        return AmbiguousExperiment(tuple(gens))
    except (InvariantViolation, PersuasionLabError) as exc:
        raise GameFormatError(str(exc), field="kernels") from exc


def experiment_to_dict(amb: AmbiguousExperiment) -> dict:
    return {
        "messages": list(amb.messages),
        "kernels": [g.kernel.tolist() for g in amb.generators],
    }


def load_strategy(path: str | Path) -> ReceiverStrategy:
    """Strategy file: {"messages": [...], "actions": [...], "kernel": [[...]]}."""
    data = _load_json(path)
    if not isinstance(data, dict):
        raise GameFormatError("strategy file must contain a JSON object", field=str(path))
    messages = _require(data, "messages", list, "strategy")
    actions = _require(data, "actions", list, "strategy")
    kernel = _matrix(
        _require(data, "kernel", list, "strategy"), "kernel", len(messages), len(actions)
    )
    try:
        return ReceiverStrategy(tuple(messages), tuple(actions), kernel)
    except (InvariantViolation, PersuasionLabError) as exc:
        raise GameFormatError(f"kernel: {exc}", field="kernel") from exc


def witness_to_dict(witness: ObedienceWitness | None) -> dict:
    if witness is None:
        return {"obedient": False}
    out: dict[str, Any] = {
        "obedient": True,
        "kind": witness.kind,
        "slack": witness.slack.tolist(),
    }
    if witness.prior is not None:
        out["prior"] = witness.prior.tolist()
    if witness.face_weights is not None:
        out["weights"] = [
            {"prior_vertex": fw.prior_vertex, "generator": fw.generator, "w": fw.weight}
            for fw in witness.face_weights
        ]
    return out


def dumps_report(obj: Any) -> str:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_csv(path: str | Path, header: list[str], rows: list[list[Any]]) -> None:
    """Flat CSV with repr-stable float formatting."""
    def cell(v: Any) -> str:
        if v is None:
            return ""
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, float):
            return repr(v)
        return str(v)

    lines = [",".join(header)]
    lines += [",".join(cell(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")
