"""
Scenario files and report serialization.

A scenario is one JSON document::

    {
      "pursuers": [{"x": -1.5, "y": 4.2, "speed": 1.0}, ...],
      "evaders":  [{"x": 4.1, "y": 11.0, "speed": 0.81}, ...],
      "dt": 0.001, "capture_radius": 0.001, "t_max": null, "seed": 0
    }

Unknown keys are rejected. Agent numbering in every report is 1-based
(P1, E1, ...) to match the usual notation; the library itself is 0-based.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Dict, List, Optional

from .assignment import Assignment, GameOfKindReport
from .sim import DEFAULT_CAPTURE_RADIUS, DEFAULT_DT, Scenario, TrajectoryLog
from .state import GameState, SpeedTable

TOP_KEYS = {"pursuers", "evaders", "dt", "capture_radius", "t_max", "seed"}
AGENT_KEYS = {"x", "y", "speed"}


class ScenarioError(ValueError):
    pass


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ScenarioError(f"{where}: expected a finite number, got {value!r}")
    return float(value)


def _agents(doc: dict, key: str) -> List[dict]:
    if key not in doc:
        raise ScenarioError(f"missing required field '{key}'")
    items = doc[key]
    if not isinstance(items, list) or not items:
        raise ScenarioError(f"'{key}' must be a non-empty list")
    out = []
    for n, item in enumerate(items, 1):
        where = f"{key}[{n}]"
        if not isinstance(item, dict):
            raise ScenarioError(f"{where}: expected an object")
        extra = set(item) - AGENT_KEYS
        if extra:
            raise ScenarioError(f"{where}: unknown field(s) {', '.join(sorted(extra))}")
        for f in ("x", "y", "speed"):
            if f not in item:
                raise ScenarioError(f"{where}: missing field '{f}'")
        agent = {f: _number(item[f], f"{where}.{f}") for f in AGENT_KEYS}
        if agent["speed"] <= 0:
            raise ScenarioError(f"{where}.speed: must be > 0")
        if agent["y"] < 0:
            raise ScenarioError(f"{where}.y: must be >= 0 (play is above the border)")
        out.append(agent)
    return out


def parse_scenario(doc: Any) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object")
    extra = set(doc) - TOP_KEYS
    if extra:
        raise ScenarioError(f"unknown field(s) {', '.join(sorted(extra))}")
    ps = _agents(doc, "pursuers")
    es = _agents(doc, "evaders")
    if len(ps) < len(es):
        raise ScenarioError(f"need at least as many pursuers as evaders ({len(ps)} < {len(es)})")
    dt = _number(doc.get("dt", DEFAULT_DT), "dt")
    cap = _number(doc.get("capture_radius", DEFAULT_CAPTURE_RADIUS), "capture_radius")
    if dt <= 0:
        raise ScenarioError("dt: must be > 0")
    if cap <= 0:
        raise ScenarioError("capture_radius: must be > 0")
    t_max = doc.get("t_max")
    if t_max is not None:
        t_max = _number(t_max, "t_max")
    seed = doc.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ScenarioError(f"seed: expected an integer, got {seed!r}")
    state = GameState([(a["x"], a["y"]) for a in ps], [(a["x"], a["y"]) for a in es])
    speeds = SpeedTable([a["speed"] for a in ps], [a["speed"] for a in es])
    return Scenario(state, speeds, dt, cap, t_max, seed)


def load_scenario(path) -> Scenario:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_scenario(doc)


def scenario_to_dict(sc: Scenario) -> dict:
    st, sp = sc.state, sc.speeds
    return {
        "pursuers": [{"x": p.x, "y": p.y, "speed": v} for p, v in zip(st.pursuers, sp.pursuer_speeds)],
        "evaders": [{"x": e.x, "y": e.y, "speed": v} for e, v in zip(st.evaders, sp.evader_speeds)],
        "dt": sc.dt, "capture_radius": sc.capture_radius, "t_max": sc.t_max, "seed": sc.seed,
    }


def _finite(v: float) -> Optional[float]:
    return v if math.isfinite(v) else None


def assignment_to_dict(a: Assignment) -> dict:
    plans = []
    for j in sorted(a.plans):
        p = a.plans[j]
        plans.append({"evader": j + 1,
                      "mode": p.mode if p is not None else "escape",
                      "pursuers": [i + 1 for i in (p.pursuers if p is not None else a.pairs[j])],
                      "x": p.point.x if p is not None else None,
                      "y": p.point.y if p is not None else None})
    return {
        "index": a.index,
        "potential": {f"E{j + 1}": [i + 1 for i in a.potential[j]] for j in sorted(a.potential)},
        "pairs": {f"E{j + 1}": [i + 1 for i in a.pairs[j]] for j in sorted(a.pairs)},
        "value": _finite(a.value),
        "feasible": a.feasible,
        "plans": plans,
    }


def kind_to_dict(r: GameOfKindReport) -> dict:
    return {"winner": r.winner,
            "unstoppable": sorted(j + 1 for j in r.unstoppable_evaders),
            "best_assignment": r.best_assignment.index}


def write_trajectory_csv(log: TrajectoryLog, n_pursuers: int, n_evaders: int, path) -> None:
    header = ["t"]
    header += [f"P{i + 1}{c}" for i in range(n_pursuers) for c in "xy"]
    header += [f"E{j + 1}{c}" for j in range(n_evaders) for c in "xy"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for t, pos in zip(log.times, log.positions):
            w.writerow([repr(float(t))] + [repr(float(v)) for v in pos])


def events_to_list(log: TrajectoryLog) -> List[Dict[str, Any]]:
    out = []
    for ev in log.events:
        d = ev.as_dict()
        d["evader"] += 1
        d["pursuers"] = [i + 1 for i in d["pursuers"]]
        out.append(d)
    return out
