"""YAML scenario documents: schema validation, parsing, serialization.

Keys carry units as suffixes (x_m, dt_s, heading_rad).  Unknown keys are
rejected with the offending location; numbers written in scientific notation
are accepted even where YAML 1.1 would read them as strings.  Agent ids in
edge lists are 1-based, matching how the bundled scenarios are described.
"""
from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .coop import CommGraph, FormationPattern
from .errors import ConfigError
from .field import GainSet
from .frames import AircraftTarget, ProfileTerm, TimeProfile, UnicycleTarget
from .paths import ParametricPath, builtin_ellipse, builtin_lissajous, trig_path
from .sim import Scenario

_BUILTIN_PATHS = {"ellipse": builtin_ellipse, "lissajous": builtin_lissajous}


def _require_mapping(node, where: str) -> dict:
    if not isinstance(node, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(node).__name__}")
    return node


def _check_keys(node: dict, allowed: set[str], required: set[str], where: str) -> None:
    unknown = set(node) - allowed
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {sorted(unknown)}; allowed: {sorted(allowed)}")
    missing = required - set(node)
    if missing:
        raise ConfigError(f"{where}: missing required key(s) {sorted(missing)}")


def _as_float(value, where: str) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            pass
    raise ConfigError(f"{where}: expected a number, got {value!r}")


def _as_int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    return value


def _as_float_list(value, where: str, length: int | None = None) -> list[float]:
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{where}: expected a list of numbers")
    out = [_as_float(v, f"{where}[{i}]") for i, v in enumerate(value)]
    if length is not None and len(out) != length:
        raise ConfigError(f"{where}: expected {length} entries, got {len(out)}")
    return out


def _parse_profile(node, where: str) -> TimeProfile:
    if isinstance(node, (int, float)) and not isinstance(node, bool):
        return TimeProfile.constant(float(node))
    if not isinstance(node, list):
        raise ConfigError(f"{where}: expected a number or a list of profile terms")
    terms = []
    for i, term in enumerate(node):
        tw = f"{where}[{i}]"
        term = _require_mapping(term, tw)
        _check_keys(term, {"kind", "amplitude", "frequency_radps", "phase_rad"}, {"kind", "amplitude"}, tw)
        kind = term["kind"]
        if kind not in ("const", "sin", "cos"):
            raise ConfigError(f"{tw}: kind must be const, sin, or cos, got {kind!r}")
        if kind != "const" and "frequency_radps" not in term:
            raise ConfigError(f"{tw}: {kind} terms need frequency_radps")
        terms.append(
            ProfileTerm(
                kind,
                _as_float(term["amplitude"], f"{tw}.amplitude"),
                _as_float(term.get("frequency_radps", 0.0), f"{tw}.frequency_radps"),
                _as_float(term.get("phase_rad", 0.0), f"{tw}.phase_rad"),
            )
        )
    if not terms:
        raise ConfigError(f"{where}: profile needs at least one term")
    return TimeProfile(tuple(terms))


def _parse_path(node, where: str) -> ParametricPath:
    node = _require_mapping(node, where)
    _check_keys(node, {"builtin", "trig"}, set(), where)
    if ("builtin" in node) == ("trig" in node):
        raise ConfigError(f"{where}: give exactly one of 'builtin' or 'trig'")
    if "builtin" in node:
        name = node["builtin"]
        if name not in _BUILTIN_PATHS:
            raise ConfigError(f"{where}.builtin: unknown path {name!r}; have {sorted(_BUILTIN_PATHS)}")
        return _BUILTIN_PATHS[name]()
    axes = node["trig"]
    if not isinstance(axes, list) or not axes:
        raise ConfigError(f"{where}.trig: expected a non-empty list of per-axis term lists")
    parsed_axes = []
    for ax, terms in enumerate(axes):
        aw = f"{where}.trig[{ax}]"
        if not isinstance(terms, list) or not terms:
            raise ConfigError(f"{aw}: expected a non-empty list of terms")
        parsed = []
        for i, term in enumerate(terms):
            tw = f"{aw}[{i}]"
            term = _require_mapping(term, tw)
            _check_keys(term, {"a", "b", "k"}, set(), tw)
            parsed.append(
                {
                    "a": _as_float(term.get("a", 0.0), f"{tw}.a"),
                    "b": _as_float(term.get("b", 0.0), f"{tw}.b"),
                    "k": _as_float(term.get("k", 1.0), f"{tw}.k"),
                }
            )
        parsed_axes.append(parsed)
    try:
        return trig_path(parsed_axes)
    except ValueError as exc:
        raise ConfigError(f"{where}.trig: {exc}") from exc


def _parse_transform(node, where: str, dim: int):
    node = _require_mapping(node, where)
    _check_keys(node, {"kind", "target"}, {"kind"}, where)
    kind = node.get("kind")
    if kind not in ("static", "se2_unicycle", "se3_euler"):
        raise ConfigError(
            f"{where}.kind: unknown transform {kind!r}, expected one of static, se2_unicycle, se3_euler"
        )
    if kind == "static":
        if "target" in node:
            raise ConfigError(f"{where}: static transform takes no target")
        return kind, None
    tw = f"{where}.target"
    target_node = _require_mapping(node.get("target"), tw)
    if kind == "se2_unicycle":
        _check_keys(
            target_node,
            {"x_m", "y_m", "heading_rad", "speed_mps", "turn_rate_radps"},
            {"x_m", "y_m", "heading_rad", "speed_mps", "turn_rate_radps"},
            tw,
        )
        target = UnicycleTarget(
            position=np.array(
                [_as_float(target_node["x_m"], f"{tw}.x_m"), _as_float(target_node["y_m"], f"{tw}.y_m")]
            ),
            heading=_as_float(target_node["heading_rad"], f"{tw}.heading_rad"),
            speed=_parse_profile(target_node["speed_mps"], f"{tw}.speed_mps"),
            turn_rate=_parse_profile(target_node["turn_rate_radps"], f"{tw}.turn_rate_radps"),
        )
        return kind, target
    if kind == "se3_euler":
        keys = {
            "x_m", "y_m", "z_m", "roll_rad", "pitch_rad", "yaw_rad",
            "body_velocity_mps", "body_rates_radps",
        }
        _check_keys(target_node, keys, keys, tw)
        for axis_key in ("body_velocity_mps", "body_rates_radps"):
            if not isinstance(target_node[axis_key], list) or len(target_node[axis_key]) != 3:
                raise ConfigError(f"{tw}.{axis_key}: expected three per-axis profiles")
        target = AircraftTarget(
            position=np.array(
                [
                    _as_float(target_node["x_m"], f"{tw}.x_m"),
                    _as_float(target_node["y_m"], f"{tw}.y_m"),
                    _as_float(target_node["z_m"], f"{tw}.z_m"),
                ]
            ),
            euler=np.array(
                [
                    _as_float(target_node["roll_rad"], f"{tw}.roll_rad"),
                    _as_float(target_node["pitch_rad"], f"{tw}.pitch_rad"),
                    _as_float(target_node["yaw_rad"], f"{tw}.yaw_rad"),
                ]
            ),
            body_velocity=tuple(
                _parse_profile(p, f"{tw}.body_velocity_mps[{i}]")
                for i, p in enumerate(target_node["body_velocity_mps"])
            ),
            body_rates=tuple(
                _parse_profile(p, f"{tw}.body_rates_radps[{i}]")
                for i, p in enumerate(target_node["body_rates_radps"])
            ),
        )
        return kind, target


def _parse_gains(node, where: str, dim: int) -> GainSet:
    node = _require_mapping(node, where)
    _check_keys(node, {"k", "g", "convergence", "traversal", "k_c", "orientation"}, {"k"}, where)
    if "g" in node and "convergence" in node:
        raise ConfigError(f"{where}: give either 'g' or the full 'convergence' list, not both")
    weights = _as_float_list(node["k"], f"{where}.k", dim)
    if "convergence" in node:
        convergence = _as_float_list(node["convergence"], f"{where}.convergence", dim + 1)
    else:
        convergence = [1.0] * (dim + 1)
        convergence[-1] = _as_float(node.get("g", 1.0), f"{where}.g")
    traversal = (
        _as_float_list(node["traversal"], f"{where}.traversal", dim + 1)
        if "traversal" in node
        else [1.0] * (dim + 1)
    )
    orientation = _as_int(node.get("orientation", 1), f"{where}.orientation")
    try:
        return GainSet(
            np.array(weights),
            np.array(convergence),
            np.array(traversal),
            consensus_gain=_as_float(node.get("k_c", 0.0), f"{where}.k_c"),
            orientation=orientation,
        )
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def parse_config(text: str) -> Scenario:
    """Parse a YAML scenario document into a validated Scenario."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"not valid YAML: {exc}") from exc
    doc = _require_mapping(doc, "document")
    _check_keys(
        doc,
        {"name", "path", "transform", "agents", "gains", "graph", "integrator", "output"},
        {"path", "transform", "agents", "gains", "integrator"},
        "document",
    )
    name = doc.get("name", "scenario")
    if not isinstance(name, str) or not name:
        raise ConfigError("name: expected a non-empty string")

    path = _parse_path(doc["path"], "path")
    dim = path.dim
    kind, target = _parse_transform(doc["transform"], "transform", dim)

    agents_node = doc["agents"]
    if not isinstance(agents_node, list) or not agents_node:
        raise ConfigError("agents: expected a non-empty list")
    positions = []
    thetas = []
    for i, agent in enumerate(agents_node):
        aw = f"agents[{i}]"
        agent = _require_mapping(agent, aw)
        _check_keys(agent, {"x_m", "theta"}, {"x_m"}, aw)
        positions.append(_as_float_list(agent["x_m"], f"{aw}.x_m", dim))
        thetas.append(_as_float(agent.get("theta", 0.0), f"{aw}.theta"))

    gains = _parse_gains(doc["gains"], "gains", dim)

    graph = pattern = None
    if "graph" in doc:
        gw = "graph"
        gnode = _require_mapping(doc[gw], gw)
        _check_keys(gnode, {"edges", "theta_star"}, {"edges", "theta_star"}, gw)
        edges_node = gnode["edges"]
        if not isinstance(edges_node, list):
            raise ConfigError(f"{gw}.edges: expected a list of [i, j] pairs")
        edges = []
        for e, pair in enumerate(edges_node):
            ew = f"{gw}.edges[{e}]"
            if not isinstance(pair, list) or len(pair) != 2:
                raise ConfigError(f"{ew}: expected a pair [i, j]")
            i, j = _as_int(pair[0], f"{ew}[0]"), _as_int(pair[1], f"{ew}[1]")
            if i < 1 or j < 1 or i > len(agents_node) or j > len(agents_node):
                raise ConfigError(f"{ew}: agent ids are 1-based and must be in 1..{len(agents_node)}")
            edges.append((i - 1, j - 1))
        theta_star = _as_float_list(gnode["theta_star"], f"{gw}.theta_star", len(agents_node))
        try:
            graph = CommGraph(len(agents_node), edges)
        except ValueError as exc:
            raise ConfigError(f"{gw}: {exc}") from exc
        pattern = FormationPattern(np.array(theta_star))

    iw = "integrator"
    inode = _require_mapping(doc[iw], iw)
    _check_keys(inode, {"dt_s", "t_end_s", "record_stride", "t_start_s"}, {"t_end_s"}, iw)
    dt = _as_float(inode.get("dt_s", 1e-3), f"{iw}.dt_s")
    t_end = _as_float(inode["t_end_s"], f"{iw}.t_end_s")
    t_start = _as_float(inode.get("t_start_s", 0.0), f"{iw}.t_start_s")
    stride = _as_int(inode.get("record_stride", 10), f"{iw}.record_stride")

    basename = None
    if "output" in doc:
        onode = _require_mapping(doc["output"], "output")
        _check_keys(onode, {"basename"}, set(), "output")
        basename = onode.get("basename", None)
        if basename is not None and (not isinstance(basename, str) or not basename):
            raise ConfigError("output.basename: expected a non-empty string")

    try:
        scenario = Scenario(
            name=name,
            path=path,
            transform_kind=kind,
            target=target,
            initial_positions=np.array(positions),
            initial_thetas=np.array(thetas),
            gains=gains,
            graph=graph,
            pattern=pattern,
            dt=dt,
            t_end=t_end,
            record_stride=stride,
            t_start=t_start,
            output_basename=basename,
        )
    except ValueError as exc:
        # gain-gate and shape problems surface at parse time with context
        raise ConfigError(str(exc)) from exc
    return scenario


def parse_config_file(path) -> Scenario:
    return parse_config(Path(path).read_text())


def _profile_to_node(profile: TimeProfile) -> list[dict]:
    out = []
    for term in profile.terms:
        node = {"kind": term.kind, "amplitude": term.amplitude}
        if term.kind != "const":
            node["frequency_radps"] = term.frequency
            if term.phase:
                node["phase_rad"] = term.phase
        out.append(node)
    return out


def scenario_to_dict(scenario: Scenario) -> dict:
    """Plain-dict form of a scenario; `parse_config` of its YAML dump is equal."""
    if scenario.path.label in _BUILTIN_PATHS:
        path_node = {"builtin": scenario.path.label}
    else:
        terms = scenario.path.trig_terms
        if terms is None:
            raise ValueError("only trig-term paths can be serialized")
        path_node = {
            "trig": [
                [{"a": float(a), "b": float(b), "k": float(k)} for a, b, k in axis if (a, b) != (0.0, 0.0)]
                or [{"a": 0.0, "b": 0.0, "k": 1.0}]
                for axis in terms
            ]
        }

    if scenario.transform_kind == "static":
        transform_node = {"kind": "static"}
    elif scenario.transform_kind == "se2_unicycle":
        tgt = scenario.target
        transform_node = {
            "kind": "se2_unicycle",
            "target": {
                "x_m": float(tgt.position[0]),
                "y_m": float(tgt.position[1]),
                "heading_rad": float(tgt.heading),
                "speed_mps": _profile_to_node(tgt.speed),
                "turn_rate_radps": _profile_to_node(tgt.turn_rate),
            },
        }
    else:
        tgt = scenario.target
        transform_node = {
            "kind": "se3_euler",
            "target": {
                "x_m": float(tgt.position[0]),
                "y_m": float(tgt.position[1]),
                "z_m": float(tgt.position[2]),
                "roll_rad": float(tgt.euler[0]),
                "pitch_rad": float(tgt.euler[1]),
                "yaw_rad": float(tgt.euler[2]),
                "body_velocity_mps": [_profile_to_node(p) for p in tgt.body_velocity],
                "body_rates_radps": [_profile_to_node(p) for p in tgt.body_rates],
            },
        }

    gains = scenario.gains
    gains_node = {
        "k": [float(v) for v in gains.error_weights],
        "convergence": [float(v) for v in gains.convergence],
        "traversal": [float(v) for v in gains.traversal],
        "k_c": gains.consensus_gain,
        "orientation": gains.orientation,
    }

    doc = {
        "name": scenario.name,
        "path": path_node,
        "transform": transform_node,
        "agents": [
            {"x_m": [float(v) for v in scenario.initial_positions[i]], "theta": float(scenario.initial_thetas[i])}
            for i in range(scenario.num_agents)
        ],
        "gains": gains_node,
        "integrator": {
            "dt_s": scenario.dt,
            "t_end_s": scenario.t_end,
            "record_stride": scenario.record_stride,
            "t_start_s": scenario.t_start,
        },
    }
    if scenario.graph is not None:
        doc["graph"] = {
            "edges": [[i + 1, j + 1] for i, j in scenario.graph.edges],
            "theta_star": [float(v) for v in scenario.pattern.theta_star],
        }
    if scenario.output_basename != scenario.name:
        doc["output"] = {"basename": scenario.output_basename}
    return doc


def serialize_config(scenario: Scenario) -> str:
    """YAML text of a scenario, parseable back into an equal Scenario."""
    return yaml.safe_dump(scenario_to_dict(scenario), sort_keys=False)


def bundled_config_path(name: str) -> Path:
    """Filesystem path of a bundled scenario document ('sim1' or 'sim2')."""
    candidate = resources.files("gvfsim").joinpath("configs", f"{name}.yaml")
    if not candidate.is_file():
        raise ConfigError(f"no bundled scenario named {name!r}")
    return Path(str(candidate))


def load_bundled(name: str) -> Scenario:
    return parse_config_file(bundled_config_path(name))
