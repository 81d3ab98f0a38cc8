"""JSON scenario configs: schema validation, overrides, and builders.

A scenario file is a single JSON object with a mandatory integer
schema_version and named sections. Every key is checked against the schema;
unknown keys are rejected with their full dotted path so typos surface
instead of silently using defaults. Pair-valued physics fields accept a
scalar (applied to both species), a two-element list, or an object with
"up" and "down" members.

Command-line overrides take the form section.key[.leaf]=value, with the
value parsed as JSON when possible and kept as a string otherwise.
"""

from __future__ import annotations

import copy
import json
import os

from .errors import ConfigError
from .params import OpticalConfig

SCHEMA_VERSION = 1

# leaf type tags
_NUM = "number"
_INT = "integer"
_BOOL = "boolean"
_STR = "string"
_PAIR = "pair"            # number, [up, down], or {"up":..., "down":...}
_BOOLPAIR = "boolpair"
_NUMLIST = "number list"
_OPTNUM = "number or null"
_OPTPAIR = "pair or null"

_AXIS_SCHEMA = {
    "path": _STR,
    "start": _NUM,
    "stop": _NUM,
    "points": _INT,
    "spacing": _STR,
}

_INIT_SCHEMA = {
    "kind": _STR,
    "center": _PAIR,
    "width": _PAIR,
    "k0": _PAIR,
    "density": _PAIR,
    "k_index": _INT,
    "amplitude": _NUM,
    "n_photons": _PAIR,
}

SCHEMA = {
    "schema_version": _INT,
    "optical": {
        "omega_plus": _PAIR,
        "omega_minus": _PAIR,
        "delta": _PAIR,
        "delta_same": _PAIR,
        "delta_cross": _PAIR,
        "omega0": _NUM,
        "gamma_abs": _NUM,
        "gamma_1d_frac": _NUM,
        "n_z": _NUM,
        "g2nz": _OPTNUM,
        "v_direct": _OPTPAIR,
        "v_empty": _NUM,
        "n_ph": _PAIR,
        "length": _NUM,
        "n_photons": _PAIR,
    },
    "sweep": {
        "quantity": _STR,
        "species": _INT,
        "z_policy": _STR,
        "interaction_threshold": _NUM,
        "kinetic_threshold": _NUM,
        "axis1": _AXIS_SCHEMA,
        "axis2": _AXIS_SCHEMA,
    },
    "correlate": {
        "mode": _STR,
        "x": _OPTNUM,
        "n_ph": _OPTNUM,
        "cutoff": _OPTNUM,
        "points": _INT,
        "separations": {
            "start": _NUM,
            "stop": _NUM,
            "points": _INT,
            "spacing": _STR,
        },
    },
    "evolve": {
        "nx": _INT,
        "length": _OPTNUM,
        "dt": _NUM,
        "n_steps": _INT,
        "sample_every": _INT,
        "include_quadratic": _BOOL,
        "enforce_stability": _BOOL,
        "lossy": _BOOL,
        "init": _INIT_SCHEMA,
    },
    "transport": {
        "nx": _INT,
        "length": _OPTNUM,
        "dt": _NUM,
        "n_steps": _INT,
        "sample_every": _INT,
        "center": _NUM,
        "width": _NUM,
        "window_frac": _NUM,
    },
    "ed": {
        "n_sites": _INT,
        "n_total": _INT,
        "n_up": _INT,
        "hardcore": _BOOLPAIR,
        "periodic": _BOOL,
        "source": _STR,
        "spacing": _NUM,
        "j_hop": _PAIR,
        "lam": _PAIR,
        "u_same": _PAIR,
        "u_cross": _NUM,
        "w": _NUM,
        "u_over_j": _NUMLIST,
        "seed": _INT,
        "n_random_states": _INT,
    },
}


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _check_leaf(value, tag: str, path: str) -> None:
    ok = {
        _NUM: lambda v: _is_number(v),
        _INT: lambda v: isinstance(v, int) and not isinstance(v, bool),
        _BOOL: lambda v: isinstance(v, bool),
        _STR: lambda v: isinstance(v, str),
        _OPTNUM: lambda v: v is None or _is_number(v),
        _NUMLIST: lambda v: (isinstance(v, list) and len(v) > 0
                             and all(_is_number(x) for x in v)),
        _PAIR: _valid_pair,
        _OPTPAIR: lambda v: v is None or _valid_pair(v),
        _BOOLPAIR: _valid_boolpair,
    }[tag]
    if not ok(value):
        raise ConfigError(f"config key {path!r} must be a {tag}, got {value!r}")


def _valid_pair(v) -> bool:
    if _is_number(v):
        return True
    if isinstance(v, list):
        return len(v) == 2 and all(_is_number(x) for x in v)
    if isinstance(v, dict):
        return set(v) == {"up", "down"} and all(_is_number(x) for x in v.values())
    return False


def _valid_boolpair(v) -> bool:
    if isinstance(v, bool):
        return True
    if isinstance(v, list):
        return len(v) == 2 and all(isinstance(x, bool) for x in v)
    if isinstance(v, dict):
        return set(v) == {"up", "down"} and all(isinstance(x, bool) for x in v.values())
    return False


def _validate(data, schema, prefix: str = "") -> None:
    if not isinstance(data, dict):
        raise ConfigError(f"config section {prefix or '<root>'!r} must be an object")
    for key, value in data.items():
        path = f"{prefix}.{key}" if prefix else key
        if key not in schema:
            raise ConfigError(f"unknown config key {path!r}")
        expected = schema[key]
        if isinstance(expected, dict):
            _validate(value, expected, path)
        else:
            _check_leaf(value, expected, path)


def validate_scenario(data) -> dict:
    """Validate a parsed scenario object and return it unchanged."""
    if not isinstance(data, dict):
        raise ConfigError("scenario config must be a JSON object")
    if "schema_version" not in data:
        raise ConfigError("config is missing 'schema_version'")
    _validate(data, SCHEMA)
    if data["schema_version"] != SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported schema_version {data['schema_version']}; "
            f"this build reads version {SCHEMA_VERSION}"
        )
    return data


def resolve_config_path(path: str) -> str:
    """The given path, or the same name inside THIRRSIM_CONFIG_DIR."""
    if os.path.exists(path):
        return path
    env_dir = os.environ.get("THIRRSIM_CONFIG_DIR")
    if env_dir and not os.path.isabs(path):
        candidate = os.path.join(env_dir, path)
        if os.path.exists(candidate):
            return candidate
    return path


def parse_override(text: str) -> tuple:
    """Split 'a.b.c=value' into (['a','b','c'], parsed value)."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not of the form key=value")
    key, raw = text.split("=", 1)
    parts = [p for p in key.split(".") if p]
    if not parts:
        raise ConfigError(f"override {text!r} has an empty key")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return parts, value


def apply_override(data: dict, parts, value) -> None:
    """Set a dotted path inside the nested config dict.

    Intermediate objects are created on demand. Assigning .up or .down under
    a field currently holding a scalar first promotes it to a two-species
    object so single-species tweaks work on shorthand configs.
    """
    node = data
    for i, part in enumerate(parts[:-1]):
        nxt = node.get(part)
        if nxt is None:
            nxt = {}
            node[part] = nxt
        elif not isinstance(nxt, dict):
            if set(parts[i + 1:]) <= {"up", "down"} and _is_number(nxt):
                nxt = {"up": nxt, "down": nxt}
                node[part] = nxt
            else:
                raise ConfigError(
                    f"cannot descend into {'.'.join(parts[:i + 1])!r}: "
                    "it does not hold an object"
                )
        node = nxt
    node[parts[-1]] = value


def load_scenario(path: str, overrides=()) -> dict:
    """Read, override, and validate a scenario file."""
    resolved = resolve_config_path(path)
    try:
        with open(resolved, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {resolved!r} is not valid JSON: {exc}") from exc
    for item in overrides:
        parts, value = parse_override(item)
        apply_override(data, parts, value)
    return validate_scenario(data)


def _pair_value(v):
    if isinstance(v, dict):
        return (v["up"], v["down"])
    if isinstance(v, list):
        return tuple(v)
    return v


def require_section(data: dict, name: str) -> dict:
    section = data.get(name)
    if section is None:
        raise ConfigError(f"config is missing the {name!r} section")
    return section


def build_optical(data: dict) -> OpticalConfig:
    """Construct the optical configuration from its config section."""
    section = require_section(data, "optical")
    for key in ("omega_plus", "omega_minus", "delta", "delta_same", "delta_cross"):
        if key not in section:
            raise ConfigError(f"config key 'optical.{key}' is required")
    kwargs = {}
    for key, value in section.items():
        tag = SCHEMA["optical"][key]
        if tag in (_PAIR, _OPTPAIR):
            kwargs[key] = _pair_value(value) if value is not None else None
        else:
            kwargs[key] = value
    return OpticalConfig(**kwargs)


def pair_field(section: dict, key: str, default=None):
    """Fetch a pair-typed key from a section, normalized to scalar-or-tuple."""
    if key not in section or section[key] is None:
        return default
    return _pair_value(section[key])


def canonical_bytes(data: dict) -> bytes:
    """Canonical serialization of a validated config, for digesting."""
    return (json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n").encode("utf-8")


def scenario_skeleton() -> dict:
    """A minimal valid scenario object (useful for tests and docs)."""
    return copy.deepcopy({
        "schema_version": SCHEMA_VERSION,
        "optical": {
            "omega_plus": 1.5,
            "omega_minus": 1.5,
            "delta": 10.0,
            "delta_same": 4.0,
            "delta_cross": 6.0,
            "g2nz": 2250.0,
        },
    })
