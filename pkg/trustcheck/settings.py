import importlib.resources
import os
from dataclasses import dataclass, replace

import yaml

SINK_COMPLETION_MODES = ("self_loop", "sink_state")

# Expected keys of defaults.yaml and the python type each value must have
SETTINGS_SCHEMA: dict[str, type | dict] = {
    "belief_nesting_depth": int,
    "strict_deterministic": bool,
    "cross_type_weighting": bool,
    "sink_completion": str,
    "belief_asmas_depth": int,
    "simulate": {"steps": int, "seed": int},
    "report": {"include_timings": bool},
}


@dataclass(frozen=True)
class Settings:
    belief_nesting_depth: int = 2
    strict_deterministic: bool = False
    cross_type_weighting: bool = False
    sink_completion: str = "self_loop"
    belief_asmas_depth: int = 4
    simulate_steps: int = 6
    simulate_seed: int = 0
    include_timings: bool = False

    def override(self, **changes) -> "Settings":
        """Copy with the non-None entries of changes applied."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def validate_settings(settings_dict: dict, schema: dict | None = None, prefix=""):
    """Check a raw settings mapping against SETTINGS_SCHEMA."""
    schema = SETTINGS_SCHEMA if schema is None else schema
    for key, value in settings_dict.items():
        if key not in schema:
            raise UserWarning(f"Unknown setting '{prefix}{key}'")
        expected = schema[key]
        if isinstance(expected, dict):
            if not isinstance(value, dict):
                raise UserWarning(f"Setting '{prefix}{key}' must be a mapping")
            validate_settings(value, expected, prefix=f"{prefix}{key}.")
        # bool is an int subclass, keep them apart
        elif type(value) is not expected:
            raise UserWarning(
                f"Setting '{prefix}{key}' must be of type {expected.__name__}, got {value!r}"
            )
    if settings_dict.get("sink_completion", "self_loop") not in SINK_COMPLETION_MODES:
        raise UserWarning(
            f"Setting 'sink_completion' must be one of {SINK_COMPLETION_MODES}"
        )
    if settings_dict.get("belief_nesting_depth", 0) < 0:
        raise UserWarning("Setting 'belief_nesting_depth' must be non-negative")
    return True


def load_settings(path: str | None = None, raw: bool = False) -> Settings | dict:
    """Load run defaults, from the shipped defaults.yaml unless a path is given.

    Return them as a Settings object or optionally as the raw yaml dict.
    """
    if path is None:
        settings_path = importlib.resources.files("trustcheck.config").joinpath(
            "defaults.yaml"
        )
        assert isinstance(settings_path, os.PathLike)
    else:
        settings_path = path

    with open(settings_path) as f:
        settings_dict = yaml.safe_load(f) or {}

    assert validate_settings(settings_dict) is True

    if raw:
        return settings_dict

    simulate = settings_dict.get("simulate", {})
    report = settings_dict.get("report", {})
    return Settings(
        belief_nesting_depth=settings_dict.get("belief_nesting_depth", 2),
        strict_deterministic=settings_dict.get("strict_deterministic", False),
        cross_type_weighting=settings_dict.get("cross_type_weighting", False),
        sink_completion=settings_dict.get("sink_completion", "self_loop"),
        belief_asmas_depth=settings_dict.get("belief_asmas_depth", 4),
        simulate_steps=simulate.get("steps", 6),
        simulate_seed=simulate.get("seed", 0),
        include_timings=report.get("include_timings", False),
    )
