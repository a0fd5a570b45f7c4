"""Named model declarations shared by the CLI, the verification suite and scripts."""
from __future__ import annotations

from .spaces import ActionModel, model_from_config

PRESETS: dict[str, dict] = {
    "tree2": {"kind": "free_tree", "rank": 2},
    # word metric for S₂ = {a, ab}: shared b is A·(ab) in the tree alphabet
    "tree2-s2": {"kind": "free_tree", "rank": 2, "basis": ["a", "Ab"]},
    "tree2-shift": {"kind": "free_tree", "rank": 2, "base_point": "ab"},
    "schottky": {"kind": "upper_half_plane", "generators": "schottky"},
    "schottky-conj": {"kind": "upper_half_plane", "generators": "schottky",
                      "conjugate_by": [[2, 1], [1, 1]]},
}


def preset(name: str) -> ActionModel:
    from .errors import ConfigError

    if name not in PRESETS:
        raise ConfigError(f"unknown model preset {name!r} (known: {', '.join(PRESETS)})")
    return model_from_config(name, PRESETS[name])
