"""Size caps guarding the exhaustive-search oracles.

The caps keep brute-force verification at desk scale. They can be overridden
through the ``COREFAIR_SIZE_CAPS`` environment variable, a JSON object mapping
cap names to integers. The override exists for tests only; raising the caps
makes the exhaustive operations exponentially slower.
"""

import json
import os

DEFAULT_CAPS = {
    # verifier: coalition enumeration and integral deviation enumeration
    "coalition_agents": 12,
    "deviation_elements": 16,
    # instance: brute-force per-agent optima
    "matching_value_edges": 20,
    "packing_value_elements": 20,
    # private-goods exhaustive search
    "private_agents": 4,
    "private_goods": 6,
}

_ENV_VAR = "COREFAIR_SIZE_CAPS"


def cap(name):
    """Return the active value for the named cap."""
    if name not in DEFAULT_CAPS:
        raise KeyError(f"unknown size cap {name!r}")
    raw = os.environ.get(_ENV_VAR)
    if raw:
        overrides = json.loads(raw)
        if name in overrides:
            return int(overrides[name])
    return DEFAULT_CAPS[name]
