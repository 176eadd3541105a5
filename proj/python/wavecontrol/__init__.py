"""Boundary control of coupled wave systems by the moment method."""

import json as _json

from ._core import (
    WaveControlError,
    analyze,
    decompose,
    divided_difference_weights,
    frequencies,
    gram_entry,
    normalize_config,
    resonance_check,
)
from ._core import run as _run


def run(command, config, method=None, force=False):
    """Run analyze/synthesize/verify/sweep on a config (dict or JSON text)."""
    text = config if isinstance(config, str) else _json.dumps(config)
    out = _run(command, text, method, force)
    out["report"] = _json.loads(out["report"])
    return out


__all__ = [
    "WaveControlError",
    "analyze",
    "decompose",
    "divided_difference_weights",
    "frequencies",
    "gram_entry",
    "normalize_config",
    "resonance_check",
    "run",
]
