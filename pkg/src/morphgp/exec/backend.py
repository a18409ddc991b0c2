"""Engine selection: the compiled core when importable, else the pure twin.

MORPHGP_ENGINE=pure|native forces a choice (native raises if unavailable).
Both engines expose the same surface: eval_expr, apply_fun, run_case,
run_fitness, make_closure, score_value, Closure, Partial, NAME.
"""
from __future__ import annotations

import os

from . import pure

_choice = os.environ.get("MORPHGP_ENGINE", "").lower()

if _choice == "pure":
    engine = pure
elif _choice == "native":
    from . import _native as engine  # type: ignore[no-redef]
else:
    try:
        from . import _native as engine  # type: ignore[no-redef]
    except ImportError:
        engine = pure

NAME = engine.NAME


def available_engines() -> dict[str, object]:
    out = {"pure": pure}
    try:
        from . import _native

        out["native"] = _native
    except ImportError:
        pass
    return out
