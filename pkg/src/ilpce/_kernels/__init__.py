"""Hot kernels with a compiled core and a numpy fallback.

The compiled extension is used when it imports and ``ILPCE_PURE`` is not set
to ``1``. ``BACKEND`` names the active implementation.
"""

import os

from . import pydp, pylp

_compiled = None
if os.environ.get("ILPCE_PURE") != "1":
    try:
        from . import _core as _compiled
    except ImportError:
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


def get(name=None):
    """Return the kernel namespace for ``name`` ("compiled", "python", or active)."""
    name = name or BACKEND
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    if name == "python":
        return _Python
    raise ValueError(f"unknown backend {name!r}")


class _Python:
    dual_simplex = staticmethod(pylp.dual_simplex)
    cover_dp = staticmethod(pydp.cover_dp)


def available():
    return ["compiled", "python"] if _compiled is not None else ["python"]
