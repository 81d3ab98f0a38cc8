"""Backend selection for the inner-loop kernels.

The compiled extension is preferred when it built; the pure numpy module is
the fallback and the reference implementation. Set THIRRSIM_PURE=1 to force
the fallback (useful for benchmarking and for debugging kernel diffs).
"""

from __future__ import annotations

import os

from . import pure as _pure

if os.environ.get("THIRRSIM_PURE", "") == "1":
    _backend = _pure
else:
    try:
        from . import _core as _backend  # type: ignore[no-redef]
    except ImportError:
        _backend = _pure

BACKEND = _backend.NAME

nonlinear_phase = _backend.nonlinear_phase
apply_kspace = _backend.apply_kspace
preelim_rhs = _backend.preelim_rhs


def available_backends() -> list[str]:
    names = ["pure"]
    try:
        from . import _core  # noqa: F401
        names.append("compiled")
    except ImportError:
        pass
    return names


def get_backend(name: str):
    """Fetch a backend module by name ('pure' or 'compiled')."""
    if name == "pure":
        return _pure
    if name == "compiled":
        from . import _core
        return _core
    raise ValueError(f"unknown backend {name!r}")
