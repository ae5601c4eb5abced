"""Select the compiled fast path if available, else the NumPy reference.

Set ABKIT_FORCE_PURE=1 to ignore the extension (used by the benchmark and
by tests that pin the backend).
"""

from __future__ import annotations

import os

from . import _ref

_IMPL = _ref
BACKEND = "purepy"

if os.environ.get("ABKIT_FORCE_PURE", "0") != "1":
    try:
        from . import _fast  # type: ignore[attr-defined]

        _IMPL = _fast
        BACKEND = "compiled"
    except Exception:
        pass


def get_backend() -> str:
    return BACKEND


def available_backends():
    names = ["purepy"]
    if BACKEND == "compiled":
        names.append("compiled")
    return names


jnu_series_batch = _IMPL.jnu_series_batch
inu_series_batch = _IMPL.inu_series_batch
b_alpha_batch = _IMPL.b_alpha_batch
b_alpha_contour_batch = _IMPL.b_alpha_contour_batch
# Miller recurrence and the large-argument expansion are table-build only;
# they always run through the NumPy reference.
jnu_miller_batch = _ref.jnu_miller_batch
jnu_asym_batch = _ref.jnu_asym_batch
