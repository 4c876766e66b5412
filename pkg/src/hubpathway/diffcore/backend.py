"""Kernel backend selection, resolved once at import.

HUBPATHWAY_BACKEND controls the choice:
  auto (default) -- compiled extension if importable, else the numpy fallback
  cython         -- compiled extension, ImportError if it is missing
  python         -- numpy fallback

`kernels` is the selected module; `BACKEND` names it ("cython" or "python").
Results are bit-reproducible within a backend; across backends they agree
only to rounding (different summation orders), so any bit-exactness
guarantee is per-backend.
"""

import os

_choice = os.environ.get("HUBPATHWAY_BACKEND", "auto").lower()

if _choice not in ("auto", "cython", "python"):
    raise ValueError(
        f"HUBPATHWAY_BACKEND must be auto, cython or python, got {_choice!r}"
    )

if _choice == "python":
    from . import _kernels_np as kernels

    BACKEND = "python"
elif _choice == "cython":
    from . import _kernels_cy as kernels  # type: ignore[no-redef]

    BACKEND = "cython"
else:
    try:
        from . import _kernels_cy as kernels  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_np as kernels  # type: ignore[no-redef]

        BACKEND = "python"
