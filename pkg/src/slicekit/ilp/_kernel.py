"""Pick the branch-and-bound kernel at import time.

The compiled extension is used when it was built; otherwise, or when
``SLICEKIT_PURE_PYTHON`` is set to a non-empty value, the pure-Python kernel.
"""

from __future__ import annotations

import os

from slicekit.ilp import _bnb_py

KERNELS = {"python": _bnb_py.search}

try:
    from slicekit.ilp import _bnb_cy
except ImportError:  # extension not built
    _bnb_cy = None
else:
    KERNELS["cython"] = _bnb_cy.search

if os.environ.get("SLICEKIT_PURE_PYTHON") or _bnb_cy is None:
    DEFAULT_KERNEL = "python"
else:
    DEFAULT_KERNEL = "cython"


def get_kernel(name: str | None = None):
    name = name or DEFAULT_KERNEL
    try:
        return KERNELS[name]
    except KeyError:
        raise ValueError(f"kernel {name!r} is not available; have {sorted(KERNELS)}") from None
