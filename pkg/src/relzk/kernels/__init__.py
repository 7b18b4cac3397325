"""Hot kernels with a compiled backend and a numpy fallback.

The compiled extension is used when it imported cleanly, unless the
environment variable ``RELZK_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("RELZK_PURE_PYTHON", "") != "1":
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass

binding_success_counts = _impl.binding_success_counts
coloring_acceptance = _impl.coloring_acceptance

__all__ = ["BACKEND", "binding_success_counts", "coloring_acceptance"]
