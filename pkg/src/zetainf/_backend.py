"""Select the compiled kernels when available, else the numpy fallback."""

import os

from . import _pykernels

BACKEND = "python"
kernels = _pykernels

if os.environ.get("ZETAINF_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as kernels  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        pass

interval_chain_contains = kernels.interval_chain_contains
cantor_contains = kernels.cantor_contains
stacked_power_contains = kernels.stacked_power_contains
