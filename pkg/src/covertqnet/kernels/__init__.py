"""Hot-kernel selection: compiled extensions when available, numpy otherwise.

Set COVERTQNET_PURE=1 to force the pure-python kernels (used by the
benchmark and by CI parity tests).
"""

import os

from . import fallback

_force_pure = os.environ.get("COVERTQNET_PURE", "0") not in ("", "0")

if not _force_pure:
    try:
        from ._quadcore import gk15_panels
        from ._densecore import (apply_1q, apply_diag1q, apply_cnot,
                                 apply_phase_mask, z_prob, project_z)
        BACKEND = "compiled"
    except ImportError:
        _force_pure = True

if _force_pure:
    from .fallback import (gk15_panels, apply_1q, apply_diag1q, apply_cnot,
                           apply_phase_mask, z_prob, project_z)
    BACKEND = "pure"

GK_NODES = fallback.GK_NODES
GK_WEIGHTS_K = fallback.GK_WEIGHTS_K
GK_WEIGHTS_G = fallback.GK_WEIGHTS_G


def backend_name():
    """Which kernel implementation the package is running on."""
    return BACKEND
