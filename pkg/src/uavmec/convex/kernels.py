"""Backend dispatch for the atom evaluation kernels.

``UAVMEC_BACKEND`` selects the implementation:

    auto   (default) numba if importable, else numpy
    numba  require the compiled kernels
    numpy  force the pure-numpy fallback

The chosen backend's name is exported as ``BACKEND``.
"""

import os

_choice = os.environ.get("UAVMEC_BACKEND", "auto").lower()

if _choice not in ("auto", "numba", "numpy"):
    raise ValueError(f"UAVMEC_BACKEND must be auto|numba|numpy, got {_choice}")

if _choice == "numpy":
    from . import kernels_numpy as _impl
    BACKEND = "numpy"
else:
    try:
        from . import kernels_numba as _impl
        BACKEND = "numba"
    except ImportError:
        if _choice == "numba":
            raise
        from . import kernels_numpy as _impl
        BACKEND = "numpy"

affine_value = _impl.affine_value
affine_grad = _impl.affine_grad
quad_value = _impl.quad_value
quad_grad = _impl.quad_grad
quad_hess = _impl.quad_hess
normcube_value = _impl.normcube_value
normcube_grad = _impl.normcube_grad
normcube_hess = _impl.normcube_hess
qol_value = _impl.qol_value
qol_grad = _impl.qol_grad
qol_hess = _impl.qol_hess
cube_value = _impl.cube_value
cube_grad = _impl.cube_grad
cube_hess = _impl.cube_hess
neglog_value = _impl.neglog_value
neglog_grad = _impl.neglog_grad
neglog_hess = _impl.neglog_hess
logsuminv_value = _impl.logsuminv_value
logsuminv_grad = _impl.logsuminv_grad
logsuminv_hess = _impl.logsuminv_hess
rank1_hess = _impl.rank1_hess
