"""Backend selection for the hot kernels.

The compiled extension ``bpb._kernels`` is used when importable; otherwise the
numpy implementation in ``bpb._kernels_py`` is used. Setting the environment
variable ``BPB_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("BPB_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"

jacobi_eigh = _impl.jacobi_eigh
lambda_max_sweep = _impl.lambda_max_sweep
points_max = _impl.points_max
KernelNoConvergence = _impl.KernelNoConvergence

# kept importable for the benchmark and the backend-parity tests
python_backend = _kernels_py


def compiled_backend():
    """Return the compiled kernel module, or ``None`` if it is not built."""
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels
