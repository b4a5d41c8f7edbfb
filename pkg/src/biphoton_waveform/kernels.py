"""Select the compiled kernel when available.

Set ``BIPHOTON_PURE_PYTHON=1`` to force the numpy fallback.
"""
import os

from . import _kernels_py

if os.environ.get("BIPHOTON_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

gl_panel_sums = _impl.gl_panel_sums
IMPLEMENTATION = _impl.IMPLEMENTATION
python_gl_panel_sums = _kernels_py.gl_panel_sums
