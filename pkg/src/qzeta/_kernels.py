"""Select the polynomial kernel backend.

The compiled GMP kernels are used when the extension is importable;
``QZETA_PURE_PYTHON=1`` forces the pure-Python fallback.
"""

import os

if os.environ.get("QZETA_PURE_PYTHON", "") not in ("", "0"):
    from qzeta._pykernels import BACKEND, content, divmod_exact, evaluate, mul, strip
else:
    try:
        from qzeta._ckernels import BACKEND, content, divmod_exact, evaluate, mul, strip
    except ImportError:  # extension not built
        from qzeta._pykernels import BACKEND, content, divmod_exact, evaluate, mul, strip

__all__ = ["BACKEND", "content", "divmod_exact", "evaluate", "mul", "strip"]
