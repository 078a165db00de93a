"""Kernel backend selection.

The layered-earth recursion and its derivative chain are the hot inner
loops of the package.  A Cython extension is used when it was built;
otherwise a NumPy implementation with identical semantics takes over.
``fdem1d._core.kernels`` is the active backend, ``BACKEND`` its name.
"""

from . import kernels_np

try:  # pragma: no cover - depends on the build environment
    from . import _kernels as _compiled
    kernels = _compiled
    BACKEND = "compiled"
except ImportError:  # pragma: no cover
    kernels = kernels_np
    BACKEND = "numpy"

__all__ = ["kernels", "kernels_np", "BACKEND"]
