"""Backend selection for the polynomial evaluation kernels.

The compiled extension is used when it imports; set ``TVLAB_PURE=1`` to force
the numpy fallback.
"""

import os

if os.environ.get("TVLAB_PURE"):
    from tvlab import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from tvlab import _kernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        from tvlab import _kernels_py as _impl

        BACKEND = "python"

monomial_matrix = _impl.monomial_matrix
poly_eval = _impl.poly_eval
poly_grad = _impl.poly_grad

__all__ = ["BACKEND", "monomial_matrix", "poly_eval", "poly_grad"]
