"""Kernel backend selection.

The hot loops (field/polaron time stepping, batched Jacobi evaluation) have
two interchangeable implementations: a Cython extension (`_speedups`) and a
numpy reference (`pure`).  The compiled one is preferred when importable;
set ``BREATHERLAB_KERNELS=pure`` or ``=compiled`` to force a choice.
`linear_evolve` is BLAS-bound and always comes from the numpy backend.
"""
import os

from . import pure

_choice = os.environ.get("BREATHERLAB_KERNELS", "").strip().lower()

_impl = None
if _choice != "pure":
    try:
        from . import _speedups as _impl
    except ImportError:
        _impl = None
        if _choice == "compiled":
            raise ImportError(
                "BREATHERLAB_KERNELS=compiled but the extension is not built; "
                "run `python setup.py build_ext --inplace` or reinstall"
            )

if _impl is not None:
    BACKEND_NAME = "compiled"
    field_evolve = _impl.field_evolve
    polaron_evolve = _impl.polaron_evolve
    jacobi_cn_sn_dn = _impl.jacobi_cn_sn_dn
else:
    BACKEND_NAME = "pure"
    field_evolve = pure.field_evolve
    polaron_evolve = pure.polaron_evolve
    jacobi_cn_sn_dn = pure.jacobi_cn_sn_dn

linear_evolve = pure.linear_evolve
