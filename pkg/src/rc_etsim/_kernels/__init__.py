"""Propagation kernels: compiled core with a pure-Python fallback.

The Cython extension ``_core`` is used when importable; otherwise the numpy
reference implementation ``_pyref`` takes over.  Set ``RC_ETSIM_BACKEND`` to
``python`` or ``cython`` to force a choice (forcing ``cython`` raises if the
extension is missing).  Both backends implement identical math; they are
cross-checked in the test suite and timed in ``rc_etsim.benchmark``.
"""

import os

from . import _pyref

_choice = os.environ.get("RC_ETSIM_BACKEND", "").strip().lower()

if _choice == "python":
    _impl = _pyref
elif _choice == "cython":
    from . import _core as _impl  # noqa: F401  (ImportError is the signal)
else:
    try:
        from . import _core as _impl
    except ImportError:
        _impl = _pyref

backend_name = _impl.BACKEND
propagate_const_rk4 = _impl.propagate_const_rk4
propagate_noise_rk4 = _impl.propagate_noise_rk4


def available_backends():
    names = ["python"]
    try:
        from . import _core  # noqa: F401
        names.append("cython")
    except ImportError:
        pass
    return names
