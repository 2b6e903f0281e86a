"""Hot kernels: compiled Cython when built, NumPy otherwise.

Set ``CAVITY_HARDY_PURE=1`` to force the NumPy path.

Both backends expose

``simpson_profile_sum(v, b, inv_rdef, wavenumber, t_end, n)``
    Simpson sum of ``exp(-|v t - b| / R_def) cos(pi (v t - b) / a_l)`` over
    ``n`` (even) intervals of ``[0, t_end]``.
``rotate_pairs(psi, ia, ib, c, s)``
    In-place real rotation of amplitude pairs ``(psi[ia], psi[ib])``.
"""

import os

from . import _fallback

BACKEND = "python"

if os.environ.get("CAVITY_HARDY_PURE", "") not in ("", "0"):
    _impl = _fallback
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback

simpson_profile_sum = _impl.simpson_profile_sum
rotate_pairs = _impl.rotate_pairs

__all__ = ["BACKEND", "simpson_profile_sum", "rotate_pairs", "_fallback"]
