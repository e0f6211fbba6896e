"""Backend selection for the hot loops.

The compiled extension is used when it imports; set
``GVF_FORMATION_PURE_PYTHON=1`` to force the pure-Python fallback.
"""

import os

if os.environ.get("GVF_FORMATION_PURE_PYTHON", "") not in ("", "0"):
    from gvf_formation import _pykernels as impl
else:
    try:
        from gvf_formation import _ckernels as impl
    except ImportError:
        from gvf_formation import _pykernels as impl

BACKEND = "python" if impl.__name__.endswith("_pykernels") else "cython"

wrap_angle = impl.wrap_angle
rk4_step = impl.rk4_step
euler_step = impl.euler_step
circle_command = impl.circle_command
track_circle = impl.track_circle

__all__ = [
    "BACKEND",
    "circle_command",
    "euler_step",
    "impl",
    "rk4_step",
    "track_circle",
    "wrap_angle",
]
