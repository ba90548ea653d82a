"""Kernel backend selection.

The compiled extension is preferred when importable; the pure numpy twin is
a drop-in replacement.  Override with QUADPLAN_KERNELS=pure|native.
"""

from __future__ import annotations

import os

from . import pure

_choice = os.environ.get("QUADPLAN_KERNELS", "").strip().lower()

if _choice == "pure":
    impl = pure
elif _choice == "native":
    from . import _native as impl  # hard failure if the extension is missing
else:
    try:
        from . import _native as impl
    except ImportError:
        impl = pure


def backend_name() -> str:
    return impl.BACKEND


esdf_at = impl.esdf_at
segment_free = impl.segment_free
first_blocked = impl.first_blocked
axis_fastest = impl.axis_fastest
axis_time_grad = impl.axis_time_grad
axis_stretch = impl.axis_stretch
pmm_gd = impl.pmm_gd
rk4_step_arr = impl.rk4_step_arr
propagate_phases = impl.propagate_phases
metric_dist = impl.metric_dist
ref_nearest_pos = impl.ref_nearest_pos
ref_nearest_state = impl.ref_nearest_state
StateIndex = impl.StateIndex
