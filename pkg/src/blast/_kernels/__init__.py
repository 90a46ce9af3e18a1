"""Kernel backend selection.

The compiled Cython extension is preferred when present; setting
``BLAST_KERNELS=py`` forces the pure-Python fallback (useful for testing
and for installs without a C compiler).
"""

import os

if os.environ.get("BLAST_KERNELS", "").lower() in ("py", "python"):
    from . import pyk as backend
else:
    try:
        from . import _ck as backend  # type: ignore[no-redef]
    except ImportError:
        from . import pyk as backend  # type: ignore[no-redef]

BACKEND = backend.NAME

lj_pair = backend.lj_pair
morse_pair = backend.morse_pair
sw_energy_forces = backend.sw_energy_forces


def available_backends():
    names = ["python"]
    try:
        from . import _ck  # noqa: F401

        names.insert(0, "compiled")
    except ImportError:
        pass
    return names


def get_backend(name):
    """Return a specific backend module by name ("compiled" or "python")."""
    if name == "python":
        from . import pyk

        return pyk
    if name == "compiled":
        from . import _ck

        return _ck
    raise ValueError(f"unknown kernel backend: {name!r}")
