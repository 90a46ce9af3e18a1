"""Force-field development workbench.

Submodules: potentials (model registry + energy/forces), structures,
properties, trainset, objective, learn, parallel, wrapper, jobs.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND as kernel_backend  # noqa: F401
