"""vinesim: deterministic simulator and control stack for an everting
search-and-rescue vine robot with a steerable tip."""

from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
__all__ = ["KERNEL_BACKEND", "__version__"]
