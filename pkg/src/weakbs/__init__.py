"""Weak-coupling bound states of -Laplace - eps V in two dimensions via the Birman-Schwinger operator."""

__version__ = "0.1.0"

from .potential import Potential, builtin, check_assumption, integral_U, load_potential  # noqa: E402
from .grid import Grid2D, build_cartesian, build_polar, default_grid  # noqa: E402
from .weakcoupling import EigenSolveResult, find_root, sweep  # noqa: E402

__all__ = ["Potential", "builtin", "check_assumption", "integral_U", "load_potential",
           "Grid2D", "build_cartesian", "build_polar", "default_grid",
           "EigenSolveResult", "find_root", "sweep", "__version__"]
