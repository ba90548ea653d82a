"""Hierarchical minimum-time quadrotor trajectory planning in voxel worlds.

Pipeline stages:
  1. topological roadmap search for geometrically distinct guide paths,
  2. point-mass bang-bang trajectories through the waypoint sequence,
  3. guided stochastic tree search over the full rigid-body dynamics.
"""

from ._kernels import backend_name

__version__ = "0.1.0"

__all__ = ["backend_name", "__version__"]
