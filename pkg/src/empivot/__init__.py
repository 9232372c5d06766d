"""Planning, command compilation and coil-force physics for edge-pivoting
electromagnet cube robots."""

__version__ = "0.1.0"

from .lattice import (  # noqa: F401
    Cube,
    LatticeState,
    Orientation,
    WorldEdge,
    edge_world_pose,
    world_edge_to_em,
)
