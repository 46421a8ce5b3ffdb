"""Generative design of planar tensegrity structures by cellular adhesion
and fusion of K4 cells, with a certified basis of the self-stress space."""

from .cells import CellType, cell_member_groups, cell_selfstress, classify_cell
from .geom import Point, Tolerance, affine_area_f, is_general_position, orientation
from .model import CellRecord, Member, Structure, new_structure
from .multiply import (
    RigidityReport,
    StepDelta,
    adhere,
    degrees_of_freedom,
    delta_dim,
    fuse,
    laman_bound,
    place_fusion_node,
    rigidity_report,
)
from .stress import (
    StressBasis,
    WheelSpec,
    assemble_basis,
    conform_transform,
    equilibrium_matrix,
    equilibrium_residual,
    find_conform_state,
    find_virtual_cells_general,
    find_virtual_cells_wheel,
    nullity,
    nullspace_basis,
    span_residual,
    verify_independence,
    wheel_selfstress,
)

__version__ = "0.1.0"
