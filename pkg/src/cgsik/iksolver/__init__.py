"""Inverse kinematics for six-joint arms whose joint 4 and 5 axes intersect."""

from .chain import (
    ChainRejection,
    SinCosPair,
    theta1_theta5_special,
    theta2_from_point,
    theta3_from_point,
    theta4_from_chain,
    theta5_theta1_generic,
    theta6_from_point,
)
from .rationalize import horizontal_pose, rational_approx, rational_unit, rationalize_pose
from .solver import (
    MODES,
    BranchRecord,
    FkResidual,
    IkCandidate,
    IkSolutionSet,
    IntersectionPoint,
    PoseValidationError,
    SolverOptions,
    solve_intersection,
    solve_ik,
    verify_fk,
)
from .systems import (
    SpecialPoseError,
    build_generic_system,
    build_nonparallel_special_system,
    build_parallel_special_system,
)
