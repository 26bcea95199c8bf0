"""Exact-arithmetic inverse kinematics for six-joint arms with intersecting wrist axes."""

__version__ = "0.1.0"

from .estimators import ForwardKinematics, InverseKinematics  # noqa: E402
from .kinematics import JointConfig, Pose, RobotGeometry, forward_kinematics  # noqa: E402

__all__ = [
    "ForwardKinematics",
    "InverseKinematics",
    "JointConfig",
    "Pose",
    "RobotGeometry",
    "forward_kinematics",
    "__version__",
]
