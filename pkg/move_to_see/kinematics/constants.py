from pathlib import Path

NUM_JOINTS = 7

DEFAULT_ARM_FILE = Path(__file__).parent.parent / "config" / "default_arm.json"

# inverse kinematics
IK_DAMPING = 0.01
IK_MAX_ITERATIONS = 200
IK_POSITION_TOLERANCE = 1e-5
IK_ORIENTATION_TOLERANCE = 1e-4
