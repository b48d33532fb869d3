PROPOSED = "proposed"
NAIVE = "naive"
METHODS = (PROPOSED, NAIVE)

# trajectory terminations
SCORE_REACHED = "score_reached"
GRADIENT_CONVERGED = "gradient_converged"
MAX_STEPS = "max_steps"
TARGET_LOST = "target_lost"
IK_FAILED = "ik_failed"
BLOCKED = "blocked"
TERMINATIONS = (SCORE_REACHED, GRADIENT_CONVERGED, MAX_STEPS, TARGET_LOST, IK_FAILED, BLOCKED)

# marks the footer row of a trajectory CSV in the step-index column
FOOTER_MARK = "end"

TRAJECTORY_FIELDS = [
	"k",
	"x",
	"y",
	"z",
	"qx",
	"qy",
	"qz",
	"qw",
	*(f"q{i}" for i in range(1, 8)),
	"p_ref",
	"f_ref",
	"m_ref",
	"grad_x",
	"grad_y",
	"grad_z",
	"grad_norm",
	"residual",
	"roll",
	"pitch",
	"termination",
	"a_start",
	"a_end",
	"f_n",
]
