from pathlib import Path

PACKAGE_CONFIG_DIR = Path(__file__).parent.parent / "config"

# parameters that identify a sweep cell, in grid order
CELL_PARAMETERS = ("target_y", "target_z", "occ_y", "occ_z", "theta", "w1", "w2", "radius", "sigma")

# aggregate() accepts these besides the cell parameters
GROUP_ALIASES = {"weights": ("w1", "w2"), "r": ("radius",)}

# termination of a trial that raised instead of finishing
ERROR = "error"

# termination values excluded from aggregate means
FAILED_TERMINATIONS = ("ik_failed", ERROR)

STATUS_SUCCESS = "Success"
STATUS_ERROR = "Error"

RESULTS_FILE = "results.csv"
SUMMARY_FILE = "summary.csv"
RUN_LOG_FILE = "runs.csv"
FRAMES_DIR = "frames"

RESULT_FIELDS = [
	"trial_id",
	"method",
	*CELL_PARAMETERS,
	"replicate",
	"seed",
	"f_n",
	"a_start",
	"a_end",
	"delta_a",
	"steps",
	"termination",
	"status",
	"message",
	"wall_time",
]

SUMMARY_FIELDS = [
	"group",
	"value",
	"method",
	"count",
	"failures",
	"mean_f_n",
	"std_f_n",
	"mean_delta_a",
	"std_delta_a",
	"delta_a_kind",
]

ABSOLUTE_DELTA_A = "absolute percentage points"
RELATIVE_DELTA_A = "relative percent of start area"
