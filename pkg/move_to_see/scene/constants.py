TARGET = "target"
OCCLUDER = "occluder"
BACKGROUND = "background"

DISK = "disk"
SQUARE = "square"
OCCLUDER_SHAPES = (DISK, SQUARE)

# kind codes returned by the vectorised ray caster; occluder i is OCCLUDER_CODE + i
BACKGROUND_CODE = -1
TARGET_CODE = 0
OCCLUDER_CODE = 1

# hits closer than this are treated as self-intersections
RAY_EPSILON = 1e-9

TARGET_COLOR = (0.85, 0.1, 0.1)
OCCLUDER_COLOR = (0.2, 0.6, 0.2)
BACKGROUND_COLOR = (0.55, 0.7, 0.9)
