MIN_IMAGE_SIZE = 16

# camera grid of the physical array prototype, meters
DEFAULT_ARRAY_OFFSETS = (0.027, 0.027, 0.03)

PPM_MAX_VALUE = 255
