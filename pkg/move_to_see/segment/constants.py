FEATURE_DIM = 3

# +90 degrees, as a fraction of the hue circle
HUE_ROTATION = 0.25
