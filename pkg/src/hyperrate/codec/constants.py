# Copyright 2024 The hyperrate Authors

MAGIC = b'HRC1'
VERSION = 1

# Rate LUT domain: m in [0, M_MAX], delta = (Q - 1) / 2 in [0, DELTA_MAX].
M_MAX = 1023
DELTA_MAX = 255
Q_MAX = 2 * DELTA_MAX + 1

# The LUT stores rates in millibits per sample as 16-bit unsigned integers.
LUT_SCALE = 1000
LUT_CAP = 65535

DEFAULT_SUBSET_LENGTH = 17
DEFAULT_ADAPTATION_SHIFT = 5

LUT_ENV_VAR = 'HYPERRATE_LUT_PATH'
GEOMETRY_ENV_VAR = 'HYPERRATE_GEOMETRY'

# Largest values of the unsigned header fields.
UINT8_MAX = 0xFF
UINT16_MAX = 0xFFFF
UINT32_MAX = 0xFFFFFFFF
