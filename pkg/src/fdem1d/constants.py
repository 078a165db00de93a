"""Physical constants used across the package."""

import math

# magnetic permeability of free space, H/m
MU0 = 4.0e-7 * math.pi

# dielectric permittivity of free space, F/m
EPS0 = 8.854e-12
