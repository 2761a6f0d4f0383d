"""Physical constants used throughout the package (SI units)."""

c = 299792458.0  # vacuum speed of light, m/s
