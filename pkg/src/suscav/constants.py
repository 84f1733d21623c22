"""Physical constants, CODATA 2018."""

HBAR = 1.054571817e-34   # reduced Planck constant [J s]
C_LIGHT = 299792458.0    # speed of light [m/s], exact
K_B = 1.380649e-23       # Boltzmann constant [J/K], exact
G_STD = 9.80665          # standard gravity [m/s^2]
