"""Static optical relations of a two-mirror Fabry-Perot cavity.

High-finesse approximations are used throughout (finesse = 2*pi / total
round-trip power loss, Lorentzian resonance); with losses at the tens of
ppm level the corrections are O(loss) and far below any tolerance used
here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import C_LIGHT
from .errors import ConfigError, UnitError
from .spectra import UNIT_DISPLACEMENT, UNIT_FREQUENCY


@dataclass(frozen=True)
class CavityParams:
    """Optical cavity and mirror parameters.

    Transmissions and losses are power fractions per pass / round trip.
    `input_power` may be zero (dark cavity), everything else is positive.
    """

    wavelength: float          # [m]
    length: float              # [m]
    input_transmission: float  # T1
    end_transmission: float = 0.0    # T2
    excess_loss: float = 0.0         # round-trip loss on top of T1+T2
    mirror_mass: float = 1e-2        # [kg]
    input_power: float = 0.0         # [W]

    def __post_init__(self):
        if self.wavelength <= 0.0 or self.length <= 0.0:
            raise ConfigError("wavelength and length must be positive")
        if self.mirror_mass <= 0.0:
            raise ConfigError("mirror mass must be positive")
        if self.input_transmission <= 0.0:
            raise ConfigError("input transmission must be positive")
        if self.end_transmission < 0.0 or self.excess_loss < 0.0:
            raise ConfigError("end transmission and excess loss must be >= 0")
        if self.input_power < 0.0:
            raise ConfigError("input power must be >= 0")
        if self.round_trip_loss >= 1.0:
            raise ConfigError("total round-trip loss must stay below 1")

    @property
    def round_trip_loss(self):
        return self.input_transmission + self.end_transmission + self.excess_loss

    @property
    def optical_frequency(self):
        """Laser carrier frequency c/lambda [Hz]."""
        return C_LIGHT / self.wavelength

    @property
    def omega0(self):
        """Carrier angular frequency 2*pi*c/lambda [rad/s], always derived."""
        return 2.0 * np.pi * self.optical_frequency


@dataclass(frozen=True)
class PendulumStiffness:
    """Restoring stiffness of the final suspension stage at the mirror."""

    resonance_hz: float
    stiffness: float  # [N/m]

    def __post_init__(self):
        if self.resonance_hz <= 0.0 or self.stiffness <= 0.0:
            raise ConfigError("pendulum resonance and stiffness must be positive")

    @classmethod
    def from_resonance(cls, resonance_hz, mass):
        """k = m * (2*pi*f0)**2."""
        if mass <= 0.0:
            raise ConfigError("mass must be positive")
        k = mass * (2.0 * np.pi * resonance_hz) ** 2
        return cls(resonance_hz=resonance_hz, stiffness=k)


def fsr(cav):
    """Free spectral range c/(2L) [Hz]."""
    return C_LIGHT / (2.0 * cav.length)


def finesse(cav):
    """2*pi / round-trip loss (high-finesse limit)."""
    rho = cav.round_trip_loss
    if rho <= 0.0:
        raise ConfigError("round-trip loss must be positive for a finesse")
    return 2.0 * np.pi / rho


def fwhm(cav):
    """Cavity bandwidth FSR/finesse [Hz]."""
    return fsr(cav) / finesse(cav)


def buildup_gain(cav):
    """On-resonance circulating-power gain 4*T1/rho**2."""
    return 4.0 * cav.input_transmission / cav.round_trip_loss ** 2


def circulating_power(cav, detuning_hz=0.0):
    """Lorentzian power build-up P_in * G / (1 + (2*dnu/FWHM)**2) [W]."""
    x = 2.0 * detuning_hz / fwhm(cav)
    return cav.input_power * buildup_gain(cav) / (1.0 + x * x)


def disp_per_hz(cav):
    """Conversion from cavity detuning to mirror displacement, L*lambda/c [m/Hz].

    dL = dnu * L/nu: a frequency offset dnu on the lock point corresponds
    to this much cavity-length change.
    """
    return cav.length * cav.wavelength / C_LIGHT


def freq_to_disp(cav, spectrum):
    """Convert a frequency-noise spectrum [Hz/rtHz] to displacement [m/rtHz]."""
    if spectrum.unit != UNIT_FREQUENCY:
        raise UnitError(f"expected {UNIT_FREQUENCY!r}, got {spectrum.unit!r}")
    return spectrum.scaled(disp_per_hz(cav), unit=UNIT_DISPLACEMENT)


def disp_to_freq(cav, spectrum):
    """Inverse of `freq_to_disp`."""
    if spectrum.unit != UNIT_DISPLACEMENT:
        raise UnitError(f"expected {UNIT_DISPLACEMENT!r}, got {spectrum.unit!r}")
    return spectrum.scaled(1.0 / disp_per_hz(cav), unit=UNIT_FREQUENCY)


def _rp_force(cav, detuning_hz):
    """Radiation-pressure force on the mirror at a given detuning [N]."""
    return 2.0 * circulating_power(cav, detuning_hz) / C_LIGHT


def rp_equilibrium(cav, pendulum, laser_detuning_hz=0.0):
    """Static equilibria of the radiation-pressure / pendulum force balance.

    Solves k*x = 2*P_c(dnu(x))/c with dnu(x) = laser_detuning - x*nu/L:
    a displacement of the mirror retunes the cavity, so the intracavity
    force is a Lorentzian in x and the balance is bistable for part of
    the parameter space.  Returns all real roots (1 or 3), ascending,
    found by dense bracketing plus bisection.
    """
    k = pendulum.stiffness
    if cav.input_power == 0.0:
        return [0.0]

    m_per_hz = disp_per_hz(cav)
    x_lw = fwhm(cav) * m_per_hz            # linewidth expressed as displacement
    x_res = laser_detuning_hz * m_per_hz   # displacement that tunes onto resonance
    x_max = _rp_force(cav, 0.0) / k        # largest possible static deflection

    def residual(x):
        detuning = laser_detuning_hz - x / m_per_hz
        return k * x - _rp_force(cav, detuning)

    lo = min(0.0, x_res - 10.0 * x_lw) - 0.01 * x_lw
    hi = max(1.05 * x_max, x_res + 10.0 * x_lw) + 0.01 * x_lw
    samples = np.unique(np.concatenate([
        np.linspace(lo, hi, 8001),
        x_res + x_lw * np.linspace(-10.0, 10.0, 8001),
    ]))
    values = residual(samples)

    roots = [float(x) for x, v in zip(samples, values) if v == 0.0]
    sign_change = np.where(np.sign(values[:-1]) * np.sign(values[1:]) < 0)[0]
    for i in sign_change:
        a, b = samples[i], samples[i + 1]
        fa = values[i]
        while True:
            mid = 0.5 * (a + b)
            if mid == a or mid == b:
                break
            fm = residual(mid)
            if fm == 0.0:
                a = b = mid
                break
            if np.sign(fm) == np.sign(fa):
                a, fa = mid, fm
            else:
                b = mid
        root = a if abs(residual(a)) <= abs(residual(b)) else b
        roots.append(float(root))

    roots.sort()
    deduped = []
    tol = 1e-9 * max(x_lw, x_max)
    for r in roots:
        if not deduped or r - deduped[-1] > tol:
            deduped.append(r)
    return deduped
