"""Classical noise of the beat-note readout chain.

The beat frequency between the two cavity-locked lasers is tracked by a
PLL whose control voltage passes an analogue whitening filter before
digitisation.  ADC quantisation noise is therefore divided by the
whitening gain when referred to the input; both ADC and PLL noise are
frequency noises that convert to displacement through the static cavity
relation dL = dnu * L * lambda / c.

Laser intensity noise pushes the light mirrors through classical
radiation pressure; the intensity stabilisation servo (ISS) divides that
coupling by a frequency-dependent factor.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .cavity import disp_per_hz
from .constants import C_LIGHT
from .errors import ConfigError, GridError, UnitError
from .spectra import (
    UNIT_DISPLACEMENT,
    UNIT_RELATIVE,
    Spectrum,
    cumulative_rms,
)


class SaturationWarning(UserWarning):
    """Predicted RMS exceeds the linear range of the readout."""


@dataclass(frozen=True)
class ReadoutConfig:
    vco_range: float            # [Hz] linear range of the beat tracking
    pll_noise_floor: float      # [Hz/rtHz] flat residual of the PLL
    adc_bits: int
    adc_fullscale: float        # [V peak-to-peak]
    sample_rate: float          # [Hz]
    whitening: "ZPK"            # analogue filter ahead of the ADC
    volts_to_hz: float          # [Hz/V] PLL control-voltage calibration

    def __post_init__(self):
        if self.vco_range <= 0.0:
            raise ConfigError("VCO range must be positive")
        if self.pll_noise_floor < 0.0:
            raise ConfigError("PLL noise floor must be >= 0")
        if self.adc_bits < 1:
            raise ConfigError("ADC needs at least one bit")
        if self.adc_fullscale <= 0.0 or self.sample_rate <= 0.0:
            raise ConfigError("ADC full scale and sample rate must be positive")
        if self.volts_to_hz <= 0.0:
            raise ConfigError("volts-to-hertz calibration must be positive")


def adc_noise_asd(config, cav, grid):
    """ADC quantisation noise referred to displacement [m/rtHz].

    Quantisation ASD = LSB / sqrt(12 * f_nyquist) spread over the first
    Nyquist zone, divided by the whitening magnitude, then through the
    voltage and cavity calibrations.
    """
    lsb = config.adc_fullscale / 2.0 ** config.adc_bits
    volts = lsb / np.sqrt(12.0 * config.sample_rate / 2.0)
    whitening = np.abs(config.whitening.evaluate(grid))
    hz = volts / whitening * config.volts_to_hz
    return Spectrum(grid, hz * disp_per_hz(cav), UNIT_DISPLACEMENT)


def pll_noise_asd(config, cav, grid):
    """Flat PLL frequency-noise floor as displacement [m/rtHz]."""
    level = config.pll_noise_floor * disp_per_hz(cav)
    return Spectrum(grid, np.full(len(grid), level), UNIT_DISPLACEMENT)


@dataclass(frozen=True, eq=False)
class IntensityNoiseConfig:
    rin: Spectrum                    # relative intensity noise [1/rtHz]
    iss_suppression: np.ndarray      # >= 1 everywhere, aligned with rin.grid
    circulating_power: float         # [W]
    susceptibility: np.ndarray       # mirror force response [m/N] on the grid

    def __post_init__(self):
        if self.rin.unit != UNIT_RELATIVE:
            raise UnitError(f"RIN spectrum must be {UNIT_RELATIVE!r}")
        iss = np.asarray(self.iss_suppression, dtype=float)
        chi = np.asarray(self.susceptibility)
        if iss.shape != self.rin.grid.values.shape:
            raise GridError("ISS suppression does not match the grid")
        if chi.shape != self.rin.grid.values.shape:
            raise GridError("susceptibility does not match the grid")
        if np.any(iss < 1.0):
            raise ConfigError("ISS suppression must be >= 1 everywhere")
        if self.circulating_power < 0.0:
            raise ConfigError("circulating power must be >= 0")
        object.__setattr__(self, "iss_suppression", iss)
        object.__setattr__(self, "susceptibility", chi)


def intensity_rp_displacement(config, grid, iss_on=True):
    """Classical radiation-pressure displacement from intensity noise.

    Force ASD = 2 * P_c * RIN / c on the mirror, times the mirror's
    mechanical susceptibility; the ISS divides the result in its band.
    """
    if not config.rin.grid.same_as(grid):
        raise GridError("RIN spectrum grid does not match the analysis grid")
    force = 2.0 * config.circulating_power * config.rin.asd / C_LIGHT
    asd = np.abs(config.susceptibility) * force
    if iss_on:
        asd = asd / config.iss_suppression
    return Spectrum(grid, asd, UNIT_DISPLACEMENT)


def iss_profile(grid, peak=5.0, band=(30.0, 100.0)):
    """Smooth ISS suppression factor: `peak` at the band centre, 1 far away.

    Log-Gaussian bump with sigma = ln(f2/fc); the factor stays well above
    1 across the band and approaches `peak` at its geometric centre.
    """
    if peak < 1.0:
        raise ConfigError("peak suppression must be >= 1")
    f1, f2 = band
    if not (0.0 < f1 < f2):
        raise ConfigError("ISS band must satisfy 0 < f1 < f2")
    centre = np.sqrt(f1 * f2)
    sigma = np.log(f2 / centre)
    bump = np.exp(-np.log(grid.values / centre) ** 2 / (2.0 * sigma ** 2))
    return 1.0 + (peak - 1.0) * bump


@dataclass(frozen=True)
class AcousticPeak:
    center: float   # [Hz]
    width: float    # full width at half power [Hz]
    height: float   # peak ASD [m/rtHz]

    def __post_init__(self):
        if self.center <= 0.0 or self.width <= 0.0 or self.height < 0.0:
            raise ConfigError("acoustic peaks need positive centre/width")


def acoustic_peaks(peaks, grid):
    """Sum of Lorentzian ASD bumps (in quadrature) [m/rtHz]."""
    f = grid.values
    psd = np.zeros(len(grid))
    for p in peaks:
        half = 0.5 * p.width
        psd += p.height ** 2 * half ** 2 / ((f - p.center) ** 2 + half ** 2)
    return Spectrum(grid, np.sqrt(psd), UNIT_DISPLACEMENT)


@dataclass(frozen=True)
class SaturationReport:
    rms_m: float
    rms_hz: float
    margin_ratio: float
    unbounded: bool

    @property
    def saturated(self):
        return not self.unbounded and self.margin_ratio < 1.0


def saturation_margin(budget, config, cav):
    """Beat-frequency RMS of a displacement budget against the VCO range.

    The total displacement RMS (cumulative RMS evaluated at the bottom of
    the grid, which must reach at or below 0.5 Hz) converts to hertz via
    the inverse of the frequency-to-displacement relation.
    """
    if budget.unit != UNIT_DISPLACEMENT:
        raise UnitError("saturation margin needs a displacement budget")
    if budget.grid.fmin > 0.5:
        raise GridError("budget grid must extend down to 0.5 Hz or lower")
    rms_m = float(cumulative_rms(budget.total).asd[0])
    if rms_m == 0.0:
        return SaturationReport(rms_m=0.0, rms_hz=0.0,
                                margin_ratio=np.inf, unbounded=True)
    rms_hz = rms_m / disp_per_hz(cav)
    margin = config.vco_range / rms_hz
    if margin < 1.0:
        warnings.warn(
            f"predicted beat RMS {rms_hz:.3g} Hz exceeds the VCO range "
            f"{config.vco_range:.3g} Hz",
            SaturationWarning,
            stacklevel=2,
        )
    return SaturationReport(rms_m=rms_m, rms_hz=rms_hz,
                            margin_ratio=margin, unbounded=False)
