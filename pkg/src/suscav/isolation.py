"""Active inertial isolation of the cryostat platform.

The platform is a payload on soft rubber feet (second-order ground-to-
payload transmissibility).  Geophones sense payload velocity, a servo
filters the signal and coil-magnet actuators push against the rigid
support frame, closing a per-axis feedback loop.  All analysis is in the
frequency domain on a shared grid.

Loop sign convention: the servo output drives a force opposing payload
velocity, so a positive servo gain damps.  The ground-to-payload
suppression is passive/(1 + G) with loop gain
G = (force response) * s * geophone * servo * actuator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericalError

HORIZONTAL = "horizontal"
VERTICAL = "vertical"


@dataclass(frozen=True)
class ZPK:
    """Rational transfer function as zeros/poles [rad/s] and gain.

    Complex zeros and poles must come in conjugate pairs so the system
    has real coefficients.
    """

    zeros: tuple
    poles: tuple
    gain: float

    def __post_init__(self):
        zeros = tuple(complex(z) for z in self.zeros)
        poles = tuple(complex(p) for p in self.poles)
        for label, roots in (("zeros", zeros), ("poles", poles)):
            unmatched = [r for r in roots if r.imag != 0.0]
            while unmatched:
                r = unmatched.pop()
                conj = r.conjugate()
                if conj in unmatched:
                    unmatched.remove(conj)
                else:
                    raise ConfigError(
                        f"complex {label} must come in conjugate pairs ({r} unmatched)"
                    )
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "poles", poles)

    def evaluate(self, grid):
        """H(i*omega) on the grid; rejects poles sitting on grid points."""
        s = 1j * grid.angular
        h = np.full(s.shape, self.gain, dtype=complex)
        for z in self.zeros:
            h = h * (s - z)
        for p in self.poles:
            d = s - p
            bad = np.nonzero(d == 0.0)[0]
            if bad.size:
                raise NumericalError(
                    "transfer-function pole lies on the evaluation grid",
                    frequency_hz=grid.values[bad[0]],
                )
            h = h / d
        return h

    def polynomials(self):
        """(numerator, denominator) coefficient arrays, highest power first."""
        num = self.gain * np.atleast_1d(np.poly(self.zeros) if self.zeros else 1.0)
        den = np.atleast_1d(np.poly(self.poles) if self.poles else 1.0)
        return np.real(num), np.real(den)

    @classmethod
    def from_config(cls, cfg):
        """Build from {'zeros': [{'real':..,'imag':..}], 'poles': [...], 'gain': g}."""
        def roots(items):
            return tuple(complex(d.get("real", 0.0), d.get("imag", 0.0)) for d in items)
        return cls(roots(cfg.get("zeros", [])), roots(cfg.get("poles", [])), float(cfg["gain"]))


@dataclass(frozen=True)
class PlatformParams:
    payload_mass: float            # [kg]
    horizontal_resonance: float    # [Hz]
    vertical_resonance: float      # [Hz]
    quality_factor: float          # resonance Q of the rubber feet

    def __post_init__(self):
        if min(self.payload_mass, self.horizontal_resonance,
               self.vertical_resonance, self.quality_factor) <= 0.0:
            raise ConfigError("all platform parameters must be positive")

    def resonance(self, axis):
        if axis == HORIZONTAL:
            return self.horizontal_resonance
        if axis == VERTICAL:
            return self.vertical_resonance
        raise ConfigError(f"unknown axis {axis!r}")


@dataclass(frozen=True)
class ActuatorParams:
    coil_resistance: float   # [ohm]
    coil_inductance: float   # [H]
    force_constant: float    # [N/A]

    def __post_init__(self):
        if min(self.coil_resistance, self.coil_inductance, self.force_constant) <= 0.0:
            raise ConfigError("all actuator parameters must be positive")


def platform_passive_tf(platform, axis, grid):
    """Ground-to-payload transmissibility (complex, dimensionless)."""
    w0 = 2.0 * np.pi * platform.resonance(axis)
    q = platform.quality_factor
    s = 1j * grid.angular
    return (w0 ** 2 + w0 / q * s) / (s ** 2 + w0 / q * s + w0 ** 2)


def platform_force_tf(platform, axis, grid):
    """Force-to-payload displacement response [m/N]."""
    m = platform.payload_mass
    w0 = 2.0 * np.pi * platform.resonance(axis)
    q = platform.quality_factor
    s = 1j * grid.angular
    return 1.0 / (m * (s ** 2 + w0 / q * s + w0 ** 2))


def geophone_tf(natural_freq, generator_constant, grid, quality_factor=0.3):
    """Geophone response, volts per unit case velocity.

    Second-order high-pass around the proof-mass resonance; in the
    inertial regime above it the output is generator_constant * velocity.
    The default Q corresponds to a strongly shunt-damped instrument.
    """
    if natural_freq <= 0.0:
        raise ConfigError("geophone natural frequency must be positive")
    w0 = 2.0 * np.pi * natural_freq
    s = 1j * grid.angular
    return generator_constant * s ** 2 / (s ** 2 + w0 / quality_factor * s + w0 ** 2)


def actuator_tf(actuator, grid):
    """Voltage-driven coil-magnet actuator, newtons per volt."""
    s = 1j * grid.angular
    return actuator.force_constant / (actuator.coil_resistance + s * actuator.coil_inductance)


@dataclass(frozen=True, eq=False)
class LoopResult:
    loop_gain: np.ndarray
    suppression: np.ndarray        # ground -> payload with the loop closed
    passive: np.ndarray            # ground -> payload with the loop open
    unity_gain_hz: tuple
    phase_margins_deg: tuple


def _wrap_deg(angle):
    return (angle + 180.0) % 360.0 - 180.0


def _crossings(grid, loop_gain):
    """Unity-gain frequencies and phase margins, log-interpolated."""
    mag = np.abs(loop_gain)
    if not np.any(mag > 1.0):
        return (), ()
    phase = np.degrees(np.unwrap(np.angle(loop_gain)))
    with np.errstate(divide="ignore"):
        logmag = np.log10(mag)
    f = grid.values
    crossings = []
    margins = []
    sign = np.sign(logmag)
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        t = -logmag[i] / (logmag[i + 1] - logmag[i])
        fc = f[i] * (f[i + 1] / f[i]) ** t
        pc = phase[i] + t * (phase[i + 1] - phase[i])
        crossings.append(float(fc))
        margins.append(float(180.0 - abs(_wrap_deg(pc))))
    return tuple(crossings), tuple(margins)


def closed_loop(platform, sensor, actuator, servo, grid, axis=HORIZONTAL):
    """Close the inertial loop.

    `sensor` and `actuator` are complex responses already evaluated on the
    grid (volts per payload velocity, newtons per volt); `servo` is a ZPK.
    """
    sensor = np.asarray(sensor)
    actuator = np.asarray(actuator)
    s = 1j * grid.angular
    loop = platform_force_tf(platform, axis, grid) * s * sensor * servo.evaluate(grid) * actuator
    one_plus = 1.0 + loop
    small = np.abs(one_plus) < 1e-9
    if np.any(small):
        raise NumericalError(
            "closed loop is ill-conditioned (|1+G| < 1e-9)",
            frequency_hz=grid.values[np.nonzero(small)[0][0]],
        )
    passive = platform_passive_tf(platform, axis, grid)
    unity, margins = _crossings(grid, loop)
    return LoopResult(
        loop_gain=loop,
        suppression=passive / one_plus,
        passive=passive,
        unity_gain_hz=unity,
        phase_margins_deg=margins,
    )


def loop_polynomials(platform, geophone_natural_freq, geophone_constant,
                     geophone_q, actuator, servo, axis=HORIZONTAL):
    """Loop gain as a rational function (num, den), highest power first."""
    m = platform.payload_mass
    w0 = 2.0 * np.pi * platform.resonance(axis)
    qp = platform.quality_factor
    wg = 2.0 * np.pi * geophone_natural_freq
    num = np.array([1.0, 0.0])                                  # velocity pickup s
    den = np.array([m, m * w0 / qp, m * w0 ** 2])               # force response
    num = np.polymul(num, [geophone_constant, 0.0, 0.0])
    den = np.polymul(den, [1.0, wg / geophone_q, wg ** 2])
    num = np.polymul(num, [actuator.force_constant])
    den = np.polymul(den, [actuator.coil_inductance, actuator.coil_resistance])
    sn, sd = servo.polynomials()
    return np.polymul(num, sn), np.polymul(den, sd)


def closed_loop_poles(num, den):
    """Roots of den + num (the closed-loop characteristic polynomial)."""
    n = max(len(num), len(den))
    char = np.zeros(n)
    char[n - len(num):] += num
    char[n - len(den):] += den
    return np.roots(char)


def design_check(platform, geophone_natural_freq, geophone_constant, geophone_q,
                 actuator, servo, grid, axis=HORIZONTAL, min_margin_deg=30.0):
    """Stability and margin report for a candidate loop.

    Returns a dict with closed-loop stability (from the characteristic
    polynomial), unity-gain frequencies and phase margins; `passed` is
    True when the loop is stable and every margin meets `min_margin_deg`.
    """
    sensor = geophone_tf(geophone_natural_freq, geophone_constant, grid, geophone_q)
    act = actuator_tf(actuator, grid)
    result = closed_loop(platform, sensor, act, servo, grid, axis=axis)
    num, den = loop_polynomials(
        platform, geophone_natural_freq, geophone_constant, geophone_q,
        actuator, servo, axis=axis,
    )
    poles = closed_loop_poles(num, den)
    stable = bool(np.all(np.real(poles) < 1e-9 * np.max(np.abs(poles))))
    margins_ok = all(pm >= min_margin_deg for pm in result.phase_margins_deg)
    return {
        "stable": stable,
        "unity_gain_hz": result.unity_gain_hz,
        "phase_margins_deg": result.phase_margins_deg,
        "passed": stable and margins_ok,
    }


def diagonalize_sensors(geometry, condition_limit=1e6):
    """Inverse of the 6-sensor placement response matrix.

    `geometry` is six (position, orientation) pairs of 3-vectors.  The
    response of sensor i to a unit motion of degree of freedom j (order
    X, Y, Z, RX, RY, RZ) is orientation . v where v = e_j for
    translations and e_j x position for rotations.  Applying the returned
    matrix to the sensor vector yields diagonalised per-DoF signals.
    """
    geometry = list(geometry)
    if len(geometry) != 6:
        raise ConfigError("need exactly six sensors")
    r = np.zeros((6, 6))
    for i, (pos, orient) in enumerate(geometry):
        pos = np.asarray(pos, dtype=float)
        orient = np.asarray(orient, dtype=float)
        norm = np.linalg.norm(orient)
        if norm == 0.0:
            raise ConfigError(f"sensor {i} has a zero orientation vector")
        orient = orient / norm
        for j in range(3):
            e = np.zeros(3)
            e[j] = 1.0
            r[i, j] = orient @ e
            r[i, 3 + j] = orient @ np.cross(e, pos)
    cond = np.linalg.cond(r)
    if not np.isfinite(cond) or cond > condition_limit:
        raise ConfigError(
            f"degenerate sensor geometry (condition number {cond:.3g})"
        )
    return np.linalg.inv(r)


def default_servo(gain=1.2675e10):
    """Shipped loop filter: integrator, zero at 7 Hz, poles at 150/400 Hz.

    The integrator keeps the loop phase near +90 deg through the band
    where the geophone response rotates towards +180 deg, which is what
    makes an inertial-sensor loop of this kind stable; the zero restores
    phase before the upper crossing and the far poles roll the gain off.
    """
    tp = 2.0 * np.pi
    return ZPK(
        zeros=(-tp * 7.0,),
        poles=(0.0, -tp * 150.0, -tp * 400.0),
        gain=gain,
    )
