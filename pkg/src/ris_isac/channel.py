"""Deterministic and random channel quantities.

Steering vectors for the BS uniform linear array and the RIS uniform planar
array, dB-to-linear path losses, and the Rician RIS-to-user channel.  Angles
are measured at each array from the global +x axis (atan2 convention); the
config layer accepts degrees, everything here is radians.

The RIS element index n runs 0..N-1 with horizontal index n_H = n mod N_H
and vertical index n_V = n // N_H.  The per-element offsets are centered
with an (N+1)/2 shift, which leaves a global phase on every steering
vector; all metrics are moduli, so that phase is irrelevant as long as
every vector uses the same convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import ScenarioConfig
from .errors import DegenerateGeometry

SPEED_OF_LIGHT = 299792458.0

Rng = np.random.Generator

KAPPA_CAP = 1e12  # stand-in for the pure-LOS limit


def child_rng(root_seed: int, *indices: int) -> Rng:
    """Derive an independent generator from a root seed and a counter path.

    Same (seed, indices) always yields a bit-identical stream, so Monte
    Carlo cells can run in any order or in parallel without changing
    results.
    """
    return np.random.default_rng(np.random.SeedSequence(root_seed, spawn_key=tuple(indices)))


@dataclass(frozen=True)
class ArrayGeometry:
    """Element counts and spacings; spacings default to half a wavelength."""

    carrier_hz: float
    bs_antennas: int
    ris_cols: int  # N_H
    ris_rows: int  # N_V
    d_bs: float = field(default=0.0)
    d_h: float = field(default=0.0)
    d_v: float = field(default=0.0)

    def __post_init__(self):
        half_wavelength = SPEED_OF_LIGHT / (2.0 * self.carrier_hz)
        for name in ("d_bs", "d_h", "d_v"):
            if getattr(self, name) == 0.0:
                object.__setattr__(self, name, half_wavelength)
            elif getattr(self, name) <= 0.0:
                raise DegenerateGeometry(f"{name}: spacing must be positive")

    @property
    def n_elements(self) -> int:
        return self.ris_cols * self.ris_rows

    @property
    def wavenumber(self) -> float:
        return 2.0 * np.pi * self.carrier_hz / SPEED_OF_LIGHT

    @classmethod
    def from_scenario(cls, scenario: ScenarioConfig) -> "ArrayGeometry":
        return cls(
            carrier_hz=scenario.carrier_hz,
            bs_antennas=scenario.bs_antennas,
            ris_cols=scenario.ris_cols,
            ris_rows=scenario.ris_rows,
        )


def angle_from_positions(origin, point) -> float:
    """atan2 angle of `point` as seen from `origin`, in (-pi, pi]."""
    dx = float(point[0]) - float(origin[0])
    dy = float(point[1]) - float(origin[1])
    if dx == 0.0 and dy == 0.0:
        raise DegenerateGeometry(f"coincident positions {tuple(origin)}")
    return float(np.arctan2(dy, dx))


def bs_steering(m_antennas: int, theta_tx: float, geom: ArrayGeometry) -> np.ndarray:
    """BS array response for a departure angle; entries are unit modulus."""
    if m_antennas < 1:
        raise DegenerateGeometry("bs_steering: need at least one antenna")
    m = np.arange(1, m_antennas + 1)
    phase = geom.wavenumber * (m - (m_antennas + 1) / 2.0) * geom.d_bs * np.cos(theta_tx)
    return np.exp(1j * phase)


def _ris_offsets(geom: ArrayGeometry) -> tuple[np.ndarray, np.ndarray]:
    n = np.arange(geom.n_elements)
    n_h = np.mod(n, geom.ris_cols)
    n_v = n // geom.ris_cols
    return (
        (n_v - (geom.ris_rows + 1) / 2.0) * geom.d_v,
        (n_h - (geom.ris_cols + 1) / 2.0) * geom.d_h,
    )


def ris_steering_tx(geom: ArrayGeometry, theta: float) -> np.ndarray:
    """RIS array response on the BS side (+cos horizontal term)."""
    off_v, off_h = _ris_offsets(geom)
    phase = -geom.wavenumber * (off_v * np.sin(theta) + off_h * np.cos(theta))
    return np.exp(1j * phase)


def ris_steering_rx(geom: ArrayGeometry, theta: float) -> np.ndarray:
    """RIS array response toward a target or the user (-cos horizontal term).

    The sign of the horizontal term differs from ris_steering_tx on
    purpose; the two link directions use opposite horizontal conventions
    and must not be unified.
    """
    off_v, off_h = _ris_offsets(geom)
    phase = -geom.wavenumber * (off_v * np.sin(theta) - off_h * np.cos(theta))
    return np.exp(1j * phase)


def path_loss_linear(l0_db: float, exponent_coeff: float, distance_m: float) -> float:
    """Convert the dB loss model L0 + coeff*log10(d) into a linear power gain."""
    if distance_m <= 0:
        raise DegenerateGeometry(f"path_loss_linear: nonpositive distance {distance_m}")
    loss_db = l0_db + exponent_coeff * np.log10(distance_m)
    return float(10.0 ** (-loss_db / 10.0))


def rician_user_channel(
    a_ue: np.ndarray, kappa: float, beta_ue: float, rng: Rng
) -> np.ndarray:
    """Rician RIS-to-user channel: sqrt(beta)*LOS steering plus i.i.d. NLOS.

    The NLOS part is circularly-symmetric complex Gaussian with per-entry
    variance beta_ue.  kappa is capped rather than special-cased so sweeps
    stay continuous; kappa=0 is pure NLOS.
    """
    kappa = min(float(kappa), KAPPA_CAP)
    n = len(a_ue)
    los = np.sqrt(beta_ue) * np.asarray(a_ue, dtype=complex)
    nlos = np.sqrt(beta_ue / 2.0) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    return np.sqrt(kappa / (1.0 + kappa)) * los + np.sqrt(1.0 / (1.0 + kappa)) * nlos


@dataclass(frozen=True)
class ChannelSet:
    """All channel quantities for one scenario realization."""

    beta_g: float
    beta_ue: float
    g_bs: np.ndarray  # BS-side steering, length M
    g_ris: np.ndarray  # RIS-side steering of the BS-RIS link, length N
    h_ue: np.ndarray  # Rician RIS-user channel, length N
    a_targets: tuple[np.ndarray, ...]  # per-target RIS steering, each length N
    theta_tx: float
    theta_ue: float
    theta_targets: tuple[float, ...]
    geometry: ArrayGeometry


def target_angle(scenario: ScenarioConfig, index: int) -> float:
    """Angle of one configured target as seen from the RIS, in radians."""
    t = scenario.targets[index]
    if t.angle_deg is not None:
        return float(np.deg2rad(t.angle_deg))
    return angle_from_positions(scenario.ris_pos, t.position)


def build_channels(scenario: ScenarioConfig, rng: Rng) -> ChannelSet:
    """Instantiate every channel quantity for one fading realization."""
    geom = ArrayGeometry.from_scenario(scenario)

    d_bs_ris = float(np.hypot(
        scenario.ris_pos[0] - scenario.bs_pos[0],
        scenario.ris_pos[1] - scenario.bs_pos[1],
    ))
    d_ris_ue = float(np.hypot(
        scenario.ue_pos[0] - scenario.ris_pos[0],
        scenario.ue_pos[1] - scenario.ris_pos[1],
    ))
    beta_g = path_loss_linear(scenario.reference_loss_db, scenario.bs_ris_exponent, d_bs_ris)
    beta_ue = path_loss_linear(scenario.reference_loss_db, scenario.ris_ue_exponent, d_ris_ue)

    theta_tx = angle_from_positions(scenario.bs_pos, scenario.ris_pos)
    theta_ue = angle_from_positions(scenario.ris_pos, scenario.ue_pos)
    theta_targets = tuple(target_angle(scenario, k) for k in range(len(scenario.targets)))

    g_bs = bs_steering(scenario.bs_antennas, theta_tx, geom)
    g_ris = ris_steering_tx(geom, theta_tx)
    a_ue = ris_steering_rx(geom, theta_ue)
    h_ue = rician_user_channel(a_ue, scenario.rician_kappa, beta_ue, rng)
    a_targets = tuple(ris_steering_rx(geom, th) for th in theta_targets)

    return ChannelSet(
        beta_g=beta_g,
        beta_ue=beta_ue,
        g_bs=g_bs,
        g_ris=g_ris,
        h_ue=h_ue,
        a_targets=a_targets,
        theta_tx=theta_tx,
        theta_ue=theta_ue,
        theta_targets=theta_targets,
        geometry=geom,
    )
