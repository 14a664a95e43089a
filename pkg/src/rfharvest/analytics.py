"""Closed-form zone, transmission, outage, and throughput expressions.

Every function here is a pure formula evaluation on validated parameters;
the Monte Carlo counterparts live in :mod:`rfharvest.sim`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .params import ChargingGeometry, NetworkParams, charging_geometry

__all__ = [
    "ZoneProbabilities",
    "TransmissionProbability",
    "OutageResult",
    "phi",
    "p_guard",
    "p_harvest",
    "zone_probabilities",
    "pt_single_slot",
    "pt_double_slot",
    "pt_multi_bounds",
    "transmission_probability",
    "wit_transmission_probability",
    "tau_primary",
    "tau_secondary",
    "tau_wit",
    "outage_primary",
    "outage_secondary",
    "wit_outage",
    "spatial_throughput",
]


def phi(alpha: float) -> float:
    """Interference constant of the Rayleigh-fading shot-noise field.

        phi(alpha) = pi * (2/alpha) * Gamma(2/alpha) * Gamma(1 - 2/alpha)

    Finite only for alpha > 2; phi(4) = pi^2 / 2.  Decreases monotonically
    toward pi as alpha grows.
    """
    if alpha <= 2:
        raise ValueError("alpha must exceed 2 (Gamma(1 - 2/alpha) pole at alpha = 2)")
    return math.pi * (2.0 / alpha) * math.gamma(2.0 / alpha) * math.gamma(1.0 - 2.0 / alpha)


def p_guard(lambda_p_active: float, r_g: float) -> float:
    """Probability that a uniformly placed point is outside every guard zone.

    Void probability of a disk of radius r_g under a Poisson field of
    active primary transmitters: exp(-pi r_g^2 lambda_p).
    """
    return math.exp(-math.pi * r_g * r_g * lambda_p_active)


def p_harvest(lambda_p_active: float, r_h: float) -> float:
    """Probability that at least one active charger lies within r_h."""
    return -math.expm1(-math.pi * r_h * r_h * lambda_p_active)


@dataclass(frozen=True)
class ZoneProbabilities:
    """Per-slot zone-membership probabilities of a typical transmitter.

    p_g        outside all guard zones
    p_h        inside at least one harvesting zone
    p_1        inside the full-charge core (nearest charger within h1)
    p_2        two-slot annulus probability, p_1 + p_2 = p_h (m_slots = 2)
    p2_prime   half-charge annulus h1..h2 (m_slots > 2)
    p_3        outer annulus h2..r_h (m_slots > 2)

    Fields for regions a given charging geometry does not use are exact zero.
    """

    p_g: float
    p_h: float
    p_1: float = 0.0
    p_2: float = 0.0
    p2_prime: float = 0.0
    p_3: float = 0.0


def zone_probabilities(params: NetworkParams,
                       geometry: ChargingGeometry | None = None) -> ZoneProbabilities:
    """Void-probability split of the harvesting zone for the given geometry."""
    if geometry is None:
        geometry = charging_geometry(params)
    lam = params.lambda_p
    pg = p_guard(lam, params.r_g)
    ph = p_harvest(lam, params.r_h)
    m = geometry.m_slots
    if m == 1:
        return ZoneProbabilities(p_g=pg, p_h=ph)
    e_h1 = math.exp(-math.pi * geometry.h1 ** 2 * lam)
    e_rh = math.exp(-math.pi * params.r_h ** 2 * lam)
    p1 = -math.expm1(-math.pi * geometry.h1 ** 2 * lam)
    if m == 2:
        return ZoneProbabilities(p_g=pg, p_h=ph, p_1=p1, p_2=e_h1 - e_rh)
    e_h2 = math.exp(-math.pi * geometry.h2 ** 2 * lam)
    return ZoneProbabilities(p_g=pg, p_h=ph, p_1=p1,
                             p2_prime=e_h1 - e_h2, p_3=e_h2 - e_rh)


# -- closed-form transmission probabilities ---------------------------------

def pt_single_slot(p_h: float, p_g: float) -> float:
    """Stationary transmit probability when one slot always fills the battery."""
    if p_h <= 0.0:
        return 0.0
    return p_h * p_g / (p_h + p_g)


def pt_double_slot(p_h: float, p_2: float, p_g: float) -> float:
    """Stationary transmit probability for two-slot charging."""
    if p_h <= 0.0:
        return 0.0
    return p_h * p_g / (p_h + p_g * (1.0 + p_2 / p_h))


def pt_multi_bounds(p_1: float, p2_prime: float, p_3: float,
                    p_g: float) -> tuple[float, float]:
    """(lower, upper) bounds on the transmit probability for m_slots > 2.

    The upper bound credits the outer annulus with a half charge, the lower
    bound with none; both reduce to the exact expressions when the outer
    regions are empty.
    """
    p_h = p_1 + p2_prime + p_3
    if p_h <= 0.0:
        return 0.0, 0.0
    upper = p_h * p_g / (p_h + p_g * (1.0 + (p2_prime + p_3) / p_h))
    q = p_1 + p2_prime
    lower = q * p_g / (q + p_g * (1.0 + p2_prime / q)) if q > 0.0 else 0.0
    return lower, upper


@dataclass(frozen=True)
class TransmissionProbability:
    """Exact value or interval for the stationary transmit probability.

    ``value`` is set only when the chain is exact (m_slots <= 2); otherwise
    consumers must choose an endpoint of [lower, upper] explicitly.
    """

    m_slots: int
    lower: float
    upper: float
    value: float | None = None

    @property
    def exact(self) -> bool:
        return self.value is not None


def _pt_from_zones(m: int, z: ZoneProbabilities, p_g: float) -> TransmissionProbability:
    if m == 1:
        v = pt_single_slot(z.p_h, p_g)
        return TransmissionProbability(m_slots=m, lower=v, upper=v, value=v)
    if m == 2:
        v = pt_double_slot(z.p_h, z.p_2, p_g)
        return TransmissionProbability(m_slots=m, lower=v, upper=v, value=v)
    lo, hi = pt_multi_bounds(z.p_1, z.p2_prime, z.p_3, p_g)
    return TransmissionProbability(m_slots=m, lower=lo, upper=hi)


def transmission_probability(params: NetworkParams) -> TransmissionProbability:
    """Stationary probability that a typical secondary transmitter transmits.

    Exact for single- and double-slot charging; an interval otherwise.
    """
    geom = charging_geometry(params)
    z = zone_probabilities(params, geom)
    return _pt_from_zones(geom.m_slots, z, z.p_g)


def wit_transmission_probability(params: NetworkParams) -> TransmissionProbability:
    """Transmit probability in the dedicated-charger setup (no guard zones).

    Evaluates the same chains with the guard-exit probability forced to 1;
    the r_g field of ``params`` is ignored.
    """
    geom = charging_geometry(params)
    z = zone_probabilities(params, geom)
    return _pt_from_zones(geom.m_slots, z, 1.0)


# -- outage ------------------------------------------------------------------

@dataclass(frozen=True)
class OutageResult:
    """An outage probability together with its exponent argument tau.

    ``clamped`` marks results of the conditional secondary form that were
    clipped into [0, 1]; the underlying approximation degrades when the
    power separation between the networks is weak.
    """

    tau: float
    probability: float
    clamped: bool = False


def tau_primary(params: NetworkParams, active_density: float) -> float:
    """Exponent of the primary-receiver outage probability.

    ``active_density`` is the density of simultaneously transmitting
    secondaries (p_t * lambda_s).
    """
    p = params
    interference = (p.lambda_p
                    + active_density * (p.power_s / p.power_p) ** (2.0 / p.alpha))
    tau = interference * p.theta_p ** (2.0 / p.alpha) * p.d_p ** 2 * phi(p.alpha)
    return tau + p.theta_p * p.d_p ** p.alpha * p.noise / p.power_p


def outage_primary(params: NetworkParams, active_density: float) -> OutageResult:
    tau = tau_primary(params, active_density)
    return OutageResult(tau=tau, probability=-math.expm1(-tau))


def tau_secondary(params: NetworkParams, active_density: float) -> float:
    """Exponent of the unconditioned secondary-receiver outage probability."""
    p = params
    interference = (p.lambda_p * (p.power_s / p.power_p) ** (-2.0 / p.alpha)
                    + active_density)
    tau = interference * p.theta_s ** (2.0 / p.alpha) * p.d_s ** 2 * phi(p.alpha)
    return tau + p.theta_s * p.d_s ** p.alpha * p.noise / p.power_s


def outage_secondary(params: NetworkParams, active_density: float) -> OutageResult:
    """Secondary outage conditioned on the transmitter being outside guard zones.

    probability = (1 - exp(-tau_s) - (1 - p_g)) / p_g, clamped into [0, 1]
    with ``clamped`` set when clipping occurred.  The conditional
    construction treats any guard-zone violation as a certain outage, which
    is accurate only when power_p >> power_s.
    """
    p = params
    pg = p_guard(p.lambda_p, p.r_g)
    if pg <= 0.0:
        raise ValueError("guard zones cover the plane (p_g = 0)")
    tau = tau_secondary(params, active_density)
    raw = (-math.expm1(-tau) - (1.0 - pg)) / pg
    prob = min(max(raw, 0.0), 1.0)
    return OutageResult(tau=tau, probability=prob, clamped=prob != raw)


def tau_wit(params: NetworkParams, active_density: float) -> float:
    """Outage exponent when chargers occupy a dedicated band (no cross-talk)."""
    p = params
    tau = active_density * p.theta_s ** (2.0 / p.alpha) * p.d_s ** 2 * phi(p.alpha)
    return tau + p.theta_s * p.d_s ** p.alpha * p.noise / p.power_s


def wit_outage(params: NetworkParams, active_density: float) -> OutageResult:
    tau = tau_wit(params, active_density)
    return OutageResult(tau=tau, probability=-math.expm1(-tau))


def spatial_throughput(p_t: float, lambda_s: float, theta_s: float) -> float:
    """Area throughput (bps/Hz/unit-area) of the transmitting population."""
    return p_t * lambda_s * math.log2(1.0 + theta_s)
