"""Slotted Monte Carlo simulation of the coexisting networks.

The simulator advances battery states of secondary transmitters over time
slots against a Poisson field of primary transmitters, and estimates
transmit probabilities, interference distributions, and outage
probabilities directly from the dynamics.  It is the independent oracle for
every closed form in :mod:`rfharvest.analytics`.

All distances use the torus (wrap-around) metric, which removes window-edge
bias from interference sums without oversized windows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytics import p_guard, transmission_probability
from .params import NetworkParams, charging_geometry

__all__ = [
    "PointPattern",
    "SimConfig",
    "SimEstimate",
    "ConditioningTooRareError",
    "sample_hppp",
    "SlotSimulator",
    "step_slot",
    "estimate_p_t",
    "interference_samples",
    "estimate_outage",
    "outage_curve",
]

ROLE_PT = "PT"
ROLE_ST = "ST"


class ConditioningTooRareError(RuntimeError):
    """The rejection-sampling acceptance rate is below the usable floor."""


@dataclass
class PointPattern:
    """A marked point set inside a square window of side L centered at 0.

    Marks: ``role`` is PT or ST per point; ``battery`` holds the stored
    energy of STs (0 for PTs); ``active`` flags transmitting points for the
    most recent slot.
    """

    window_side: float
    points: np.ndarray
    role: np.ndarray
    battery: np.ndarray
    active: np.ndarray

    def check(self, power_s: float | None = None) -> None:
        half = self.window_side / 2.0
        assert np.all(np.abs(self.points) <= half + 1e-9), "points left the window"
        if power_s is not None:
            assert np.all(self.battery <= power_s + 1e-12), "battery above capacity"


@dataclass(frozen=True)
class SimEstimate:
    """A Monte Carlo estimate with a 99.7% (3-sigma) confidence half-width."""

    mean: float
    half_width: float
    n_samples: int


@dataclass(frozen=True)
class SimConfig:
    """Simulation controls.

    window_side   None picks max(20 * r_g, 100); must be >= 4 * r_g
    n_slots       measured slots per replication (after warm-up)
    warmup        discarded leading slots; None picks max(10 * m_slots, 100)
    pt_mode       'redraw' resamples the active primary pattern each slot
                  (matches the per-slot independence the chain analysis
                  assumes); 'thinning' keeps a fixed deployment and thins it
                  by access_prob each slot (a physically fixed layout whose
                  long-run behavior is *not* the analytic one when
                  access_prob is near 1)
    harvest_rule  'nearest-PT' credits only the nearest active charger
                  (matches the analysis); 'sum-in-zone' adds every charger
                  within r_h, measuring how conservative the former is
    """

    window_side: float | None = None
    n_slots: int = 200
    n_replications: int = 10
    master_seed: int = 0
    boundary: str = "torus"
    harvest_rule: str = "nearest-PT"
    pt_mode: str = "redraw"
    warmup: int | None = None

    def __post_init__(self):
        if self.n_slots < 1:
            raise ValueError("n_slots must be at least 1")
        if self.n_replications < 1:
            raise ValueError("n_replications must be at least 1")
        if self.boundary != "torus":
            raise ValueError("only the torus boundary is implemented")
        if self.harvest_rule not in ("nearest-PT", "sum-in-zone"):
            raise ValueError(f"unknown harvest_rule {self.harvest_rule!r}")
        if self.pt_mode not in ("redraw", "thinning"):
            raise ValueError(f"unknown pt_mode {self.pt_mode!r}")

    def resolved_window(self, params: NetworkParams) -> float:
        side = self.window_side
        if side is None:
            side = max(20.0 * params.r_g, 100.0)
        if side < 4.0 * params.r_g:
            raise ValueError(
                f"window side {side} is below 4*r_g = {4 * params.r_g}; interference "
                "truncation would bias estimates")
        return side

    def resolved_warmup(self, m_slots: int) -> int:
        if self.warmup is not None:
            return self.warmup
        return max(10 * m_slots, 100)


def sample_hppp(density: float, window_side: float, rng: np.random.Generator,
                role: str = ROLE_ST) -> PointPattern:
    """Draw one homogeneous Poisson pattern in the centered square window."""
    if density < 0:
        raise ValueError("density must be non-negative")
    n = rng.poisson(density * window_side * window_side)
    pts = rng.uniform(-window_side / 2.0, window_side / 2.0, size=(n, 2))
    return PointPattern(window_side=window_side, points=pts,
                        role=np.full(n, role, dtype="<U2"),
                        battery=np.zeros(n), active=np.zeros(n, dtype=bool))


def _torus_d2(a: np.ndarray, b: np.ndarray, side: float) -> np.ndarray:
    """Pairwise squared min-image distances, shape (len(a), len(b))."""
    dx = np.abs(a[:, 0, None] - b[None, :, 0])
    np.minimum(dx, side - dx, out=dx)
    dx *= dx
    dy = np.abs(a[:, 1, None] - b[None, :, 1])
    np.minimum(dy, side - dy, out=dy)
    dy *= dy
    dx += dy
    return dx


def _origin_r(xy: np.ndarray) -> np.ndarray:
    # Window is centered at the origin, so the min-image distance to the
    # origin is the plain norm.
    return np.hypot(xy[:, 0], xy[:, 1])


class SlotSimulator:
    """Advances the network state slot by slot.

    Per slot: the active primary pattern refreshes; each full secondary
    outside every guard zone transmits and empties its battery; each
    non-full secondary inside a harvesting zone gains the path-loss-scaled
    charger power, capped at capacity.  Harvested power is a per-slot
    average, so no fading enters the battery dynamics.

    An optional ``dedicated_pt`` is an always-active extra charger, used to
    realize a conditioned transmitter near a probe receiver.
    """

    def __init__(self, params: NetworkParams, config: SimConfig,
                 rng: np.random.Generator, *, pt_xy: np.ndarray | None = None,
                 st_xy: np.ndarray | None = None, battery: np.ndarray | None = None,
                 dedicated_pt: np.ndarray | None = None,
                 window_side: float | None = None):
        self.params = params
        self.config = config
        self.rng = rng
        self.window = window_side if window_side is not None else config.resolved_window(params)
        half = self.window / 2.0
        if pt_xy is None:
            density = params.lambda_p if config.pt_mode == "redraw" else params.lambda_p_total
            n_pt = rng.poisson(density * self.window ** 2)
            pt_xy = rng.uniform(-half, half, size=(n_pt, 2))
        if st_xy is None:
            n_st = rng.poisson(params.lambda_s * self.window ** 2)
            st_xy = rng.uniform(-half, half, size=(n_st, 2))
        self.pt_xy = np.asarray(pt_xy, dtype=float)
        self.st_xy = np.asarray(st_xy, dtype=float)
        self.battery = (np.zeros(len(self.st_xy)) if battery is None
                        else np.asarray(battery, dtype=float).copy())
        self.dedicated_pt = None if dedicated_pt is None else np.asarray(dedicated_pt, float)
        self.pt_active = np.ones(len(self.pt_xy), dtype=bool)
        self.st_transmit = np.zeros(len(self.st_xy), dtype=bool)
        self.st_harvest = np.zeros(len(self.st_xy), dtype=bool)
        self._full_level = params.power_s * (1.0 - 1e-12)
        self._rg2 = params.r_g ** 2
        self._rh2 = params.r_h ** 2
        self.slot_index = 0

    # -- per-slot state views ------------------------------------------------

    @property
    def n_st(self) -> int:
        return len(self.st_xy)

    def active_pt_xy(self) -> np.ndarray:
        """Active network chargers this slot (dedicated point excluded)."""
        return self.pt_xy[self.pt_active]

    def transmitting_st_xy(self) -> np.ndarray:
        return self.st_xy[self.st_transmit]

    @property
    def n_transmitting(self) -> int:
        return int(self.st_transmit.sum())

    @property
    def n_harvesting(self) -> int:
        return int(self.st_harvest.sum())

    @property
    def n_idle(self) -> int:
        return self.n_st - self.n_transmitting - self.n_harvesting

    # -- dynamics --------------------------------------------------------------

    def step(self) -> None:
        p, rng = self.params, self.rng
        half = self.window / 2.0
        if self.config.pt_mode == "redraw":
            n_pt = rng.poisson(p.lambda_p * self.window ** 2)
            self.pt_xy = rng.uniform(-half, half, size=(n_pt, 2))
            self.pt_active = np.ones(n_pt, dtype=bool)
        else:
            self.pt_active = rng.random(len(self.pt_xy)) < p.access_prob

        sources = self.pt_xy[self.pt_active]
        if self.dedicated_pt is not None:
            sources = np.vstack([sources, self.dedicated_pt[None, :]])

        if len(sources) and self.n_st:
            d2 = _torus_d2(self.st_xy, sources, self.window)
            nearest2 = d2.min(axis=1)
        else:
            d2 = None
            nearest2 = np.full(self.n_st, np.inf)

        full = self.battery >= self._full_level
        in_guard = nearest2 <= self._rg2 if p.r_g > 0 else np.zeros(self.n_st, dtype=bool)
        in_harv = nearest2 <= self._rh2
        transmit = full & ~in_guard
        harvest = ~full & in_harv

        if harvest.any():
            if self.config.harvest_rule == "nearest-PT":
                gain = p.eta * p.power_p * nearest2[harvest] ** (-p.alpha / 2.0)
            else:
                sub = d2[harvest]
                inside = sub <= self._rh2
                sub = np.maximum(sub, 1e-300)
                gain = p.eta * p.power_p * np.where(inside, sub ** (-p.alpha / 2.0), 0.0).sum(axis=1)
            self.battery[harvest] = np.minimum(self.battery[harvest] + gain, p.power_s)
        self.battery[transmit] = 0.0
        self.st_transmit = transmit
        self.st_harvest = harvest
        self.slot_index += 1


def step_slot(pattern: PointPattern, params: NetworkParams, config: SimConfig,
              rng: np.random.Generator) -> PointPattern:
    """Advance a combined PT/ST pattern by one slot and return the new state.

    Thin convenience wrapper over :class:`SlotSimulator` for callers that
    hold state as a single marked pattern.
    """
    is_pt = pattern.role == ROLE_PT
    sim = SlotSimulator(params, config, rng,
                        pt_xy=pattern.points[is_pt],
                        st_xy=pattern.points[~is_pt],
                        battery=pattern.battery[~is_pt],
                        window_side=pattern.window_side)
    sim.step()
    n_pt, n_st = len(sim.pt_xy), sim.n_st
    points = np.vstack([sim.pt_xy, sim.st_xy])
    role = np.concatenate([np.full(n_pt, ROLE_PT, dtype="<U2"),
                           np.full(n_st, ROLE_ST, dtype="<U2")])
    battery = np.concatenate([np.zeros(n_pt), sim.battery])
    active = np.concatenate([sim.pt_active, sim.st_transmit])
    return PointPattern(window_side=pattern.window_side, points=points,
                        role=role, battery=battery, active=active)


# -- estimators ----------------------------------------------------------------


def _rep_rngs(config: SimConfig) -> list[np.random.Generator]:
    seeds = np.random.SeedSequence(config.master_seed).spawn(config.n_replications)
    return [np.random.default_rng(s) for s in seeds]


def _combine(rep_means, rep_counts) -> SimEstimate:
    # Sorting first makes the merge independent of replication scheduling
    # order down to the last bit.
    rep_means = np.sort(np.asarray(rep_means, dtype=float))
    n = int(np.sum(np.sort(np.asarray(rep_counts))))
    mean = float(rep_means.mean())
    if len(rep_means) > 1:
        hw = 3.0 * float(rep_means.std(ddof=1)) / math.sqrt(len(rep_means))
    else:
        # Single replication: fall back to the iid binomial width, which
        # understates the error when samples are correlated within a run.
        hw = 3.0 * math.sqrt(max(mean * (1.0 - mean), 0.0) / max(n, 1))
    return SimEstimate(mean=mean, half_width=hw, n_samples=n)


def estimate_p_t(params: NetworkParams, config: SimConfig) -> SimEstimate:
    """Long-run fraction of (transmitter, slot) pairs in transmitting mode."""
    m = charging_geometry(params).m_slots
    warmup = config.resolved_warmup(m)
    rep_means, rep_counts = [], []
    for rng in _rep_rngs(config):
        sim = SlotSimulator(params, config, rng)
        if sim.n_st == 0:
            raise ValueError("window contains no secondary transmitters; "
                             "increase lambda_s or the window side")
        for _ in range(warmup):
            sim.step()
        hits = 0
        for _ in range(config.n_slots):
            sim.step()
            hits += sim.n_transmitting
        rep_means.append(hits / (sim.n_st * config.n_slots))
        rep_counts.append(sim.n_st * config.n_slots)
    return _combine(rep_means, rep_counts)


def _shot_noise(xy: np.ndarray, power: float, alpha: float,
                rng: np.random.Generator) -> float:
    """Aggregate received power at the origin with fresh unit-mean fading."""
    if len(xy) == 0:
        return 0.0
    r = _origin_r(xy)
    g = rng.exponential(size=len(xy))
    return float(np.sum(g * power * r ** -alpha))


def interference_samples(params: NetworkParams, config: SimConfig, mode: str,
                         active_density: float | None = None) -> np.ndarray:
    """Per-slot aggregate secondary interference at the origin.

    mode 'exact-dynamics' measures the transmitting set produced by the
    slotted dynamics; 'hppp-approx' draws a fresh Poisson pattern of the
    same average density each slot.  Fading is redrawn every slot in both
    modes.  When ``active_density`` is not given, the approx mode uses the
    analytic transmit probability (interval midpoint if not exact).
    """
    mode_map = {"exact": "exact", "exact-dynamics": "exact",
                "approx": "approx", "hppp-approx": "approx"}
    if mode not in mode_map:
        raise ValueError(f"unknown interference mode {mode!r}")
    mode = mode_map[mode]
    window = config.resolved_window(params)
    samples = []
    if mode == "approx":
        if active_density is None:
            tp = transmission_probability(params)
            pt = tp.value if tp.exact else 0.5 * (tp.lower + tp.upper)
            active_density = pt * params.lambda_s
        half = window / 2.0
        for rng in _rep_rngs(config):
            for _ in range(config.n_slots):
                n = rng.poisson(active_density * window ** 2)
                xy = rng.uniform(-half, half, size=(n, 2))
                samples.append(_shot_noise(xy, params.power_s, params.alpha, rng))
        return np.asarray(samples)

    m = charging_geometry(params).m_slots
    warmup = config.resolved_warmup(m)
    for rng in _rep_rngs(config):
        sim = SlotSimulator(params, config, rng)
        for _ in range(warmup):
            sim.step()
        for _ in range(config.n_slots):
            sim.step()
            samples.append(_shot_noise(sim.transmitting_st_xy(),
                                       params.power_s, params.alpha, rng))
    return np.asarray(samples)


def _sinr_samples(params: NetworkParams, config: SimConfig, side: str,
                  conditioning: str, rng: np.random.Generator,
                  warmup: int) -> np.ndarray:
    """SINR samples at a probe receiver at the origin for one replication."""
    p = params
    if side == "primary":
        link_from = np.array([p.d_p, 0.0])
        sim = SlotSimulator(p, config, rng, dedicated_pt=link_from)
        signal_power, link_dist = p.power_p, p.d_p
    else:
        link_from = np.array([p.d_s, 0.0])
        sim = SlotSimulator(p, config, rng)
        signal_power, link_dist = p.power_s, p.d_s

    for _ in range(warmup):
        sim.step()

    out = []
    rg2 = p.r_g ** 2
    for _ in range(config.n_slots):
        sim.step()
        act = sim.active_pt_xy()
        if side == "secondary" and conditioning == "rejection" and p.r_g > 0 and len(act):
            d2 = _torus_d2(act, link_from[None, :], sim.window)
            if d2.min() <= rg2:
                continue
        i_p = 0.0 if side == "wit" else _shot_noise(act, p.power_p, p.alpha, rng)
        i_s = _shot_noise(sim.transmitting_st_xy(), p.power_s, p.alpha, rng)
        g = rng.exponential()
        denom = i_p + i_s + p.noise
        signal = g * signal_power * link_dist ** -p.alpha
        out.append(signal / denom if denom > 0 else np.inf)
    return np.asarray(out)


def outage_curve(params: NetworkParams, config: SimConfig, side: str,
                 thetas, *, conditioning: str | None = None) -> list[SimEstimate]:
    """Simulated outage probabilities at several SINR thresholds.

    One dynamics run per replication supplies the SINR samples for every
    threshold.  ``side`` selects the probe link: 'primary' (extra always-on
    charger at distance d_p), 'secondary' (transmitter at distance d_s,
    slots rejected while any active charger is within r_g of it), or 'wit'
    (chargers on a dedicated band contribute no interference).
    ``conditioning`` may be set to 'none' for an unconditioned secondary
    estimate.
    """
    if side not in ("primary", "secondary", "wit"):
        raise ValueError(f"unknown side {side!r}")
    if conditioning is None:
        conditioning = "rejection" if side == "secondary" else "none"
    if conditioning not in ("rejection", "none"):
        raise ValueError(f"unknown conditioning {conditioning!r}")
    if conditioning == "rejection" and side != "secondary":
        raise ValueError("rejection conditioning applies to the secondary side only")

    if side == "secondary" and conditioning == "rejection":
        pg = p_guard(params.lambda_p, params.r_g)
        if pg < 1e-4:
            raise ConditioningTooRareError(
                f"conditioning event too rare: expected acceptance rate {pg:.3e}")

    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    m = charging_geometry(params).m_slots
    warmup = config.resolved_warmup(m)
    per_theta_means = [[] for _ in thetas]
    per_theta_counts = [[] for _ in thetas]
    total_slots = total_kept = 0
    for rng in _rep_rngs(config):
        sinr = _sinr_samples(params, config, side, conditioning, rng, warmup)
        total_slots += config.n_slots
        total_kept += len(sinr)
        if len(sinr) == 0:
            continue
        for i, th in enumerate(thetas):
            per_theta_means[i].append(float(np.mean(sinr < th)))
            per_theta_counts[i].append(len(sinr))
    if total_kept == 0 or total_kept / total_slots < 1e-4:
        raise ConditioningTooRareError(
            f"conditioning event too rare: kept {total_kept} of {total_slots} slots")
    return [_combine(per_theta_means[i], per_theta_counts[i]) for i in range(len(thetas))]


def estimate_outage(params: NetworkParams, config: SimConfig, side: str,
                    *, conditioning: str | None = None) -> SimEstimate:
    """Simulated outage probability at the SINR target from ``params``."""
    theta = params.theta_p if side == "primary" else params.theta_s
    return outage_curve(params, config, side, [theta], conditioning=conditioning)[0]
