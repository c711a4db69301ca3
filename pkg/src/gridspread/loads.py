"""Hourly household demand, EV charging, and the discount-driven peak shift.

A load profile is a plain array of 24 kW values, hour 0 = midnight.  The
baseline household curve is a fixed double-peak template scaled by occupancy
and a per-household jitter factor; EVs add a constant-power charging block.
Followers of the fake discount move consumption into the evening peak
window: their EV block relocates there outright and a configurable fraction
of ordinary household load shifts there too.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .seeding import rng_for

HOURS = 24

# fraction of daily energy per hour; sums to 1, evening peak at hour 19
# with a smaller morning shoulder at hour 8
BASE_SHAPE = np.array([
    0.022, 0.018, 0.016, 0.016, 0.018, 0.022,
    0.030, 0.048, 0.052, 0.042, 0.036, 0.036,
    0.038, 0.036, 0.034, 0.036, 0.044, 0.060,
    0.075, 0.085, 0.080, 0.070, 0.050, 0.036,
])

DEFAULT_OCCUPANCY_HIST = {1: 0.30, 2: 0.35, 3: 0.16, 4: 0.13, 5: 0.06}


def validate_occupancy_hist(hist: dict[int, float]) -> None:
    if not hist:
        raise ValueError("occupancy histogram is empty")
    for occ, p in hist.items():
        if not isinstance(occ, (int, np.integer)) or occ < 1:
            raise ValueError(f"occupancy values must be integers >= 1, got {occ!r}")
        if p < 0:
            raise ValueError(f"negative probability for occupancy {occ}")
    if abs(sum(hist.values()) - 1.0) > 1e-9:
        raise ValueError("occupancy histogram must sum to 1")


@dataclass(frozen=True)
class LoadParams:
    daily_kwh_occ1: float = 8.0        # household energy at occupancy 1
    extra_person_factor: float = 0.3   # relative increase per extra person
    jitter: float = 0.15               # household scale ~ U(1-j, 1+j)
    charger_kw: float = 7.0
    ev_charge_hours: int = 2
    offpeak_starts: tuple[int, ...] = (1, 2, 3)  # block start within 01:00-05:00
    peak_hours: tuple[int, ...] = (20, 21)
    deferrable_fraction: float = 0.3   # household share a follower shifts

    def __post_init__(self):
        if self.daily_kwh_occ1 <= 0 or self.charger_kw <= 0:
            raise ValueError("energy and charger power must be positive")
        if not 0.0 <= self.jitter < 1.0:
            raise ValueError(f"jitter must be in [0, 1), got {self.jitter}")
        if self.extra_person_factor < 0:
            raise ValueError("extra_person_factor must be >= 0")
        if self.ev_charge_hours < 1:
            raise ValueError("ev_charge_hours must be >= 1")
        if not self.offpeak_starts:
            raise ValueError("offpeak_starts must be non-empty")
        for s in self.offpeak_starts:
            if not (0 <= s and s + self.ev_charge_hours <= HOURS):
                raise ValueError(f"off-peak block starting at {s} leaves the day")
        if not self.peak_hours or any(not 0 <= h < HOURS for h in self.peak_hours):
            raise ValueError(f"bad peak_hours {self.peak_hours}")
        if not 0.0 <= self.deferrable_fraction <= 1.0:
            raise ValueError("deferrable_fraction must be in [0, 1]")

    @property
    def ev_daily_kwh(self) -> float:
        return self.charger_kw * self.ev_charge_hours

    @property
    def follower_ev_kw(self) -> float:
        # same energy squeezed into the discount window
        return self.ev_daily_kwh / len(self.peak_hours)

    def occupancy_scale(self, occupancy) -> np.ndarray:
        return 1.0 + self.extra_person_factor * (np.asarray(occupancy) - 1)


def base_profile(occupancy: int, seed: int, params: LoadParams = LoadParams()) -> np.ndarray:
    """Household curve for one home: template x daily energy x occupancy
    scale x one jittered factor drawn from the seed."""
    if occupancy < 1:
        raise ValueError(f"occupancy must be >= 1, got {occupancy}")
    rng = rng_for(seed, "household")
    factor = rng.uniform(1.0 - params.jitter, 1.0 + params.jitter)
    return BASE_SHAPE * (params.daily_kwh_occ1 *
                         float(params.occupancy_scale(occupancy)) * factor)


def ev_charging_profile(follows_through: bool, seed: int,
                        params: LoadParams = LoadParams()) -> np.ndarray:
    """Charging block for one EV: off-peak for regular owners, inside the
    discount window for followers; daily energy identical either way."""
    out = np.zeros(HOURS)
    if follows_through:
        out[list(params.peak_hours)] = params.follower_ev_kw
    else:
        rng = rng_for(seed, "evstart")
        start = int(rng.choice(params.offpeak_starts))
        out[start:start + params.ev_charge_hours] = params.charger_kw
    return out


def household_attack_shift(profile: np.ndarray, deferrable_fraction: float,
                           peak_hours: tuple[int, ...] = (20, 21)) -> np.ndarray:
    """Move a fraction of every non-peak hour into the peak window, split
    evenly; total energy is preserved."""
    if not 0.0 <= deferrable_fraction <= 1.0:
        raise ValueError(f"deferrable_fraction must be in [0, 1], got {deferrable_fraction}")
    out = np.asarray(profile, dtype=np.float64).copy()
    peak = np.zeros(HOURS, dtype=bool)
    peak[list(peak_hours)] = True
    moved = deferrable_fraction * out[~peak].sum()
    out[~peak] *= 1.0 - deferrable_fraction
    out[peak] += moved / len(peak_hours)
    return out


@dataclass
class Residents:
    """One resident per building, stored as parallel arrays."""
    building_ids: np.ndarray
    occupancy: np.ndarray
    has_ev: np.ndarray
    follows_through: np.ndarray

    def __post_init__(self):
        n = len(self.building_ids)
        for name in ("occupancy", "has_ev", "follows_through"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} length mismatch")
        if n and self.occupancy.min() < 1:
            raise ValueError("occupancy must be >= 1")

    def __len__(self) -> int:
        return len(self.building_ids)

    @property
    def any_followers(self) -> bool:
        return bool(self.follows_through.any())


def assign_residents(building_ids: np.ndarray, occupancy_hist: dict[int, float],
                     ev_rate: float, follow_rate: float, seed: int) -> Residents:
    """Draw occupancy, EV ownership, and follow-through per building.

    The three uniform draws happen for every building regardless of the
    rates, so raising a rate only flips thresholds: the same seed yields
    nested EV/follower sets across rates, which keeps calibration and attack
    runs comparable.
    """
    validate_occupancy_hist(occupancy_hist)
    for name, rate in (("ev_rate", ev_rate), ("follow_rate", follow_rate)):
        if not 0.0 <= rate <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {rate}")
    n = len(building_ids)
    rng = rng_for(seed, "residents")
    occs = np.asarray(sorted(occupancy_hist), dtype=np.int64)
    probs = np.asarray([occupancy_hist[int(o)] for o in occs])
    occupancy = rng.choice(occs, size=n, p=probs)
    u_ev = rng.random(n)
    u_follow = rng.random(n)
    return Residents(
        building_ids=np.asarray(building_ids, dtype=np.int64),
        occupancy=occupancy,
        has_ev=u_ev < ev_rate,
        follows_through=u_follow < follow_rate)


def draw_load_randomness(n: int, seed: int,
                         params: LoadParams = LoadParams()) -> tuple[np.ndarray, np.ndarray]:
    """Per-building jitter factors and EV block starts, drawn for every
    building (owner or not) so the draws never depend on the rates."""
    jitter = rng_for(seed, "jitter").uniform(1.0 - params.jitter, 1.0 + params.jitter, size=n)
    starts = rng_for(seed, "evstart").choice(
        np.asarray(params.offpeak_starts, dtype=np.int64), size=n)
    return jitter, starts


def _build_loads(residents: Residents, params: LoadParams, seed: int,
                 attacked: bool) -> np.ndarray:
    n = len(residents)
    jitter, starts = draw_load_randomness(n, seed, params)
    scale = params.daily_kwh_occ1 * params.occupancy_scale(residents.occupancy) * jitter
    loads = BASE_SHAPE[None, :] * scale[:, None]

    follows = residents.follows_through if attacked else np.zeros(n, dtype=bool)
    if follows.any():
        peak = np.zeros(HOURS, dtype=bool)
        peak[list(params.peak_hours)] = True
        f = params.deferrable_fraction
        moved = f * loads[follows][:, ~peak].sum(axis=1)
        loads[np.ix_(follows, ~peak)] *= 1.0 - f
        loads[np.ix_(follows, peak)] += (moved / len(params.peak_hours))[:, None]

    ev_offpeak = residents.has_ev & ~follows
    for s in params.offpeak_starts:
        rows = ev_offpeak & (starts == s)
        loads[rows, s:s + params.ev_charge_hours] += params.charger_kw
    ev_peak = residents.has_ev & follows
    if ev_peak.any():
        loads[np.ix_(ev_peak, np.asarray(params.peak_hours))] += params.follower_ev_kw
    return loads


def build_regular_loads(residents: Residents, params: LoadParams, seed: int) -> np.ndarray:
    """(n, 24) kW matrix with nobody following the notification."""
    return _build_loads(residents, params, seed, attacked=False)


def build_attack_loads(residents: Residents, params: LoadParams, seed: int) -> np.ndarray:
    """(n, 24) kW matrix with followers shifted into the peak window; equals
    build_regular_loads for the same seed when nobody follows."""
    return _build_loads(residents, params, seed, attacked=True)
