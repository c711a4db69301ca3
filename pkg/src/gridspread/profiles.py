"""Survey-style behavior parameters and their assignment to network nodes.

Profiles exist in two flavors matching the influence models: cascade-style
profiles carry per-sender persuasion probabilities, threshold-style profiles
carry forward/follow thresholds plus stranger-contact probabilities.  Likert
answers (0..10) map to probabilities x/10.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

MODELS = ("IC", "LT")

PROFILE_CSV_HEADER = [
    "participant_id", "model", "condition",
    "follow_stranger", "forward_stranger", "follow_friend", "forward_friend",
    "threshold_follow", "threshold_forward",
]


class ProfileFormatError(ValueError):
    pass


def likert_to_probability(x: int) -> float:
    """Map a 0..10 Likert answer to the probability x/10."""
    if isinstance(x, bool) or not isinstance(x, (int, np.integer)):
        raise ValueError(f"Likert answer must be an integer, got {x!r}")
    if not 0 <= x <= 10:
        raise ValueError(f"Likert answer must be in 0..10, got {x}")
    return x / 10


def _check_prob(name: str, p) -> None:
    if not isinstance(p, (int, float, np.floating)) or not 0.0 <= float(p) <= 1.0:
        raise ValueError(f"{name} must be a probability in [0, 1], got {p!r}")


@dataclass(frozen=True)
class BehaviorProfile:
    """One participant's propensities.

    IC profiles use the four probabilities; LT profiles use the stranger
    probabilities plus integer thresholds on the number of distinct friends
    the notification must arrive from.
    """
    model: str
    follow_stranger: float
    forward_stranger: float
    follow_friend: float | None = None
    forward_friend: float | None = None
    threshold_follow: int | None = None
    threshold_forward: int | None = None
    condition: str = "without_link"
    participant_id: str | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        _check_prob("follow_stranger", self.follow_stranger)
        _check_prob("forward_stranger", self.forward_stranger)
        if self.model == "IC":
            if self.follow_friend is None or self.forward_friend is None:
                raise ValueError("IC profile needs follow_friend and forward_friend")
            _check_prob("follow_friend", self.follow_friend)
            _check_prob("forward_friend", self.forward_friend)
        else:
            if self.threshold_follow is None or self.threshold_forward is None:
                raise ValueError("LT profile needs threshold_follow and threshold_forward")
            for name in ("threshold_follow", "threshold_forward"):
                t = getattr(self, name)
                if isinstance(t, bool) or not isinstance(t, (int, np.integer)) or t < 0:
                    raise ValueError(f"{name} must be a non-negative integer, got {t!r}")


@dataclass(frozen=True)
class ProfileSet:
    """Non-empty, model-homogeneous collection of profiles."""
    profiles: tuple[BehaviorProfile, ...]
    source: str = "unspecified"

    def __post_init__(self):
        if not self.profiles:
            raise ValueError("no profiles")
        kinds = {p.model for p in self.profiles}
        if len(kinds) > 1:
            raise ValueError(f"mixed model kinds in one set: {sorted(kinds)}")
        object.__setattr__(self, "profiles", tuple(self.profiles))

    @property
    def model(self) -> str:
        return self.profiles[0].model

    def __len__(self) -> int:
        return len(self.profiles)

    def __getitem__(self, i: int) -> BehaviorProfile:
        return self.profiles[i]

    def field_array(self, name: str) -> np.ndarray:
        vals = [getattr(p, name) for p in self.profiles]
        if any(v is None for v in vals):
            raise ValueError(f"field {name} not set for model {self.model}")
        dtype = np.int64 if name.startswith("threshold") else np.float64
        return np.asarray(vals, dtype=dtype)


def load_profiles(path) -> ProfileSet:
    """Read the profile CSV (see PROFILE_CSV_HEADER); Likert columns are
    converted to probabilities."""
    profiles = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ProfileFormatError(f"{path}: no profiles (empty file)")
        if [h.strip() for h in header] != PROFILE_CSV_HEADER:
            raise ProfileFormatError(
                f"{path}: bad header, expected {','.join(PROFILE_CSV_HEADER)}")
        for rownum, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(PROFILE_CSV_HEADER):
                raise ProfileFormatError(f"{path}: row {rownum}: expected "
                                         f"{len(PROFILE_CSV_HEADER)} columns, got {len(row)}")
            rec = dict(zip(PROFILE_CSV_HEADER, (c.strip() for c in row)))
            profiles.append(_parse_row(path, rownum, rec))
    if not profiles:
        raise ProfileFormatError(f"{path}: no profiles")
    try:
        return ProfileSet(tuple(profiles), source=f"survey_file:{path}")
    except ValueError as exc:
        raise ProfileFormatError(f"{path}: {exc}") from None


def _parse_row(path, rownum: int, rec: dict[str, str]) -> BehaviorProfile:
    def likert(col: str) -> float:
        try:
            return likert_to_probability(int(rec[col]))
        except ValueError as exc:
            raise ProfileFormatError(f"{path}: row {rownum}: column {col!r}: {exc}") from None

    def threshold(col: str) -> int:
        try:
            t = int(rec[col])
        except ValueError:
            raise ProfileFormatError(
                f"{path}: row {rownum}: column {col!r}: not an integer: {rec[col]!r}") from None
        if t < 0:
            raise ProfileFormatError(f"{path}: row {rownum}: column {col!r}: negative threshold")
        return t

    model = rec["model"]
    if model not in MODELS:
        raise ProfileFormatError(f"{path}: row {rownum}: column 'model': unknown model {model!r}")
    common = dict(model=model, condition=rec["condition"],
                  participant_id=rec["participant_id"] or None,
                  follow_stranger=likert("follow_stranger"),
                  forward_stranger=likert("forward_stranger"))
    if model == "IC":
        return BehaviorProfile(follow_friend=likert("follow_friend"),
                               forward_friend=likert("forward_friend"), **common)
    return BehaviorProfile(threshold_follow=threshold("threshold_follow"),
                           threshold_forward=threshold("threshold_forward"), **common)


def write_profiles(pset: ProfileSet, path) -> None:
    """Inverse of load_profiles; probabilities must be exact Likert multiples."""
    def unlikert(p: float) -> str:
        x = round(p * 10)
        if abs(p * 10 - x) > 1e-9:
            raise ValueError(f"probability {p} is not a multiple of 0.1")
        return str(int(x))

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PROFILE_CSV_HEADER)
        for i, p in enumerate(pset.profiles):
            if p.model == "IC":
                tail = [unlikert(p.follow_friend), unlikert(p.forward_friend), "", ""]
            else:
                tail = ["", "", str(p.threshold_follow), str(p.threshold_forward)]
            writer.writerow([p.participant_id or f"p{i}", p.model, p.condition,
                             unlikert(p.follow_stranger), unlikert(p.forward_stranger)] + tail)


def _check_hist(name: str, hist) -> np.ndarray:
    arr = np.asarray(hist, dtype=np.float64)
    if arr.shape != (11,):
        raise ValueError(f"{name}: Likert histogram needs 11 bins, got shape {arr.shape}")
    if np.any(arr < 0) or abs(arr.sum() - 1.0) > 1e-9:
        raise ValueError(f"{name}: histogram must be non-negative and sum to 1")
    return arr


@dataclass(frozen=True)
class LikertDistributions:
    """Per-field sampling distributions for synthetic profile sets.

    Likert fields are 11-bin histograms over answers 0..10; thresholds are a
    probability map over small non-negative integers.  shared_threshold forces
    the forward threshold to equal the follow threshold draw.
    """
    model: str
    follow_stranger: tuple[float, ...]
    forward_stranger: tuple[float, ...]
    follow_friend: tuple[float, ...] | None = None
    forward_friend: tuple[float, ...] | None = None
    threshold_follow: dict[int, float] | None = None
    threshold_forward: dict[int, float] | None = None
    shared_threshold: bool = False
    condition: str = "without_link"

    def validate(self) -> None:
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        _check_hist("follow_stranger", self.follow_stranger)
        _check_hist("forward_stranger", self.forward_stranger)
        if self.model == "IC":
            if self.follow_friend is None or self.forward_friend is None:
                raise ValueError("IC distributions need follow_friend and forward_friend")
            _check_hist("follow_friend", self.follow_friend)
            _check_hist("forward_friend", self.forward_friend)
        else:
            if self.threshold_follow is None:
                raise ValueError("LT distributions need threshold_follow")
            if self.threshold_forward is None and not self.shared_threshold:
                raise ValueError("LT distributions need threshold_forward "
                                 "(or shared_threshold=True)")
            for name in ("threshold_follow", "threshold_forward"):
                tmap = getattr(self, name)
                if tmap is None:
                    continue
                probs = np.asarray(list(tmap.values()), dtype=np.float64)
                if any(k < 0 for k in tmap) or np.any(probs < 0) or abs(probs.sum() - 1) > 1e-9:
                    raise ValueError(f"{name}: invalid threshold distribution")


def synthesize_profiles(count: int, dist: LikertDistributions, seed: int) -> ProfileSet:
    """Draw `count` i.i.d. profiles from the given field distributions."""
    if count < 1:
        raise ValueError("count must be positive")
    dist.validate()
    rng = np.random.default_rng(seed)

    def draw_likert(hist) -> np.ndarray:
        return rng.choice(11, size=count, p=np.asarray(hist, dtype=np.float64)) / 10

    def draw_threshold(tmap) -> np.ndarray:
        keys = np.asarray(sorted(tmap), dtype=np.int64)
        probs = np.asarray([tmap[int(k)] for k in keys], dtype=np.float64)
        return rng.choice(keys, size=count, p=probs)

    fs = draw_likert(dist.follow_stranger)
    ws = draw_likert(dist.forward_stranger)
    profiles = []
    if dist.model == "IC":
        ff = draw_likert(dist.follow_friend)
        wf = draw_likert(dist.forward_friend)
        for i in range(count):
            profiles.append(BehaviorProfile(
                model="IC", condition=dist.condition, participant_id=f"synth{i}",
                follow_stranger=fs[i], forward_stranger=ws[i],
                follow_friend=ff[i], forward_friend=wf[i]))
    else:
        tf = draw_threshold(dist.threshold_follow)
        tw = tf if dist.shared_threshold else draw_threshold(dist.threshold_forward)
        for i in range(count):
            profiles.append(BehaviorProfile(
                model="LT", condition=dist.condition, participant_id=f"synth{i}",
                follow_stranger=fs[i], forward_stranger=ws[i],
                threshold_follow=int(tf[i]), threshold_forward=int(tw[i])))
    return ProfileSet(tuple(profiles), source=f"synthetic(seed={seed})")


@dataclass
class ProfileAssignment:
    """Per-node choice of profile: an index into the profile set."""
    profile_set: ProfileSet
    indices: np.ndarray  # int32, one entry per node

    def param(self, name: str) -> np.ndarray:
        """Per-node parameter array for the given profile field."""
        return self.profile_set.field_array(name)[self.indices]

    def profile_of(self, v: int) -> BehaviorProfile:
        return self.profile_set[int(self.indices[v])]

    @property
    def model(self) -> str:
        return self.profile_set.model


def assign_profiles(net, pset: ProfileSet, seed: int) -> ProfileAssignment:
    """Assign each node an independent uniform draw from the set
    (with replacement).  Accepts a network or a plain node count."""
    if len(pset) < 1:
        raise ValueError("no profiles")
    n = net if isinstance(net, int) else net.n
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(pset), size=n, dtype=np.int32)
    return ProfileAssignment(pset, idx)


# Illustrative default distributions for synthetic runs.  They stand in for
# unavailable survey data and are tuned so that the shipped example config
# lands in a plausible follow-through band; override them freely.

_DEFAULT_HISTS = {
    ("IC", False): dict(
        follow_stranger=(0.06, 0.05, 0.06, 0.07, 0.08, 0.14, 0.12, 0.12, 0.12, 0.09, 0.09),
        forward_stranger=(0.18, 0.10, 0.09, 0.09, 0.08, 0.12, 0.09, 0.08, 0.07, 0.05, 0.05),
        follow_friend=(0.04, 0.04, 0.05, 0.06, 0.08, 0.13, 0.12, 0.13, 0.13, 0.11, 0.11),
        forward_friend=(0.12, 0.08, 0.08, 0.09, 0.09, 0.13, 0.11, 0.10, 0.09, 0.06, 0.05),
    ),
    ("IC", True): dict(
        follow_stranger=(0.16, 0.09, 0.08, 0.08, 0.08, 0.12, 0.10, 0.09, 0.08, 0.06, 0.06),
        forward_stranger=(0.28, 0.12, 0.10, 0.09, 0.08, 0.10, 0.07, 0.06, 0.05, 0.03, 0.02),
        follow_friend=(0.10, 0.07, 0.07, 0.08, 0.08, 0.13, 0.11, 0.11, 0.10, 0.08, 0.07),
        forward_friend=(0.20, 0.10, 0.09, 0.09, 0.09, 0.12, 0.09, 0.08, 0.06, 0.04, 0.04),
    ),
}

_DEFAULT_THRESHOLDS = {
    False: dict(threshold_follow={1: 0.35, 2: 0.28, 3: 0.18, 4: 0.10, 6: 0.06, 10: 0.03},
                threshold_forward={1: 0.30, 2: 0.26, 3: 0.20, 4: 0.12, 6: 0.08, 10: 0.04}),
    True: dict(threshold_follow={1: 0.24, 2: 0.28, 3: 0.22, 4: 0.13, 6: 0.09, 10: 0.04},
               threshold_forward={1: 0.20, 2: 0.26, 3: 0.24, 4: 0.15, 6: 0.10, 10: 0.05}),
}


def default_distributions(model: str, with_link: bool = False) -> LikertDistributions:
    """Shipped example distributions (illustrative, not survey ground truth)."""
    condition = "with_link" if with_link else "without_link"
    if model == "IC":
        return LikertDistributions(model="IC", condition=condition,
                                   **_DEFAULT_HISTS[("IC", with_link)])
    if model == "LT":
        base = _DEFAULT_HISTS[("IC", with_link)]
        return LikertDistributions(model="LT", condition=condition,
                                   follow_stranger=base["follow_stranger"],
                                   forward_stranger=base["forward_stranger"],
                                   **_DEFAULT_THRESHOLDS[with_link])
    raise ValueError(f"model must be one of {MODELS}, got {model!r}")
