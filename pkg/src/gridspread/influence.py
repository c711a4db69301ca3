"""Notification propagation over the social network.

Two mechanisms share one engine: a cascade variant where persuasion is
probabilistic per exposure, and a threshold variant where friend-driven
decisions fire once enough distinct friends have forwarded the message.
Both separate the decision to follow the discount from the decision to
forward, and both treat the initial stranger send specially.

Randomness is split across independent per-purpose streams (stranger
sampling, follow trials, forward trials, target choice, delivery) so that
changing follow parameters cannot perturb who receives the message.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .profiles import MODELS, ProfileAssignment
from .seeding import int_seed, rng_for
from .social_graph import SocialNetwork, sample_stranger_recipients


@dataclass(frozen=True)
class PropagationConfig:
    model: str
    k: int = 3
    seed_fraction: float = 0.2
    max_steps: int = 64
    rng_seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")
        if not 0.0 <= self.seed_fraction <= 1.0:
            raise ValueError(f"seed_fraction must be in [0, 1], got {self.seed_fraction}")
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be >= 1, got {self.max_steps}")


@dataclass(frozen=True)
class NodeState:
    """Read-only view of one node after a run."""
    received_from_stranger: bool
    followed: bool
    forwarded: bool
    step_followed: int | None
    friend_sender_count: int
    friend_senders: frozenset[int] | None  # only when deliveries were recorded


@dataclass
class PropagationTrace:
    """Outcome of one run: cumulative counts per step plus final node states.

    Arrays have length steps_executed + 1; index 0 is the stranger send.
    """
    model: str
    k: int
    steps_executed: int
    cum_recipients: np.ndarray
    cum_forwarders: np.ndarray
    cum_followers: np.ndarray
    received: np.ndarray
    received_from_stranger: np.ndarray
    followed: np.ndarray
    forwarded: np.ndarray
    step_followed: np.ndarray  # -1 where the node never followed
    friend_sender_count: np.ndarray
    # delivery log (step, sender, target), present when requested
    deliveries: tuple[np.ndarray, np.ndarray, np.ndarray] | None = field(
        default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.received)

    @property
    def final_followers(self) -> int:
        return int(self.cum_followers[-1])

    def node_state(self, v: int) -> NodeState:
        senders = None
        if self.deliveries is not None:
            _, s, t = self.deliveries
            senders = frozenset(int(x) for x in s[t == v])
        step = int(self.step_followed[v])
        return NodeState(
            received_from_stranger=bool(self.received_from_stranger[v]),
            followed=bool(self.followed[v]),
            forwarded=bool(self.forwarded[v]),
            step_followed=step if step >= 0 else None,
            friend_sender_count=int(self.friend_sender_count[v]),
            friend_senders=senders)


def _sample_distinct(rng: np.random.Generator, degrees: np.ndarray, k: int) -> np.ndarray:
    """Per row i, k draws giving min(k, degrees[i]) distinct uniform indices
    in [0, degrees[i]) at positions 0..min(k, degrees[i])-1; later positions
    hold junk the caller must mask.

    Draw j is uniform over the degrees[i]-j indices not yet taken, then
    shifted past the already-taken ones in ascending order.
    """
    m = len(degrees)
    picks = np.empty((m, k), dtype=np.int64)
    for j in range(k):
        avail = np.maximum(degrees - j, 1)
        raw = rng.integers(0, avail, dtype=np.int64)
        if j:
            prior = np.sort(picks[:, :j], axis=1)
            for col in range(j):
                raw += raw >= prior[:, col]
        picks[:, j] = raw
    return picks


def _dispatch(net: SocialNetwork, senders: np.ndarray, k: int,
              rng_targets: np.random.Generator,
              rng_delivery: np.random.Generator,
              p_deliver: np.ndarray | None) -> tuple[np.ndarray, np.ndarray]:
    """Sample each sender's target subset and resolve deliveries.

    Returns (send_ids, target_ids) for the deliveries that actually happen.
    p_deliver is the per-node cascade delivery probability, or None for
    certain delivery.
    """
    if len(senders) == 0:
        return senders, senders
    degs = net.indptr[senders + 1] - net.indptr[senders]
    picks = _sample_distinct(rng_targets, degs, k)
    valid = np.arange(k) < np.minimum(degs, k)[:, None]
    if p_deliver is not None:
        u = rng_delivery.random((len(senders), k))
        valid &= u < p_deliver[senders][:, None]
    rows, cols = np.nonzero(valid)
    out_senders = senders[rows]
    targets = net.indices[net.indptr[out_senders] + picks[rows, cols]]
    return out_senders, targets.astype(np.int64)


def run_cascade(net: SocialNetwork, assignment: ProfileAssignment,
                cfg: PropagationConfig, record_deliveries: bool = False) -> PropagationTrace:
    """Run one propagation to quiescence (or cfg.max_steps).

    Step 0 delivers the stranger notification to a seed_fraction sample;
    recipients follow with their stranger-follow probability and forward with
    their stranger-forward probability, independently.  Forwarders pick
    min(k, degree) distinct friends once.  Under the cascade model each pick
    is delivered with the sender's friend-forward probability and each fresh
    friend exposure retries follow/forward decisions; under the threshold
    model delivery is certain and decisions fire when the distinct friend
    sender count reaches the node's threshold.  A step with no new
    recipient, follower, or forwarder ends the run.
    """
    if assignment.model != cfg.model:
        raise ValueError(f"profile model {assignment.model!r} does not "
                         f"match config model {cfg.model!r}")
    n = net.n
    if len(assignment.indices) != n:
        raise ValueError(f"assignment covers {len(assignment.indices)} nodes, network has {n}")

    is_ic = cfg.model == "IC"
    p_follow_stranger = assignment.param("follow_stranger")
    p_forward_stranger = assignment.param("forward_stranger")
    if is_ic:
        p_follow_friend = assignment.param("follow_friend")
        p_forward_friend = assignment.param("forward_friend")
        thr_follow = thr_forward = None
    else:
        p_follow_friend = p_forward_friend = None
        thr_follow = assignment.param("threshold_follow")
        thr_forward = assignment.param("threshold_forward")

    rng_follow = rng_for(cfg.rng_seed, "follow")
    rng_forward = rng_for(cfg.rng_seed, "forward")
    rng_targets = rng_for(cfg.rng_seed, "targets")
    rng_delivery = rng_for(cfg.rng_seed, "delivery")

    received = np.zeros(n, dtype=bool)
    received_from_stranger = np.zeros(n, dtype=bool)
    followed = np.zeros(n, dtype=bool)
    forwarded = np.zeros(n, dtype=bool)
    step_followed = np.full(n, -1, dtype=np.int32)
    friend_sender_count = np.zeros(n, dtype=np.int32)

    log: list[tuple[int, np.ndarray, np.ndarray]] = []

    # step 0: the stranger send
    recipients = sample_stranger_recipients(
        net, cfg.seed_fraction, int_seed(cfg.rng_seed, "stranger"))
    received[recipients] = True
    received_from_stranger[recipients] = True
    u = rng_follow.random(len(recipients))
    new_followers = recipients[u < p_follow_stranger[recipients]]
    followed[new_followers] = True
    step_followed[new_followers] = 0
    u = rng_forward.random(len(recipients))
    new_forwarders = recipients[u < p_forward_stranger[recipients]]
    forwarded[new_forwarders] = True

    total_received = len(recipients)
    total_followed = len(new_followers)
    total_forwarded = len(new_forwarders)
    cum_recipients = [total_received]
    cum_forwarders = [total_forwarded]
    cum_followers = [total_followed]

    pending = _dispatch(net, new_forwarders, cfg.k, rng_targets, rng_delivery,
                        p_forward_friend)
    if record_deliveries and len(pending[1]):
        log.append((1, *pending))

    step = 0
    while step < cfg.max_steps:
        step += 1
        changed = False
        senders, targets = pending
        if len(targets):
            tgt, counts = np.unique(targets, return_counts=True)
            friend_sender_count[tgt] += counts.astype(np.int32)
            fresh = np.count_nonzero(~received[tgt])
            received[tgt] = True
            total_received += fresh
            changed |= fresh > 0

            open_follow = ~followed[tgt]
            cand = tgt[open_follow]
            if is_ic:
                u = rng_follow.random(len(cand))
                ok = u < 1.0 - (1.0 - p_follow_friend[cand]) ** counts[open_follow]
            else:
                ok = friend_sender_count[cand] >= thr_follow[cand]
            new_followers = cand[ok]
            followed[new_followers] = True
            step_followed[new_followers] = step
            total_followed += len(new_followers)
            changed |= len(new_followers) > 0

            open_forward = ~forwarded[tgt]
            cand = tgt[open_forward]
            if is_ic:
                u = rng_forward.random(len(cand))
                ok = u < 1.0 - (1.0 - p_forward_friend[cand]) ** counts[open_forward]
            else:
                ok = friend_sender_count[cand] >= thr_forward[cand]
            new_forwarders = cand[ok]
            forwarded[new_forwarders] = True
            total_forwarded += len(new_forwarders)
            changed |= len(new_forwarders) > 0

            pending = _dispatch(net, new_forwarders, cfg.k, rng_targets,
                                rng_delivery, p_forward_friend)
            if record_deliveries and len(pending[1]):
                log.append((step + 1, *pending))
        else:
            pending = np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)

        cum_recipients.append(total_received)
        cum_forwarders.append(total_forwarded)
        cum_followers.append(total_followed)
        if not changed:
            break

    deliveries = None
    if record_deliveries:
        if log:
            steps = np.concatenate([np.full(len(s), t, dtype=np.int32) for t, s, _ in log])
            deliveries = (steps,
                          np.concatenate([s for _, s, _ in log]),
                          np.concatenate([t for _, _, t in log]))
        else:
            empty = np.empty(0, dtype=np.int64)
            deliveries = (empty.astype(np.int32), empty, empty)

    return PropagationTrace(
        model=cfg.model, k=cfg.k, steps_executed=step,
        cum_recipients=np.asarray(cum_recipients, dtype=np.int64),
        cum_forwarders=np.asarray(cum_forwarders, dtype=np.int64),
        cum_followers=np.asarray(cum_followers, dtype=np.int64),
        received=received, received_from_stranger=received_from_stranger,
        followed=followed, forwarded=forwarded, step_followed=step_followed,
        friend_sender_count=friend_sender_count, deliveries=deliveries)


STEP_DURATIONS_H = (1, 2, 3)


def follow_through_rate_at_peak(trace: PropagationTrace, step_duration_h: int,
                                lead_h: int, n: int | None = None) -> float:
    """Fraction of the population following by the time the peak arrives.

    The notification goes out lead_h hours before the peak and each step
    takes step_duration_h hours, so the peak falls at step
    floor(lead_h / step_duration_h); a run that quiesced earlier stays at
    its final value.
    """
    if step_duration_h not in STEP_DURATIONS_H:
        raise ValueError(f"step_duration_h must be one of {STEP_DURATIONS_H}, "
                         f"got {step_duration_h}")
    if lead_h < 0:
        raise ValueError(f"lead_h must be >= 0, got {lead_h}")
    if n is None:
        n = trace.n
    idx = min(lead_h // step_duration_h, trace.steps_executed)
    return float(trace.cum_followers[idx]) / n


def mean_trace(traces: list[PropagationTrace]) -> np.ndarray:
    """Element-wise mean of cumulative follower curves; runs that ended
    early are held at their final value."""
    if not traces:
        raise ValueError("mean_trace needs at least one trace")
    length = max(len(t.cum_followers) for t in traces)
    acc = np.zeros(length, dtype=np.float64)
    for t in traces:
        cur = t.cum_followers
        acc[:len(cur)] += cur
        acc[len(cur):] += cur[-1]
    return acc / len(traces)
