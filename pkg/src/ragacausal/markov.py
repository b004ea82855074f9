"""Order-k Markov models of raga corpora and surrogate composition generation."""
from __future__ import annotations

import bisect
import logging
import math
import warnings
from collections import Counter, defaultdict
from dataclasses import dataclass

import numpy as np

from .errors import CorpusTooShort, GenerationStalled, NonConvergence, OrderUnsupported
from .notation import Composition, NoteEvent
from .raga import REST, Group, Origin
from .seeding import derive_rng

log = logging.getLogger(__name__)

Pitch = float  # int-valued, or REST


@dataclass
class TransitionModel:
    """Sparse transition table: only contexts seen in the corpus are stored."""

    order: int
    transitions: dict[tuple, dict[Pitch, float]]
    support: frozenset = frozenset()

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("Markov order must be >= 1")
        if not self.support:
            pitches = set()
            for ctx, dist in self.transitions.items():
                pitches.update(ctx)
                pitches.update(dist)
            self.support = frozenset(pitches)
        self._tables = {}

    def table(self, context: tuple) -> tuple[list, list] | None:
        """(next pitches, cumulative weights) for ``context``, or None."""
        if context not in self._tables:
            dist = self.transitions.get(context)
            if dist is None:
                return None
            values = sorted(dist)
            cum = np.cumsum([dist[v] for v in values]).tolist()
            self._tables[context] = (values, cum)
        return self._tables[context]


@dataclass
class StationaryDistribution:
    probabilities: dict[Pitch, float]

    def states(self) -> list[Pitch]:
        return sorted(self.probabilities)

    def vector(self) -> np.ndarray:
        return np.array([self.probabilities[s] for s in self.states()])


@dataclass
class SurrogateConfig:
    n_events: int = 1000
    epsilon: float = 2.0**-7
    avartana_choices: tuple[int, ...] = (6, 7, 8, 10, 12, 14, 16)
    duration_mean: float = 2.0
    duration_sd: float = 1.0
    max_restarts: int = 10_000
    # pitches generation should stay near; None disables trap escape
    core_pitches: frozenset | None = None
    max_attempts: int = 5

    def __post_init__(self):
        if self.epsilon <= 0 or self.n_events <= 0 or not self.avartana_choices:
            raise ValueError("epsilon and n_events must be positive, avartana_choices non-empty")
        # the z > 0 rejection loop needs a non-negligible acceptance rate
        if self.duration_sd <= 0 or self.duration_mean + 3 * self.duration_sd <= 0:
            raise ValueError("duration distribution must put mass on z > 0")
        self.avartana_choices = tuple(sorted(self.avartana_choices))


def _coalesce(corpus: list[Composition]) -> list[Pitch]:
    seq: list[Pitch] = []
    for comp in corpus:
        seq.extend(comp.pitches())
    return seq


def fit(corpus: list[Composition], order: int = 1) -> TransitionModel:
    """Empirical transition frequencies of the corpus joined into one sequence.

    Joins between compositions count as ordinary transitions.
    """
    if order < 1:
        raise ValueError("Markov order must be >= 1")
    seq = _coalesce(corpus)
    if len(seq) <= order:
        raise CorpusTooShort(f"{len(seq)} events cannot fit an order-{order} model")
    counts: dict[tuple, Counter] = defaultdict(Counter)
    for i in range(order, len(seq)):
        counts[tuple(seq[i - order : i])][seq[i]] += 1
    transitions = {}
    for ctx, ctr in counts.items():
        total = sum(ctr.values())
        transitions[ctx] = {p: n / total for p, n in ctr.items()}
    return TransitionModel(order, transitions, frozenset(seq))


def transition_matrix(model: TransitionModel) -> tuple[list[Pitch], np.ndarray]:
    """Dense order-1 matrix over the model support.

    A state with no stored row (it only ever ended the corpus) jumps
    uniformly to all states, which keeps the matrix stochastic.
    """
    if model.order != 1:
        raise OrderUnsupported("dense transition matrix needs an order-1 model")
    states = sorted(model.support)
    index = {s: i for i, s in enumerate(states)}
    n = len(states)
    rho = np.zeros((n, n))
    for s in states:
        dist = model.transitions.get((s,))
        if dist is None:
            rho[index[s], :] = 1.0 / n
            continue
        for t, w in dist.items():
            rho[index[s], index[t]] = w
    return states, rho


def stationary(
    model: TransitionModel, tol: float = 1e-12, max_iter: int = 1_000_000
) -> StationaryDistribution:
    """Fixed point pi = pi rho by power iteration from the uniform vector.

    Iterates the lazy chain (I + rho) / 2, which has the same fixed points
    but also converges on periodic chains.
    """
    if model.order != 1:
        raise OrderUnsupported("stationary distribution is defined for order-1 models")
    states, rho = transition_matrix(model)
    lazy = 0.5 * (np.eye(len(states)) + rho)
    pi = np.full(len(states), 1.0 / len(states))
    for _ in range(max_iter):
        nxt = pi @ lazy
        delta = np.abs(nxt - pi).sum()
        pi = nxt
        if delta < tol:
            break
    else:
        raise NonConvergence(f"power iteration did not converge in {max_iter} steps")
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    return StationaryDistribution(dict(zip(states, pi.tolist())))


def duration_from_z(z: float) -> float:
    return 2.0 ** -math.floor(z)


def sample_duration(rng: np.random.Generator, mean: float = 2.0, sd: float = 1.0) -> float:
    """2 ** -floor(z) with z from the positive part of Normal(mean, sd)."""
    while True:
        z = rng.normal(mean, sd)
        if z > 0:
            return duration_from_z(z)


def _draw(rng: np.random.Generator, values: list, cum: list):
    u = rng.random() * cum[-1]
    i = bisect.bisect_right(cum, u)
    return values[min(i, len(values) - 1)]


def _distance_to_core(p: Pitch, core_sounded: list[int]) -> float:
    if p == REST or not core_sounded:
        return math.inf
    return min(abs(p - q) for q in core_sounded)


class _Generator:
    def __init__(self, model, pi, cfg, rng):
        self.model = model
        self.cfg = cfg
        self.rng = rng
        self.core = cfg.core_pitches
        self.core_sounded = sorted(p for p in self.core if p != REST) if self.core else []
        contexts = sorted(model.transitions)
        self.contexts = contexts
        if model.order == 1:
            if pi is None:
                pi = stationary(model)
            keys = [(s,) for s in pi.states() if (s,) in model.transitions]
            weights = [pi.probabilities[k[0]] for k in keys]
        else:
            keys = contexts
            weights = [1.0] * len(keys)
        self.key_table = self._cumulative(keys, weights)
        core_keys = [(k, w) for k, w in zip(keys, weights) if self.core and k[-1] in self.core]
        self.core_key_table = (
            self._cumulative([k for k, _ in core_keys], [w for _, w in core_keys])
            if core_keys else self.key_table
        )

    @staticmethod
    def _cumulative(keys, weights):
        weights = np.asarray(weights, dtype=float)
        if not len(keys) or weights.sum() <= 0:
            weights = np.ones(len(keys))
        return list(keys), np.cumsum(weights).tolist()

    def draw_key(self, core_only=False):
        keys, cum = self.core_key_table if core_only else self.key_table
        return _draw(self.rng, keys, cum)

    def next_table(self, key):
        """Sampling table for the next pitch, or None to discard and re-key."""
        table = self.model.table(key)
        if table is None:
            return None
        if self.core is None:
            return table
        values, cum = table
        if any(v in self.core for v in values):
            return table
        # trapped outside the core: only moves toward it are allowed
        here = _distance_to_core(key[-1], self.core_sounded)
        dist = self.model.transitions[key]
        closer = [v for v in values if _distance_to_core(v, self.core_sounded) < here]
        if not closer:
            return None
        return closer, np.cumsum([dist[v] for v in closer]).tolist()

    def run(self, name, raga_id, group) -> Composition:
        cfg, rng = self.cfg, self.rng
        k = self.model.order
        tau = int(cfg.avartana_choices[rng.integers(len(cfg.avartana_choices))])
        key = self.draw_key()
        events: list[NoteEvent] = []
        measure, running, stall = 0, 0.0, 0
        while len(events) < cfg.n_events:
            if stall > cfg.max_restarts:
                raise GenerationStalled(
                    f"{stall} consecutive rejections after {len(events)} events"
                )
            table = self.next_table(key)
            if table is None:
                key = self.draw_key(core_only=self.core is not None)
                stall += 1
                continue
            pitch = _draw(rng, *table)
            dur = sample_duration(rng, cfg.duration_mean, cfg.duration_sd)
            if running + dur > tau + cfg.epsilon:
                stall += 1
                continue
            events.append(NoteEvent(pitch, dur, measure))
            running += dur
            key = (key + (pitch,))[-k:]
            stall = 0
            if abs(running - tau) <= cfg.epsilon:
                measure += 1
                running = 0.0
        return Composition(
            events=events,
            raga_id=raga_id,
            theta=tau,
            source_name=name,
            group=group,
            origin=Origin.SURROGATE,
        )


def generate(
    model: TransitionModel,
    pi: StationaryDistribution | None,
    cfg: SurrogateConfig,
    rng: np.random.Generator,
    name: str = "surrogate",
    raga_id: str = "",
    group: Group = Group.MELAKARTA,
) -> Composition:
    """Sample one surrogate composition of ``cfg.n_events`` note events.

    Each measure fills exactly one avartana of ``tau`` counts, ``tau`` drawn
    once per surrogate; an event whose duration would overshoot the
    avartana is thrown away and drawn again.
    """
    if model.order >= 2:
        warnings.warn(
            "order >= 2 chains tend to collapse into repeated rests; order 1 is recommended",
            stacklevel=2,
        )
    return _Generator(model, pi, cfg, rng).run(name, raga_id, group)


def surrogate_pool(
    corpus: list[Composition],
    s: int,
    cfg: SurrogateConfig | None = None,
    master_seed: int = 0,
    order: int = 1,
    stream: tuple = (),
    model: TransitionModel | None = None,
    pi: StationaryDistribution | None = None,
    raga_id: str | None = None,
    group: Group | None = None,
) -> list[Composition]:
    """``s`` surrogates of ``corpus``, surrogate ``i`` seeded from (master_seed, *stream, i).

    A surrogate that stalls is retried with the next attempt's seed, up to
    ``cfg.max_attempts`` times.
    """
    if s < 0:
        raise ValueError("surrogate count must be >= 0")
    if s == 0:
        return []
    cfg = cfg or SurrogateConfig()
    if model is None:
        model = fit(corpus, order)
    if pi is None and model.order == 1:
        pi = stationary(model)
    if raga_id is None:
        raga_id = corpus[0].raga_id if corpus else ""
    if group is None:
        group = corpus[0].group if corpus else Group.MELAKARTA
    out = []
    for i in range(s):
        name = f"{raga_id}_surr{i:03d}" if raga_id else f"surr{i:03d}"
        for attempt in range(cfg.max_attempts):
            rng = derive_rng(master_seed, *stream, i, attempt)
            try:
                out.append(generate(model, pi, cfg, rng, name, raga_id, group))
                break
            except GenerationStalled:
                log.warning("surrogate %s stalled on attempt %d", name, attempt)
                if attempt == cfg.max_attempts - 1:
                    raise
    return out
