"""Planted parent/child Markov pools for checking direction recovery.

The parent is a random order-1 chain over ``n_states`` pitches. The child
keeps the parent's transitions among ``n_child_states`` of them,
renormalized, the way a janya raga keeps a subset of its melakarta's
svaras.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lzp import build_graph, causal_accuracy
from .markov import SurrogateConfig, TransitionModel, surrogate_pool
from .melody import expand, pool_min_length, sample_subsequence
from .raga import Group
from .seeding import derive_rng


@dataclass
class SyntheticConfig:
    n_states: int = 12
    n_child_states: int = 7
    n_parent: int = 6
    n_child: int = 4
    n_events: int = 1000
    concentration: float = 1.0

    def __post_init__(self):
        if not 0 < self.n_child_states <= self.n_states:
            raise ValueError("child states must be a non-empty subset of the parent's")


def planted_models(cfg: SyntheticConfig, rng: np.random.Generator):
    rho = rng.dirichlet(np.full(cfg.n_states, cfg.concentration), size=cfg.n_states)
    parent = {(i,): {j: float(rho[i, j]) for j in range(cfg.n_states)} for i in range(cfg.n_states)}
    keep = sorted(rng.choice(cfg.n_states, cfg.n_child_states, replace=False).tolist())
    child = {}
    for i in keep:
        w = rho[i, keep] / rho[i, keep].sum()
        child[(i,)] = dict(zip(keep, w.tolist()))
    return TransitionModel(1, parent), TransitionModel(1, child)


def recovery_accuracy(master_seed: int, cfg: SyntheticConfig | None = None, workers=None) -> float:
    """Percent of parent/child pairs inferred as parent -> child."""
    cfg = cfg or SyntheticConfig()
    parent, child = planted_models(cfg, derive_rng(master_seed, "models"))
    scfg = SurrogateConfig(n_events=cfg.n_events)
    comps = surrogate_pool([], cfg.n_parent, scfg, master_seed, stream=("parent",),
                           model=parent, raga_id="parent", group=Group.MELAKARTA)
    comps += surrogate_pool([], cfg.n_child, scfg, master_seed, stream=("child",),
                            model=child, raga_id="child", group=Group.JANYA)
    seqs = [expand(c) for c in comps]
    n_min = pool_min_length(seqs)
    windows = [
        sample_subsequence(s, n_min, derive_rng(master_seed, "window", k))
        for k, s in enumerate(seqs)
    ]
    return causal_accuracy(build_graph(windows, workers)).accuracy_pct
