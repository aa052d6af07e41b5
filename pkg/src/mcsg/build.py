"""End-to-end graph construction: dataset -> similarity -> communities -> MCSG."""

from __future__ import annotations

from dataclasses import dataclass

from .communities import DEFAULT_EPSILON, Mcsg, detect_communities, materialize_mcsg
from .dataset import MsiDataset
from .similarity import build_channel_graph, compute_similarity


@dataclass(frozen=True)
class BuildConfig:
    """Reproducibility knobs; changing tau/measure/seed requires a rebuild."""

    measure: str = "pearson"
    tau: float = 0.7
    seed: int = 0
    max_depth: int = 3
    min_split_size: int = 4
    epsilon: float = DEFAULT_EPSILON


def build_mcsg(ds: MsiDataset, config: BuildConfig = BuildConfig()) -> Mcsg:
    """Deterministic pipeline; identical dataset + config gives identical output."""
    sim = compute_similarity(ds, measure=config.measure)
    graph = build_channel_graph(sim, tau=config.tau)
    hierarchy = detect_communities(graph, seed=config.seed, max_depth=config.max_depth,
                                   min_split_size=config.min_split_size)
    return materialize_mcsg(graph, hierarchy, dataset_name=ds.name,
                            mz={ch.channel_id: ch.mz for ch in ds.channels},
                            epsilon=config.epsilon)
