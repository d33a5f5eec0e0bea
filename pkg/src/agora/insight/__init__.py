from .engine import ClusterEngine, EmbeddingSet
from .fcm import (
    DEFAULT_M,
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    K_MAX,
    K_MIN,
    ClusterModel,
    fcm_fit,
    hard_assign,
)
from .labeling import LABEL_SAMPLE_SIZE, ClusterLabel, cluster_members, label_clusters
from .projection import PcaProjector, Projector, ThemeMap, project_2d

__all__ = [
    "EmbeddingSet",
    "ClusterEngine",
    "ClusterModel",
    "fcm_fit",
    "hard_assign",
    "K_MIN",
    "K_MAX",
    "DEFAULT_M",
    "DEFAULT_TOL",
    "DEFAULT_MAX_ITER",
    "ClusterLabel",
    "label_clusters",
    "cluster_members",
    "LABEL_SAMPLE_SIZE",
    "ThemeMap",
    "PcaProjector",
    "Projector",
    "project_2d",
]
