"""GloCAL: clustered global/local curriculum learning over a discrete task bank.

Also ships a random curriculum, ALP-GMM, a surrogate learner and an
experiment harness for seeded comparisons.
"""

from .clustering import Cluster, ClusterSet, kmeans_1d, local_tasks, pick_global, select_clusters, silhouette
from .curriculum import CurriculumLog, GlocalConfig, LogEntry, run_glocal, train_until_threshold
from .learner import LearnerConfig, PolicyState, clone_policy, evaluate, evaluate_all, init_prior, train
from .tasks import TaskBank, TaskSpec, build_default_bank

__version__ = "0.1.0"

__all__ = [
    "Cluster", "ClusterSet", "CurriculumLog", "GlocalConfig", "LearnerConfig", "LogEntry",
    "PolicyState", "TaskBank", "TaskSpec", "build_default_bank", "clone_policy", "evaluate",
    "evaluate_all", "init_prior", "kmeans_1d", "local_tasks", "pick_global", "run_glocal",
    "select_clusters", "silhouette", "train", "train_until_threshold",
]
