"""Intersection coordination strategies for autonomous vehicles on a grid."""
from .config import ExperimentConfig
from .harness import run_experiment, simulate

__all__ = ["ExperimentConfig", "run_experiment", "simulate"]
__version__ = "0.1.0"
