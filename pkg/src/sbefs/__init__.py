"""Wrapper feature selection by randomized-subset sequential backward elimination."""

__version__ = "0.1.0"

from .appearance import AppearanceModel, build_model, region_score, region_scores, train_filter
from .classifier import ConfusionCounts, LinearModel, TrainConfig, kfold_confusion, predict, train, uar
from .data import DataError, Dataset, FeatureSubsetView, Standardizer, fit_standardizer, project
from .mutual_info import counter_scores, discretize, entropy, mutual_information, rank_features
from .selector import SelectionConfig, SelectionResult, StepRecord, run_selection
from .synth import SynthSpec, generate

__all__ = [
    "AppearanceModel",
    "ConfusionCounts",
    "DataError",
    "Dataset",
    "FeatureSubsetView",
    "LinearModel",
    "SelectionConfig",
    "SelectionResult",
    "Standardizer",
    "StepRecord",
    "SynthSpec",
    "TrainConfig",
    "build_model",
    "counter_scores",
    "discretize",
    "entropy",
    "fit_standardizer",
    "generate",
    "kfold_confusion",
    "mutual_information",
    "predict",
    "project",
    "rank_features",
    "region_score",
    "region_scores",
    "run_selection",
    "train",
    "train_filter",
    "uar",
]
