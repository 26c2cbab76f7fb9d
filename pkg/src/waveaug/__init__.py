"""waveaug: radio IQ dataset synthesis, wavelet detail-coefficient
augmentation, and a small built-in classifier for measuring the benefit."""

from .augment import AugmentationPlan, augment_mw, augment_once, build_augmented_set
from .classifier import IqClassifier, ModelSpec, TrainingConfig, grad_check, train
from .dataset_io import DatasetManifest, merge_sets, read_dataset, write_dataset
from .evaluation import EvaluationReport, evaluate
from .frames import IqFrame, stack_frames
from .synthesis import Profile, rml1024, rml1024_mini, synthesize_dataset
from .wavelets import CoefficientSet, WaveletBasis, basis, decompose, reconstruct

__version__ = "0.1.0"

__all__ = [
    "AugmentationPlan", "CoefficientSet", "DatasetManifest", "EvaluationReport",
    "IqClassifier", "IqFrame", "ModelSpec", "Profile", "TrainingConfig",
    "WaveletBasis", "augment_mw", "augment_once", "basis", "build_augmented_set",
    "decompose", "evaluate", "grad_check", "merge_sets", "read_dataset",
    "reconstruct", "rml1024", "rml1024_mini", "stack_frames", "synthesize_dataset",
    "train", "write_dataset",
]
