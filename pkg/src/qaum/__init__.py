"""Single-qubit QAUM and QAOA-embedding variational classifiers on a dense statevector simulator."""

__version__ = "0.1.0"

from .circuits import (
    ModelOutput,
    ParamCircuit,
    build_qaoa_embedding,
    build_qaum,
    evaluate,
    evaluate_batch,
    permute_features,
)
from .data import LabeledDataset, SampleSpec, balanced_sample, fit_scale, load_csv
from .estimators import AngleScaler, QAOAClassifier, QAUMClassifier
from .fourier import FourierSpectrum, extract_spectrum, frequency_multiplicities, verify_truncation
from .gradient import grad_loss, grad_p1
from .statevector import Gate, StateVector, apply_gate, bloch_coordinates, init_zero, prob_one
from .training import TrainConfig, TrainReport, UncertaintyReport, train, uncertainty_protocol

__all__ = [
    "AngleScaler",
    "FourierSpectrum",
    "Gate",
    "LabeledDataset",
    "ModelOutput",
    "ParamCircuit",
    "QAOAClassifier",
    "QAUMClassifier",
    "SampleSpec",
    "StateVector",
    "TrainConfig",
    "TrainReport",
    "UncertaintyReport",
    "apply_gate",
    "balanced_sample",
    "bloch_coordinates",
    "build_qaoa_embedding",
    "build_qaum",
    "evaluate",
    "evaluate_batch",
    "extract_spectrum",
    "fit_scale",
    "frequency_multiplicities",
    "grad_loss",
    "grad_p1",
    "init_zero",
    "load_csv",
    "permute_features",
    "prob_one",
    "train",
    "uncertainty_protocol",
    "verify_truncation",
]
