"""scikit-learn wrappers: angle scaler and the two variational classifiers.

These compose with ``Pipeline``, ``clone`` and ``GridSearchCV``::

    from sklearn.pipeline import make_pipeline
    model = make_pipeline(AngleScaler(), QAUMClassifier(repetitions=2, random_state=0))
    model.fit(X, y).score(X_test, y_test)
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.multiclass import check_classification_targets
from sklearn.utils.validation import check_is_fitted, validate_data

from .circuits import bloch_batch, build_qaoa_embedding, build_qaum, evaluate_batch
from .data import scale_features
from .exceptions import ConfigurationError, DegenerateScaleError
from .training import init_weights, optimize


class AngleScaler(TransformerMixin, BaseEstimator):
    """Min-max scale every column onto ``[0, pi]``.

    ``clip=True`` clamps transformed held-out values that fall outside the
    fitted range.
    """

    def __init__(self, clip=False):
        self.clip = clip

    def fit(self, X, y=None):
        X = validate_data(self, X, dtype=float)
        lo, hi = X.min(axis=0), X.max(axis=0)
        flat = np.flatnonzero(hi <= lo)
        if flat.size:
            raise DegenerateScaleError(f"constant feature column(s) {flat.tolist()}")
        self.scaling_ = np.column_stack([lo, hi])
        return self

    def transform(self, X):
        check_is_fitted(self, "scaling_")
        X = validate_data(self, X, dtype=float, reset=False)
        out = scale_features(X, self.scaling_)
        return np.clip(out, 0.0, np.pi) if self.clip else out


class _VariationalClassifier(ClassifierMixin, BaseEstimator):
    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.classifier_tags.multi_class = False
        return tags

    def _build(self, n_features):
        raise NotImplementedError

    def fit(self, X, y):
        X, y = validate_data(self, X, y, dtype=float)
        check_classification_targets(y)
        self.classes_, y_idx = np.unique(y, return_inverse=True)
        if len(self.classes_) != 2:
            raise ConfigurationError(
                f"Only binary classification is supported. Got {len(self.classes_)} classes."
            )
        if self.epochs < 1:
            raise ConfigurationError("epochs must be >= 1")
        seed = 0 if self.random_state is None else int(self.random_state)
        self.circuit_ = self._build(X.shape[1])
        w0 = init_weights(self.circuit_.n_weights, seed)
        self.weights_, self.loss_curve_ = optimize(
            self.circuit_,
            X,
            y_idx,
            w0,
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            clamp_epsilon=self.clamp_epsilon,
            method=self.gradient_method,
        )
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "weights_")
        X = validate_data(self, X, dtype=float, reset=False)
        p1 = evaluate_batch(self.circuit_, self.weights_, X)
        return np.column_stack([1.0 - p1, p1])

    def predict(self, X):
        p1 = self.predict_proba(X)[:, 1]
        return self.classes_[(p1 > 0.5).astype(int)]


class QAUMClassifier(_VariationalClassifier):
    """Single-qubit classifier: every feature is an ``RZ`` angle between
    general trainable rotations, repeated ``repetitions`` times.

    Inputs are expected in ``[0, pi]`` (see :class:`AngleScaler`).
    """

    def __init__(self, repetitions=2, learning_rate=0.1, epochs=150, clamp_epsilon=1e-7,
                 gradient_method="auto", random_state=None):
        self.repetitions = repetitions
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.clamp_epsilon = clamp_epsilon
        self.gradient_method = gradient_method
        self.random_state = random_state

    def _build(self, n_features):
        return build_qaum(n_features, self.repetitions)

    def bloch_vectors(self, X):
        """Bloch vector of the final state for each row of ``X``."""
        check_is_fitted(self, "weights_")
        X = validate_data(self, X, dtype=float, reset=False)
        return bloch_batch(self.circuit_, self.weights_, X)


class QAOAClassifier(_VariationalClassifier):
    """QAOA-embedding baseline on ``n_wires`` qubits, read out on wire 0."""

    def __init__(self, repetitions=1, n_wires=9, learning_rate=0.1, epochs=150, clamp_epsilon=1e-7,
                 gradient_method="auto", random_state=None):
        self.repetitions = repetitions
        self.n_wires = n_wires
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.clamp_epsilon = clamp_epsilon
        self.gradient_method = gradient_method
        self.random_state = random_state

    def _build(self, n_features):
        return build_qaoa_embedding(self.n_wires, n_features, self.repetitions)
