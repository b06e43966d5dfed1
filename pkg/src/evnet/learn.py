"""Maximum-entropy (multinomial logistic) classification over sparse bags of
string features, with stratified cross-validation and P/R/F scoring.

Shared by relation typing and action (sentence) detection.
"""

from __future__ import annotations

import json
import logging
import warnings
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize
import scipy.sparse

logger = logging.getLogger(__name__)


@dataclass
class Instance:
    features: Counter  # sparse multiset of string features
    label: str


@dataclass
class PRF:
    precision: float
    recall: float
    f_score: float


@dataclass
class Classifier:
    classes: list[str]
    weights: list[dict[str, float]]  # per class, only features seen in training
    bias: list[float]
    regularization: float
    trained_on: int
    positive_class: str | None = None
    threshold: float = 0.5
    feature_index: dict[str, int] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self.feature_index:
            feats = sorted({f for w in self.weights for f in w})
            self.feature_index = {f: i for i, f in enumerate(feats)}


def f_score(p: float, r: float) -> float:
    """Harmonic mean of precision and recall; 0 when both are 0."""
    if not (0.0 <= p <= 1.0 and 0.0 <= r <= 1.0):
        raise ValueError(f"precision/recall out of [0,1]: {p}, {r}")
    if p == 0.0 and r == 0.0:
        return 0.0
    return (2.0 * p * r) / (p + r)


def _design_matrix(instances, feature_index):
    rows, cols, vals = [], [], []
    for i, inst in enumerate(instances):
        for feat, count in inst.features.items():
            j = feature_index.get(feat)
            if j is not None:
                rows.append(i)
                cols.append(j)
                vals.append(float(count))
    return scipy.sparse.csr_matrix(
        (vals, (rows, cols)), shape=(len(instances), len(feature_index))
    )


def _objective(wvec, X, y_onehot, l2):
    """Mean negative log-likelihood plus (l2/2)*||W||^2; bias unregularized.

    The mean (rather than the sum) makes the optimum invariant under
    duplicating the training set.
    """
    n, n_feats = X.shape
    n_classes = y_onehot.shape[1]
    W = wvec[: n_classes * n_feats].reshape(n_classes, n_feats)
    b = wvec[n_classes * n_feats :]
    scores = X @ W.T + b  # (n, C)
    scores -= scores.max(axis=1, keepdims=True)
    exp = np.exp(scores)
    probs = exp / exp.sum(axis=1, keepdims=True)
    nll = -np.log(np.maximum((probs * y_onehot).sum(axis=1), 1e-300)).mean()
    obj = nll + 0.5 * l2 * float((W * W).sum())
    delta = (probs - y_onehot) / n  # (n, C)
    grad_W = np.asarray(X.T @ delta).T + l2 * W
    grad_b = delta.sum(axis=0)
    grad = np.concatenate([grad_W.ravel(), grad_b])
    return obj, grad


def train_maxent(
    instances,
    l2: float = 1.0,
    epochs: int = 200,
    seed: int = 0,
    positive_class: str | None = None,
    threshold: float = 0.5,
) -> Classifier:
    """Fit L2-regularized multinomial logistic regression by L-BFGS.

    Deterministic given seed and instance order (the problem is convex; the
    seed only perturbs the start point).
    """
    instances = list(instances)
    labels = sorted({inst.label for inst in instances})
    if len(labels) < 2:
        raise ValueError("degenerate training set: fewer than 2 classes")
    if positive_class is not None and positive_class not in labels:
        raise ValueError(f"positive class {positive_class!r} absent from training labels")
    feats = sorted({f for inst in instances for f in inst.features})
    feature_index = {f: i for i, f in enumerate(feats)}
    class_index = {c: i for i, c in enumerate(labels)}

    X = _design_matrix(instances, feature_index)
    y_onehot = np.zeros((len(instances), len(labels)))
    for i, inst in enumerate(instances):
        y_onehot[i, class_index[inst.label]] = 1.0

    rng = np.random.default_rng(seed)
    w0 = rng.normal(scale=1e-8, size=len(labels) * len(feats) + len(labels))
    result = scipy.optimize.minimize(
        _objective,
        w0,
        args=(X, y_onehot, l2),
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": epochs},
    )
    wvec = result.x
    W = wvec[: len(labels) * len(feats)].reshape(len(labels), len(feats))
    b = wvec[len(labels) * len(feats) :]
    weights = [
        {feats[j]: float(W[c, j]) for j in range(len(feats)) if W[c, j] != 0.0}
        for c in range(len(labels))
    ]
    return Classifier(
        classes=labels,
        weights=weights,
        bias=[float(x) for x in b],
        regularization=l2,
        trained_on=len(instances),
        positive_class=positive_class,
        threshold=threshold,
        feature_index=feature_index,
    )


def predict(clf: Classifier, features) -> np.ndarray:
    """Class probability vector (order = clf.classes); unseen features are
    ignored, an empty bag scores the biases alone."""
    scores = np.array(clf.bias, dtype=float)
    for feat, count in features.items():
        for c, w in enumerate(clf.weights):
            if feat in w:
                scores[c] += w[feat] * count
    scores -= scores.max()
    exp = np.exp(scores)
    return exp / exp.sum()


def decide(clf: Classifier, features, threshold: float | None = None) -> bool:
    """True iff P(positive class) >= threshold.

    Thresholds near 1 realize the accept-only-certain regime; 0.5 is the
    two-class default.
    """
    if clf.positive_class is None:
        raise ValueError("classifier has no positive class configured")
    if threshold is None:
        threshold = clf.threshold
    if not 0.5 <= threshold <= 1.0:
        raise ValueError(f"threshold out of [0.5, 1.0]: {threshold}")
    probs = predict(clf, features)
    return float(probs[clf.classes.index(clf.positive_class)]) >= threshold


def _stratified_folds(instances, k, seed):
    by_label: dict[str, list[int]] = {}
    for i, inst in enumerate(instances):
        by_label.setdefault(inst.label, []).append(i)
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    for label in sorted(by_label):
        idxs = by_label[label]
        rng.shuffle(idxs)
        for pos, i in enumerate(idxs):
            folds[pos % k].append(i)
    return folds


def cross_validate(
    instances,
    k: int = 5,
    positive_class: str | None = None,
    seed: int = 0,
    l2: float = 1.0,
    epochs: int = 200,
    threshold: float = 0.5,
) -> PRF:
    """Stratified k-fold CV; micro-averaged P/R/F for the positive class over
    held-out predictions (positive iff P(positive) >= threshold)."""
    instances = list(instances)
    if k < 2:
        raise ValueError(f"k must be >= 2: {k}")
    if len(instances) < k:
        raise ValueError(f"need at least k={k} instances, got {len(instances)}")
    if positive_class is None:
        raise ValueError("positive_class is required")
    folds = _stratified_folds(instances, k, seed)
    tp = fp = fn = 0
    for fold_idx, heldout in enumerate(folds):
        train_idx = [i for f, fold in enumerate(folds) if f != fold_idx for i in fold]
        train_set = [instances[i] for i in train_idx]
        if len({inst.label for inst in train_set}) < 2:
            warnings.warn(f"fold {fold_idx}: training split lacks a class, fold skipped")
            continue
        clf = train_maxent(train_set, l2=l2, epochs=epochs, seed=seed,
                           positive_class=positive_class)
        for i in heldout:
            inst = instances[i]
            predicted = decide(clf, inst.features, threshold=threshold)
            actual = inst.label == positive_class
            if predicted and actual:
                tp += 1
            elif predicted and not actual:
                fp += 1
            elif actual:
                fn += 1
    p = tp / (tp + fp) if (tp + fp) else 0.0
    r = tp / (tp + fn) if (tp + fn) else 0.0
    return PRF(precision=p, recall=r, f_score=f_score(p, r))


def save_classifier(clf: Classifier, path) -> None:
    payload = {
        "classes": clf.classes,
        "weights": clf.weights,
        "bias": clf.bias,
        "regularization": clf.regularization,
        "trained_on": clf.trained_on,
        "positive_class": clf.positive_class,
        "threshold": clf.threshold,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def load_classifier(path) -> Classifier:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    return Classifier(
        classes=payload["classes"],
        weights=payload["weights"],
        bias=payload["bias"],
        regularization=payload["regularization"],
        trained_on=payload["trained_on"],
        positive_class=payload.get("positive_class"),
        threshold=payload.get("threshold", 0.5),
    )
