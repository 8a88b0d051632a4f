"""Accuracy scoring of prediction files against dataset labels.

Predictions at or above the threshold classify as positive (ties count
positive).  This module is the authoritative accuracy computation for all
acceptance checks.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .datafmt import DatasetReader, check_alignment, read_predictions
from .errors import AlignmentError


@dataclass(frozen=True)
class EvalReport:
    n: int
    tp: int
    tn: int
    fp: int
    fn: int
    threshold: float

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.n

    @property
    def tpr(self) -> float | None:
        pos = self.tp + self.fn
        return self.tp / pos if pos else None

    @property
    def tnr(self) -> float | None:
        neg = self.tn + self.fp
        return self.tn / neg if neg else None

    def to_dict(self) -> dict:
        low, high = accuracy_ci(self)
        return {
            "n": self.n, "threshold": self.threshold,
            "accuracy": self.accuracy, "tpr": self.tpr, "tnr": self.tnr,
            "tp": self.tp, "tn": self.tn, "fp": self.fp, "fn": self.fn,
            "ci95": [low, high],
        }


def evaluate(labels: np.ndarray, predictions: np.ndarray,
             threshold: float = 0.5) -> EvalReport:
    labels = np.asarray(labels)
    predictions = np.asarray(predictions)
    if labels.shape != predictions.shape:
        raise AlignmentError(f"{labels.size} labels vs {predictions.size} predictions")
    if labels.size == 0:
        raise AlignmentError("cannot evaluate an empty dataset")
    positive = predictions >= threshold
    truth = labels == 1
    tp = int(np.sum(positive & truth))
    tn = int(np.sum(~positive & ~truth))
    fp = int(np.sum(positive & ~truth))
    fn = int(np.sum(~positive & truth))
    return EvalReport(labels.size, tp, tn, fp, fn, threshold)


def evaluate_files(data_path: str | os.PathLike, pred_path: str | os.PathLike,
                   threshold: float = 0.5) -> EvalReport:
    predictions = read_predictions(pred_path)
    with DatasetReader(data_path) as reader:
        check_alignment(reader.header, predictions)
        labels = reader.labels().copy()
    return evaluate(labels, predictions, threshold)


def accuracy_ci(report: EvalReport | tuple[float, int]) -> tuple[float, float]:
    """95% normal-approximation interval for the accuracy, clipped to [0, 1]."""
    if isinstance(report, EvalReport):
        acc, n = report.accuracy, report.n
    else:
        acc, n = report
    half = 1.96 * math.sqrt(acc * (1.0 - acc) / n)
    return max(0.0, acc - half), min(1.0, acc + half)
