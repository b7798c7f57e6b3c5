"""Mutual information from samples and from exact joint pmfs."""
from __future__ import annotations

import math

import numpy as np


def _codes(labels) -> np.ndarray:
    """Map a sequence of hashable labels (or rows of a 2-D array) to 0..K-1."""
    arr = np.asarray(labels)
    if arr.ndim == 1:
        return np.unique(arr, return_inverse=True)[1].ravel()
    return np.unique(arr, axis=0, return_inverse=True)[1].ravel()


def _h_counts(counts: np.ndarray) -> float:
    counts = counts[counts > 0]
    p = counts / counts.sum()
    return float(-np.sum(p * np.log2(p)))


def plug_in_mi(xs, ys) -> float:
    """Plug-in estimate of I(X ^ Y) in bits from paired samples.

    Relabeling either variable's values does not change the result.
    """
    x = _codes(xs)
    y = _codes(ys)
    if len(x) != len(y):
        raise ValueError("sample lists differ in length")
    if len(x) == 0:
        return 0.0
    joint = x * (int(y.max()) + 1) + y
    mi = _h_counts(np.bincount(x)) + _h_counts(np.bincount(y)) - _h_counts(np.bincount(_codes(joint)))
    return max(mi, 0.0)


def plug_in_bias(xs, ys) -> float:
    """First-order (Miller-Madow) bias of the plug-in MI estimate, in bits.

    Uses observed support sizes: (K_xy - K_x - K_y + 1) / (2 N ln 2).
    """
    x = _codes(xs)
    y = _codes(ys)
    n = len(x)
    if n == 0:
        return 0.0
    kx, ky = len(np.unique(x)), len(np.unique(y))
    kxy = len(np.unique(x * (int(y.max()) + 1) + y))
    return (kxy - kx - ky + 1) / (2 * n * math.log(2))


def exact_mi(px_codes: np.ndarray, py_codes: np.ndarray, weights: np.ndarray) -> float:
    """I(X ^ Y) in bits for a finite ensemble of outcomes with probabilities ``weights``."""
    x = _codes(px_codes)
    y = _codes(py_codes)
    joint = _codes(x * (int(y.max()) + 1) + y)

    def h(c):
        p = np.bincount(c, weights=weights)
        p = p[p > 0]
        return float(-np.sum(p * np.log2(p)))

    return max(h(x) + h(y) - h(joint), 0.0)
