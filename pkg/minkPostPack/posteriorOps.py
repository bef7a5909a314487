import logging

import numpy as np

from .errors import ValidationError
from .minkowskiLoss import as_loss_order, transform_posteriors

logger = logging.getLogger(__name__)

# stands in for log(0) so DP arithmetic stays finite and totally ordered
LOG_FLOOR = -1e30

ROW_SUM_TOL = 1e-6


def validate_posterior_matrix(p, row_sum_tol=ROW_SUM_TOL):
    """
    Checks a frames x classes posterior matrix and returns it as float64.

    Parameters
    ----------
    p : array_like
        Matrix of per-frame class posteriors.
    row_sum_tol : float, optional (default=1e-6)
        Allowed deviation of every row sum from 1.

    Returns
    -------
    p : numpy.ndarray
        The matrix as a 2D float64 array.

    Raises
    ------
    ValidationError
        If the matrix is not 2D, has no frame, fewer than 2 classes, entries
        outside [0, 1] or a row whose sum is off by more than ``row_sum_tol``.
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 2:
        raise ValidationError(f"posterior matrix must be 2D, got shape {p.shape}")
    frames, classes = p.shape
    if frames < 1:
        raise ValidationError("posterior matrix needs at least one frame")
    if classes < 2:
        raise ValidationError(f"posterior matrix needs at least 2 classes, got {classes}")
    if np.any(np.isnan(p)) or np.any(p < 0.0) or np.any(p > 1.0):
        raise ValidationError("posterior matrix entries must lie in [0, 1]")

    sums = p.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > row_sum_tol)
    if bad.size:
        row = int(bad[0])
        raise ValidationError(f"row {row} of the posterior matrix sums to {sums[row]!r}, not 1")
    return p


def renormalize_rows(p):
    """
    Rescales every row of a nonnegative matrix to sum to 1.

    Parameters
    ----------
    p : array_like
        2D matrix with nonnegative finite entries.

    Returns
    -------
    normalized : numpy.ndarray
        Matrix whose rows sum to 1 within 1e-12.

    Raises
    ------
    ValidationError
        On negative or non-finite entries, or on a row summing to 0.

    Example
    -------
    >>> renormalize_rows([[1, 3]])
    array([[0.25, 0.75]])
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 2:
        raise ValidationError(f"matrix must be 2D, got shape {p.shape}")
    if not np.all(np.isfinite(p)) or np.any(p < 0.0):
        raise ValidationError("matrix entries must be finite and nonnegative")

    sums = p.sum(axis=1, keepdims=True)
    zero_rows = np.flatnonzero(sums[:, 0] <= 0.0)
    if zero_rows.size:
        raise ValidationError(f"row {int(zero_rows[0])} sums to 0 and cannot be renormalized")
    return p / sums


def transform_matrix(p, order, renormalize=True):
    """
    Applies the higher-order Minkowski transform to every posterior of a matrix.

    Parameters
    ----------
    p : array_like
        Valid posterior matrix (frames x classes, rows summing to 1).
    order : int or LossOrder
        Even loss order.
    renormalize : bool, optional (default=True)
        Rescale each transformed row to sum to 1.

    Returns
    -------
    transformed : numpy.ndarray
        Matrix of the same shape. At order 2 this is an exact copy of ``p``.

    Notes
    -----
    - The scalar transform is strictly increasing, so the ranking of the
      classes inside every row, and hence the per-frame argmax, is unchanged.
    - Renormalizing divides a row by a positive constant, which shifts that
      frame's log scores by a constant and cannot change a Viterbi path.
    """
    order = as_loss_order(order)
    p = validate_posterior_matrix(p)
    if order.value == 2:
        return p.copy()

    transformed = transform_posteriors(p, order)
    if renormalize:
        transformed = renormalize_rows(transformed)
    return transformed


def to_log_scores(p, priors=None):
    """
    Converts a (possibly unnormalized) probability matrix to log-domain decoder scores.

    Parameters
    ----------
    p : array_like
        frames x classes matrix of nonnegative probabilities.
    priors : array_like, optional
        Class priors; when given, scores become ``ln p - ln prior`` (the
        hybrid scaled-likelihood convention).

    Returns
    -------
    scores : numpy.ndarray
        Natural-log scores, exact zeros mapped to ``LOG_FLOOR``.

    Raises
    ------
    ValidationError
        On negative or non-finite probabilities, a prior vector whose length
        differs from the number of classes, or a nonpositive prior.
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 2:
        raise ValidationError(f"probability matrix must be 2D, got shape {p.shape}")
    if not np.all(np.isfinite(p)) or np.any(p < 0.0):
        raise ValidationError("probabilities must be finite and nonnegative")

    positive = p > 0.0
    scores = np.full(p.shape, LOG_FLOOR)
    scores[positive] = np.log(p[positive])

    if priors is not None:
        priors = np.asarray(priors, dtype=float)
        if priors.ndim != 1 or priors.shape[0] != p.shape[1]:
            raise ValidationError(f"prior vector has length {priors.size}, expected {p.shape[1]} classes")
        if not np.all(np.isfinite(priors)) or np.any(priors <= 0.0):
            raise ValidationError("class priors must be finite and > 0")
        # floored entries stay floored
        scores = np.where(positive, scores - np.log(priors)[None, :], LOG_FLOOR)
    return scores


def weak_frame_fraction(p, threshold=0.5):
    """Share of frames whose largest posterior is below ``threshold``."""
    p = np.asarray(p, dtype=float)
    return float(np.mean(p.max(axis=1) < threshold))
