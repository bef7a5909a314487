import itertools
import logging
from dataclasses import dataclass

import numpy as np

from .errors import InstanceTooLargeError, ValidationError
from .posteriorOps import LOG_FLOOR

logger = logging.getLogger(__name__)

STOCHASTIC_TOL = 1e-6

# exhaustive_decode refuses instances with more state paths than this
MAX_EXHAUSTIVE_PATHS = 10**7

_EXHAUSTIVE_CHUNK = 1 << 16

# scores within TIE_RTOL * max(1, |best|) of the best one count as ties
TIE_RTOL = 1e-11


def _tie_band(best):
    return TIE_RTOL * np.maximum(1.0, np.abs(best))


def _first_near_max(values, axis=None):
    """Lowest index whose value ties with the maximum along ``axis``."""
    best = values.max(axis=axis, keepdims=True)
    return np.argmax(values >= best - _tie_band(best), axis=axis)


def _safe_log(probabilities):
    probabilities = np.asarray(probabilities, dtype=float)
    out = np.full(probabilities.shape, LOG_FLOOR)
    positive = probabilities > 0.0
    out[positive] = np.log(probabilities[positive])
    return out


@dataclass(frozen=True, eq=False)
class HmmModel:
    """
    Small HMM used to decode posterior matrices.

    Attributes
    ----------
    num_states : int
    log_initial : numpy.ndarray
        (num_states,) natural-log initial distribution.
    log_transitions : numpy.ndarray
        (num_states, num_states) natural-log transition matrix, row = source.
    state_labels : tuple of str
        Output token emitted by each state.
    state_to_class : numpy.ndarray
        Posterior-matrix column scored by each state.

    Zero probabilities are stored as ``LOG_FLOOR``.
    """

    num_states: int
    log_initial: np.ndarray
    log_transitions: np.ndarray
    state_labels: tuple
    state_to_class: np.ndarray

    def __post_init__(self):
        n = self.num_states
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
            raise ValidationError(f"num_states must be a positive integer, got {n!r}")

        log_initial = np.asarray(self.log_initial, dtype=float)
        log_transitions = np.asarray(self.log_transitions, dtype=float)
        state_to_class = np.asarray(self.state_to_class)
        labels = tuple(self.state_labels)

        if log_initial.shape != (n,):
            raise ValidationError(f"initial distribution has shape {log_initial.shape}, expected ({n},)")
        if log_transitions.shape != (n, n):
            raise ValidationError(f"transition matrix has shape {log_transitions.shape}, expected ({n}, {n})")
        if len(labels) != n:
            raise ValidationError(f"{len(labels)} state labels given for {n} states")
        if state_to_class.shape != (n,) or (n and not np.issubdtype(state_to_class.dtype, np.integer)):
            raise ValidationError(f"state_to_class must be {n} integer column indices")
        if np.any(state_to_class < 0):
            raise ValidationError("state_to_class entries must be >= 0")

        initial_sum = np.exp(log_initial).sum()
        if abs(initial_sum - 1.0) > STOCHASTIC_TOL:
            raise ValidationError(f"initial distribution sums to {initial_sum!r}, not 1")
        row_sums = np.exp(log_transitions).sum(axis=1)
        bad = np.flatnonzero(np.abs(row_sums - 1.0) > STOCHASTIC_TOL)
        if bad.size:
            raise ValidationError(f"transition row {int(bad[0])} sums to {row_sums[bad[0]]!r}, not 1")

        object.__setattr__(self, 'num_states', int(n))
        object.__setattr__(self, 'log_initial', log_initial)
        object.__setattr__(self, 'log_transitions', log_transitions)
        object.__setattr__(self, 'state_labels', labels)
        object.__setattr__(self, 'state_to_class', state_to_class.astype(np.intp))

    @classmethod
    def from_probabilities(cls, initial, transitions, labels, state_to_class):
        """Builds a model from linear-domain probabilities."""
        initial = np.asarray(initial, dtype=float)
        return cls(num_states=initial.shape[0], log_initial=_safe_log(initial),
                   log_transitions=_safe_log(transitions), state_labels=tuple(labels),
                   state_to_class=np.asarray(state_to_class, dtype=np.intp))

    @property
    def initial(self):
        return np.exp(self.log_initial)

    @property
    def transitions(self):
        return np.exp(self.log_transitions)


def uniform_hmm(num_states, labels=None, state_to_class=None):
    """
    HMM with uniform initial and transition probabilities.

    Decoding with it reduces to a per-frame argmax, since every path pays the
    same transition cost.
    """
    labels = [str(s) for s in range(num_states)] if labels is None else labels
    state_to_class = np.arange(num_states) if state_to_class is None else state_to_class
    initial = np.full(num_states, 1.0 / num_states)
    transitions = np.full((num_states, num_states), 1.0 / num_states)
    return HmmModel.from_probabilities(initial, transitions, labels, state_to_class)


@dataclass(frozen=True, eq=False)
class DecodingResult:
    state_path: np.ndarray
    token_sequence: list
    log_score: float


def collapse_labels(state_path, labels):
    """Maps a state path to tokens, merging consecutive identical labels."""
    return [label for label, _ in itertools.groupby(labels[s] for s in state_path)]


def _emissions(scores, hmm):
    scores = np.asarray(scores, dtype=float)
    if scores.ndim != 2 or scores.shape[0] < 1:
        raise ValidationError(f"score matrix must be 2D with at least one frame, got shape {scores.shape}")
    if int(hmm.state_to_class.max()) >= scores.shape[1]:
        raise ValidationError(
            f"state_to_class refers to column {int(hmm.state_to_class.max())} "
            f"but the score matrix has {scores.shape[1]} classes")
    # frames x states
    return scores[:, hmm.state_to_class]


def viterbi_decode(scores, hmm):
    """
    Finds the most probable HMM state path for a matrix of log scores.

    Parameters
    ----------
    scores : numpy.ndarray
        frames x classes log-domain scores (see ``posteriorOps.to_log_scores``).
    hmm : HmmModel
        Model whose ``state_to_class`` selects the scored column of each state.

    Returns
    -------
    result : DecodingResult
        Best state path, collapsed token sequence and total log score.

    Raises
    ------
    ValidationError
        If ``state_to_class`` addresses a column missing from ``scores``.

    Notes
    -----
    - Exact dynamic programming, no pruning.
    - Ties prefer the lower state index: for the final state and for every
      back-pointer. Among equally scored paths this returns the one that is
      smallest when compared from the last frame backwards, which is the rule
      ``exhaustive_decode`` applies.
    - Scores within ``TIE_RTOL`` (relative) of the best count as equal, so
      paths that tie in exact arithmetic stay tied after rounding, e.g. when
      a constant is added to a frame.
    - Scores accumulate as ``(delta + transition) + emission``, the same
      order ``score_path`` uses, so the reported score is reproducible
      bit-for-bit.
    """
    emissions = _emissions(scores, hmm)
    frames, n_states = emissions.shape

    backpointers = np.zeros((frames, n_states), dtype=np.intp)
    delta = hmm.log_initial + emissions[0]
    for t in range(1, frames):
        # candidates[i, j]: best path ending in i at t-1, then i -> j
        candidates = delta[:, None] + hmm.log_transitions
        backpointers[t] = _first_near_max(candidates, axis=0)
        delta = candidates[backpointers[t], np.arange(n_states)] + emissions[t]

    path = np.empty(frames, dtype=np.intp)
    path[-1] = int(_first_near_max(delta))
    for t in range(frames - 1, 0, -1):
        path[t - 1] = backpointers[t, path[t]]

    return DecodingResult(state_path=path, token_sequence=collapse_labels(path, hmm.state_labels),
                          log_score=float(delta[path[-1]]))


def score_path(path, scores, hmm):
    """
    Total log probability of a given state path.

    ``log_initial[path[0]]`` plus every transition and emission term along
    the path.

    Raises
    ------
    ValidationError
        If the path length differs from the number of frames or a state
        index is out of range.
    """
    emissions = _emissions(scores, hmm)
    path = np.asarray(path)
    if path.shape != (emissions.shape[0],):
        raise ValidationError(f"path has length {path.size}, expected {emissions.shape[0]} frames")
    if path.size and (not np.issubdtype(path.dtype, np.integer) or path.min() < 0 or path.max() >= hmm.num_states):
        raise ValidationError(f"path contains invalid state indices (model has {hmm.num_states} states)")

    total = hmm.log_initial[path[0]] + emissions[0, path[0]]
    for t in range(1, path.size):
        total = (total + hmm.log_transitions[path[t - 1], path[t]]) + emissions[t, path[t]]
    return float(total)


def exhaustive_decode(scores, hmm):
    """
    Scores every possible state path and returns the best one (test oracle).

    Paths are enumerated in vectorized chunks. Among equally scored paths the
    one smallest when compared from the last frame backwards wins, matching
    ``viterbi_decode``.

    Raises
    ------
    InstanceTooLargeError
        If ``num_states ** frames`` exceeds ``MAX_EXHAUSTIVE_PATHS``.
    """
    emissions = _emissions(scores, hmm)
    frames, n_states = emissions.shape
    n_paths = n_states**frames
    if n_paths > MAX_EXHAUSTIVE_PATHS:
        raise InstanceTooLargeError(
            f"{n_states}**{frames} = {n_paths} paths exceed the exhaustive guard of {MAX_EXHAUSTIVE_PATHS}")

    # frame 0 is the most significant digit of the path index
    place = n_states**np.arange(frames - 1, -1, -1, dtype=np.int64)

    # every path tying with the running maximum is kept until the end
    best_score = -np.inf
    tied_scores = np.empty(0)
    tied_paths = np.empty((0, frames), dtype=np.int64)
    for start in range(0, n_paths, _EXHAUSTIVE_CHUNK):
        index = np.arange(start, min(start + _EXHAUSTIVE_CHUNK, n_paths), dtype=np.int64)
        paths = (index[:, None] // place[None, :]) % n_states

        totals = hmm.log_initial[paths[:, 0]] + emissions[0, paths[:, 0]]
        for t in range(1, frames):
            totals = (totals + hmm.log_transitions[paths[:, t - 1], paths[:, t]]) + emissions[t, paths[:, t]]

        best_score = max(best_score, float(totals.max()))
        cutoff = best_score - _tie_band(best_score)
        near = totals >= cutoff
        tied_scores = np.concatenate([tied_scores, totals[near]])
        tied_paths = np.vstack([tied_paths, paths[near]])
        keep = tied_scores >= cutoff
        tied_scores, tied_paths = tied_scores[keep], tied_paths[keep]

    # lexsort keys: last row is the primary key, i.e. the last frame
    winner = np.lexsort(tied_paths.T)[0]
    best_path = tied_paths[winner].astype(np.intp)
    return DecodingResult(state_path=best_path, token_sequence=collapse_labels(best_path, hmm.state_labels),
                          log_score=float(tied_scores[winner]))
