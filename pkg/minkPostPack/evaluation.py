from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

# alignment operations
MATCH = 'match'
SUBSTITUTION = 'sub'
INSERTION = 'ins'
DELETION = 'del'


@dataclass(frozen=True)
class WerReport:
    """
    Error counts of a hypothesis against a reference.

    Attributes
    ----------
    substitutions, deletions, insertions : int
    ref_length : int
        Number of reference tokens, at least 1.
    """

    substitutions: int
    deletions: int
    insertions: int
    ref_length: int

    def __post_init__(self):
        if self.ref_length < 1:
            raise ValidationError("WER needs a reference of at least one token")
        if min(self.substitutions, self.deletions, self.insertions) < 0:
            raise ValidationError("error counts must be nonnegative")
        if self.substitutions + self.deletions > self.ref_length:
            raise ValidationError("substitutions + deletions cannot exceed the reference length")

    @property
    def errors(self):
        return self.substitutions + self.deletions + self.insertions

    @property
    def wer(self):
        """(S + D + I) / N, may exceed 1."""
        return self.errors / self.ref_length

    def as_dict(self):
        return {
            'substitutions': self.substitutions,
            'deletions': self.deletions,
            'insertions': self.insertions,
            'ref_length': self.ref_length,
            'wer': self.wer,
        }


def align(reference, hypothesis):
    """
    Minimum edit distance alignment between two token sequences.

    Parameters
    ----------
    reference : sequence of str
    hypothesis : sequence of str

    Returns
    -------
    alignment : list of tuple
        ``(operation, ref_token, hyp_token)`` in sequence order, operation one
        of ``'match'``, ``'sub'``, ``'ins'``, ``'del'``; the missing side of an
        insertion or deletion is ``None``.

    Notes
    -----
    - Unit cost for substitutions, insertions and deletions.
    - When several optimal alignments exist the backtrace prefers a
      substitution (or match) over an insertion over a deletion, so the
      decomposition of the error count is reproducible.
    """
    reference = list(reference)
    hypothesis = list(hypothesis)
    n, m = len(reference), len(hypothesis)

    # cost[i, j]: distance between reference[:i] and hypothesis[:j]
    cost = np.zeros((n + 1, m + 1), dtype=np.int64)
    cost[:, 0] = np.arange(n + 1)
    cost[0, :] = np.arange(m + 1)
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            diagonal = cost[i - 1, j - 1] + (reference[i - 1] != hypothesis[j - 1])
            cost[i, j] = min(diagonal, cost[i, j - 1] + 1, cost[i - 1, j] + 1)

    alignment = []
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and cost[i, j] == cost[i - 1, j - 1] + (reference[i - 1] != hypothesis[j - 1]):
            op = MATCH if reference[i - 1] == hypothesis[j - 1] else SUBSTITUTION
            alignment.append((op, reference[i - 1], hypothesis[j - 1]))
            i, j = i - 1, j - 1
        elif j > 0 and cost[i, j] == cost[i, j - 1] + 1:
            alignment.append((INSERTION, None, hypothesis[j - 1]))
            j -= 1
        else:
            alignment.append((DELETION, reference[i - 1], None))
            i -= 1

    alignment.reverse()
    return alignment


def align_and_score(reference, hypothesis):
    """
    Word error rate of ``hypothesis`` against ``reference``.

    Returns
    -------
    report : WerReport

    Raises
    ------
    ValidationError
        If the reference is empty.

    Example
    -------
    >>> align_and_score(['a', 'b', 'c'], ['a', 'c']).wer
    0.3333333333333333
    """
    reference = list(reference)
    if not reference:
        raise ValidationError("reference transcript is empty")

    counts = {SUBSTITUTION: 0, INSERTION: 0, DELETION: 0, MATCH: 0}
    for op, _, _ in align(reference, hypothesis):
        counts[op] += 1
    return WerReport(substitutions=counts[SUBSTITUTION], deletions=counts[DELETION],
                     insertions=counts[INSERTION], ref_length=len(reference))


def corpus_wer(pairs):
    """
    Pooled word error rate over (reference, hypothesis) pairs.

    Counts are summed over the corpus and divided by the total reference
    length, so long utterances weigh more than short ones (this is not the
    mean of per-utterance WERs).

    Raises
    ------
    ValidationError
        On an empty corpus or an empty reference.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValidationError("corpus is empty")

    s = d = ins = n = 0
    for reference, hypothesis in pairs:
        report = align_and_score(reference, hypothesis)
        s += report.substitutions
        d += report.deletions
        ins += report.insertions
        n += report.ref_length
    return WerReport(substitutions=s, deletions=d, insertions=ins, ref_length=n)


def relative_reduction(baseline, new):
    """
    Relative WER reduction ``(baseline - new) / baseline``.

    Returns 0.0 when both are 0 and ``None`` when only the baseline is 0.
    """
    if baseline == 0:
        return 0.0 if new == 0 else None
    return (baseline - new) / baseline
