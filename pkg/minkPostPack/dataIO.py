"""
Text file formats of the package.

- Posterior matrix: UTF-8 text, first line ``frames classes``, then one line
  per frame with the class probabilities written with 17 significant digits
  and separated by single spaces.
- HMM: JSON document with ``num_states``, ``initial``, ``transitions``,
  ``labels`` and ``state_to_class``; probabilities stored linearly.
- Transcript: one token per line.
- Priors: class prior probabilities on one line, space separated.
- Corpus manifest: JSON document listing utterances and their files.
"""

import json
import logging
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (DataIOError, EncodingError, FormatError, HmmFormatError, MalformedHeaderError,
                     ManifestError, NonNumericTokenError, ProbabilityRangeError, RowCountError,
                     RowLengthError, RowSumError, ValidationError)
from .posteriorOps import ROW_SUM_TOL
from .utils import FLOAT_FORMAT, format_float
from .viterbiDecoder import HmmModel

logger = logging.getLogger(__name__)

HMM_FIELDS = ('num_states', 'initial', 'transitions', 'labels', 'state_to_class')


def _read_text(path):
    try:
        raw = Path(path).read_bytes()
    except OSError as err:
        raise DataIOError(f"cannot read {path}: {err.strerror or err}") from err
    try:
        return raw.decode('utf-8')
    except UnicodeDecodeError as err:
        line = raw.count(b'\n', 0, err.start) + 1
        raise EncodingError(f"invalid UTF-8 byte 0x{raw[err.start]:02x}", path=path, line=line) from None


def _write_text(path, text):
    try:
        Path(path).write_text(text, encoding='utf-8')
    except OSError as err:
        raise DataIOError(f"cannot write {path}: {err.strerror or err}") from err


def read_json(path, error_cls=FormatError):
    """Reads a UTF-8 JSON document; syntax errors become ``error_cls`` with path and line."""
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as err:
        raise error_cls(f"invalid JSON: {err.msg}", path=path, line=err.lineno) from err


def _write_json(path, document):
    _write_text(path, json.dumps(document, indent=2, sort_keys=True) + '\n')


## ------------------------------------------------------------------------------------------------
## POSTERIOR MATRICES
## ------------------------------------------------------------------------------------------------


def parse_posteriors(text, path=None):
    """
    Parses the posterior matrix text format.

    Parameters
    ----------
    text : str
        File content.
    path : str, optional
        Only used in error messages.

    Returns
    -------
    matrix : numpy.ndarray
        frames x classes float64 matrix.

    Raises
    ------
    MalformedHeaderError, RowCountError, RowLengthError, NonNumericTokenError,
    ProbabilityRangeError, RowSumError
        Each carries the 1-based line number of the problem.
    """
    lines = text.split('\n')
    if lines and lines[-1] == '':
        lines.pop()

    header = lines[0].split(' ') if lines else []
    if len(header) != 2:
        raise MalformedHeaderError("header must be 'frames classes'", path=path, line=1)
    try:
        frames, classes = int(header[0]), int(header[1])
    except ValueError:
        raise MalformedHeaderError("header must hold two integers 'frames classes'", path=path, line=1) from None
    if frames < 1 or classes < 2:
        raise MalformedHeaderError(f"need frames >= 1 and classes >= 2, got {frames} {classes}", path=path, line=1)

    body = lines[1:]
    if len(body) != frames:
        raise RowCountError(f"header announces {frames} frames but {len(body)} rows follow",
                            path=path, line=min(len(lines) + 1, frames + 2))

    matrix = np.empty((frames, classes))
    for row, line in enumerate(body):
        lineno = row + 2
        tokens = line.split(' ')
        if len(tokens) != classes:
            raise RowLengthError(f"expected {classes} values, found {len(tokens)}", path=path, line=lineno)
        for col, token in enumerate(tokens):
            try:
                value = float(token)
            except ValueError:
                raise NonNumericTokenError(f"not a decimal number: {token!r}", path=path, line=lineno) from None
            if math.isnan(value) or value < 0.0 or value > 1.0:
                raise ProbabilityRangeError(f"probability {token} outside [0, 1]", path=path, line=lineno)
            matrix[row, col] = value
        total = matrix[row].sum()
        if abs(total - 1.0) > ROW_SUM_TOL:
            raise RowSumError(f"row sums to {format_float(total)}, not 1", path=path, line=lineno)

    return matrix


def load_posteriors(path):
    """Reads a posterior matrix file (see ``parse_posteriors``)."""
    return parse_posteriors(_read_text(path), path=str(path))


def save_posteriors(matrix, path):
    """
    Writes a posterior matrix with 17 significant digits per value.

    ``load_posteriors(path)`` gives back exactly the same doubles.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2:
        raise ValidationError(f"posterior matrix must be 2D, got shape {matrix.shape}")
    try:
        np.savetxt(path, matrix, fmt='%' + FLOAT_FORMAT, delimiter=' ', newline='\n',
                   header=f'{matrix.shape[0]} {matrix.shape[1]}', comments='', encoding='utf-8')
    except OSError as err:
        raise DataIOError(f"cannot write {path}: {err.strerror or err}") from err


## ------------------------------------------------------------------------------------------------
## HMM
## ------------------------------------------------------------------------------------------------


def hmm_from_document(document, path=None):
    """
    Builds an ``HmmModel`` from its JSON document.

    Raises
    ------
    HmmFormatError
        On missing or unknown fields, shape mismatches or non-stochastic rows.
    """
    if not isinstance(document, dict):
        raise HmmFormatError("HMM document must be a JSON object", path=path)
    unknown = sorted(set(document) - set(HMM_FIELDS))
    if unknown:
        raise HmmFormatError(f"unknown HMM fields: {', '.join(unknown)}", path=path)
    missing = [f for f in HMM_FIELDS if f not in document]
    if missing:
        raise HmmFormatError(f"missing HMM fields: {', '.join(missing)}", path=path)

    n = document['num_states']
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise HmmFormatError(f"num_states must be a positive integer, got {n!r}", path=path)
    mapping = document['state_to_class']
    if not isinstance(mapping, list) or not all(isinstance(c, int) and not isinstance(c, bool) for c in mapping):
        raise HmmFormatError("state_to_class must be a list of integers", path=path)
    labels = document['labels']
    if not isinstance(labels, list) or not all(isinstance(label, str) for label in labels):
        raise HmmFormatError("labels must be a list of strings", path=path)
    try:
        initial = np.asarray(document['initial'], dtype=float)
        transitions = np.asarray(document['transitions'], dtype=float)
        state_to_class = np.asarray(mapping, dtype=np.int64)
    except (TypeError, ValueError) as err:
        raise HmmFormatError(f"non-numeric HMM entry: {err}", path=path) from None

    if initial.shape != (n,) or transitions.shape != (n, n):
        raise HmmFormatError(f"initial/transitions do not match num_states={n}", path=path)
    if np.any(initial < 0) or np.any(transitions < 0):
        raise HmmFormatError("probabilities must be nonnegative", path=path)

    try:
        return HmmModel.from_probabilities(initial, transitions, labels, state_to_class)
    except ValidationError as err:
        raise HmmFormatError(str(err), path=path) from None


def hmm_to_document(hmm):
    return {
        'num_states': hmm.num_states,
        'initial': hmm.initial.tolist(),
        'transitions': hmm.transitions.tolist(),
        'labels': list(hmm.state_labels),
        'state_to_class': [int(c) for c in hmm.state_to_class],
    }


def load_hmm(path):
    """Reads an HMM JSON document, converting probabilities to logs."""
    return hmm_from_document(read_json(path, HmmFormatError), path=str(path))


def save_hmm(hmm, path):
    _write_json(path, hmm_to_document(hmm))


## ------------------------------------------------------------------------------------------------
## TRANSCRIPTS AND PRIORS
## ------------------------------------------------------------------------------------------------


def load_transcript(path):
    """Reads a token sequence, one token per line (blank lines ignored)."""
    return [line.strip() for line in _read_text(path).split('\n') if line.strip()]


def save_transcript(tokens, path):
    _write_text(path, ''.join(f'{token}\n' for token in tokens))


def load_priors(path):
    """Reads a class-prior vector (whitespace separated decimals)."""
    tokens = _read_text(path).split()
    try:
        priors = np.array([float(t) for t in tokens])
    except ValueError as err:
        raise NonNumericTokenError(str(err), path=str(path)) from None
    if priors.size == 0:
        raise NonNumericTokenError("prior file is empty", path=str(path))
    return priors


def save_priors(priors, path):
    _write_text(path, ' '.join(format_float(p) for p in np.asarray(priors, dtype=float)) + '\n')


## ------------------------------------------------------------------------------------------------
## CORPUS MANIFEST
## ------------------------------------------------------------------------------------------------


@dataclass(frozen=True)
class UtteranceEntry:
    utt_id: str
    posteriors: Path
    reference: Path


@dataclass(frozen=True)
class CorpusManifest:
    """
    Index of a corpus on disk.

    File paths are absolute in memory and stored relative to ``root`` in the
    manifest file. ``noise``, ``frames_per_utterance`` and ``hmm`` are filled
    for synthetic corpora.
    """

    root: Path
    utterances: tuple
    seed: int = None
    noise: dict = None
    frames_per_utterance: tuple = None
    hmm: Path = None

    def __post_init__(self):
        ids = [u.utt_id for u in self.utterances]
        if len(set(ids)) != len(ids):
            raise ManifestError("utterance ids must be unique")

    @property
    def ids(self):
        return [u.utt_id for u in self.utterances]


MANIFEST_NAME = 'manifest.json'


def save_manifest(manifest, path=None):
    """Writes ``manifest`` (to ``root/manifest.json`` by default) and returns the path."""
    path = Path(manifest.root) / MANIFEST_NAME if path is None else Path(path)
    base = path.parent

    def rel(p):
        return Path(os.path.relpath(p, base)).as_posix()

    document = {
        'seed': manifest.seed,
        'noise': manifest.noise,
        'frames_per_utterance': None if manifest.frames_per_utterance is None else list(manifest.frames_per_utterance),
        'hmm': None if manifest.hmm is None else rel(manifest.hmm),
        'utterances': [{'id': u.utt_id, 'posteriors': rel(u.posteriors), 'reference': rel(u.reference)}
                       for u in manifest.utterances],
    }
    _write_json(path, document)
    return path


def load_manifest(path):
    """
    Reads a corpus manifest and checks that every referenced file exists.

    Raises
    ------
    ManifestError
        On duplicate ids, malformed entries or missing files.
    """
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    document = read_json(path, ManifestError)
    base = path.parent

    if not isinstance(document, dict) or not isinstance(document.get('utterances'), list):
        raise ManifestError("manifest needs an 'utterances' list", path=path)

    entries = []
    for entry in document['utterances']:
        try:
            utt = UtteranceEntry(utt_id=str(entry['id']), posteriors=base / entry['posteriors'],
                                 reference=base / entry['reference'])
        except (KeyError, TypeError):
            raise ManifestError("each utterance needs 'id', 'posteriors' and 'reference'", path=path) from None
        for f in (utt.posteriors, utt.reference):
            if not f.is_file():
                raise ManifestError(f"utterance {utt.utt_id}: missing file {f}", path=path)
        entries.append(utt)

    frames = document.get('frames_per_utterance')
    hmm = document.get('hmm')
    try:
        return CorpusManifest(root=base, utterances=tuple(entries), seed=document.get('seed'),
                              noise=document.get('noise'),
                              frames_per_utterance=None if frames is None else tuple(frames),
                              hmm=None if hmm is None else base / hmm)
    except ManifestError as err:
        raise ManifestError(str(err), path=path) from None
