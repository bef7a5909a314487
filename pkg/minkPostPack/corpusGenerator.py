import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .dataIO import CorpusManifest, UtteranceEntry, save_hmm, save_manifest, save_posteriors, save_transcript
from .errors import ValidationError
from .viterbiDecoder import collapse_labels

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NoiseSpec:
    """
    Error model of the simulated acoustic posteriors.

    Parameters
    ----------
    concentration : float
        Extra Dirichlet mass on the centre class; larger is sharper.
        ``math.inf`` gives one-hot rows.
    confusion_rate : float
        Probability that a frame is centred on a uniformly chosen wrong class.
    seed : int
        Base seed; utterance ``i`` uses ``seed + i``.
    """

    concentration: float
    confusion_rate: float
    seed: int = 0

    def __post_init__(self):
        if math.isnan(self.concentration) or not self.concentration > 0:
            raise ValidationError(f"concentration must be > 0, got {self.concentration!r}")
        if not 0.0 <= self.confusion_rate <= 1.0:
            raise ValidationError(f"confusion_rate must lie in [0, 1], got {self.confusion_rate!r}")
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        object.__setattr__(self, 'seed', int(self.seed))

    def as_dict(self):
        document = asdict(self)
        # JSON has no infinity literal
        if math.isinf(self.concentration):
            document['concentration'] = 'inf'
        return document

    @classmethod
    def from_dict(cls, document):
        unknown = set(document) - {'concentration', 'confusion_rate', 'seed'}
        if unknown:
            raise ValidationError(f"unknown noise fields: {', '.join(sorted(unknown))}")
        try:
            return cls(concentration=float(document['concentration']),
                       confusion_rate=float(document['confusion_rate']), seed=document.get('seed', 0))
        except KeyError as err:
            raise ValidationError(f"noise spec needs {err.args[0]!r}") from None


def utterance_rng(seed, index):
    """PCG64 stream of utterance ``index``; seeds wrap modulo 2**64."""
    return np.random.Generator(np.random.PCG64((seed + index) % 2**64))


def sample_state_path(hmm, frames, rng):
    """
    Samples a state sequence of length ``frames`` from the HMM.

    Returns
    -------
    path : numpy.ndarray
    """
    initial = hmm.initial / hmm.initial.sum()
    transitions = hmm.transitions / hmm.transitions.sum(axis=1, keepdims=True)

    path = np.empty(frames, dtype=np.intp)
    path[0] = rng.choice(hmm.num_states, p=initial)
    for t in range(1, frames):
        path[t] = rng.choice(hmm.num_states, p=transitions[path[t - 1]])
    return path


def simulate_posteriors(true_classes, num_classes, noise, rng):
    """
    Simulates the posterior rows an acoustic model would emit.

    Each frame gets a Dirichlet row with base mass 1 on every class and
    ``noise.concentration`` extra on its centre class. The centre is the
    true class, except with probability ``noise.confusion_rate`` where it is
    a wrong class drawn uniformly.

    Parameters
    ----------
    true_classes : numpy.ndarray
        Column index of the true class of every frame.
    num_classes : int
        Number of posterior columns, at least 2.
    noise : NoiseSpec
    rng : numpy.random.Generator

    Returns
    -------
    posteriors : numpy.ndarray
        frames x num_classes matrix, rows summing to 1.
    """
    frames = len(true_classes)
    posteriors = np.zeros((frames, num_classes))
    for t, true_class in enumerate(true_classes):
        centre = int(true_class)
        if rng.random() < noise.confusion_rate:
            wrong = int(rng.integers(num_classes - 1))
            centre = wrong if wrong < true_class else wrong + 1

        if math.isinf(noise.concentration):
            posteriors[t, centre] = 1.0
        else:
            alpha = np.ones(num_classes)
            alpha[centre] += noise.concentration
            row = rng.dirichlet(alpha)
            posteriors[t] = row / row.sum()
    return posteriors


def generate_corpus(hmm, num_utterances, frames_per_utterance, noise, out_dir, num_classes=None):
    """
    Generates a seeded synthetic corpus and writes it to ``out_dir``.

    For every utterance a state path is sampled from the HMM, its collapsed
    labels become the reference transcript and a posterior matrix is
    simulated around the classes of the path.

    Parameters
    ----------
    hmm : HmmModel
        Model the state paths are drawn from.
    num_utterances : int
        Number of utterances, at least 1.
    frames_per_utterance : tuple of int
        Inclusive (min, max) range of utterance lengths.
    noise : NoiseSpec
        Posterior noise and base seed.
    out_dir : str or Path
        Destination directory, created if needed.
    num_classes : int, optional
        Posterior columns, defaults to ``max(hmm.state_to_class) + 1`` (and at
        least 2).

    Returns
    -------
    manifest : CorpusManifest
        The manifest also written to ``out_dir/manifest.json``.

    Notes
    -----
    - Utterance ``i`` draws from its own PCG64 stream seeded with
      ``noise.seed + i``, so the corpus is identical on every run and
      platform, and utterances can be generated in any order.
    """
    if int(num_utterances) != num_utterances or num_utterances < 1:
        raise ValidationError(f"num_utterances must be an integer >= 1, got {num_utterances!r}")
    lo, hi = (int(v) for v in frames_per_utterance)
    if lo < 1 or hi < lo:
        raise ValidationError(f"frames_per_utterance must satisfy 1 <= min <= max, got {frames_per_utterance!r}")
    min_classes = max(int(hmm.state_to_class.max()) + 1, 2)
    num_classes = min_classes if num_classes is None else int(num_classes)
    if num_classes < min_classes:
        raise ValidationError(f"num_classes must be >= {min_classes}, got {num_classes}")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    hmm_path = out_dir / 'hmm.json'
    save_hmm(hmm, hmm_path)

    width = len(str(num_utterances - 1))
    entries = []
    for i in range(int(num_utterances)):
        rng = utterance_rng(noise.seed, i)
        frames = int(rng.integers(lo, hi + 1))
        path = sample_state_path(hmm, frames, rng)
        posteriors = simulate_posteriors(hmm.state_to_class[path], num_classes, noise, rng)
        reference = collapse_labels(path, hmm.state_labels)

        utt_id = f'utt{i:0{width}d}'
        entry = UtteranceEntry(utt_id=utt_id, posteriors=out_dir / f'{utt_id}.post',
                               reference=out_dir / f'{utt_id}.ref')
        save_posteriors(posteriors, entry.posteriors)
        save_transcript(reference, entry.reference)
        entries.append(entry)
        logger.debug("generated %s: %d frames, %d reference tokens", utt_id, frames, len(reference))

    manifest = CorpusManifest(root=out_dir, utterances=tuple(entries), seed=noise.seed,
                              noise=noise.as_dict(), frames_per_utterance=(lo, hi), hmm=hmm_path)
    save_manifest(manifest)
    logger.info("wrote %d utterances to %s", len(entries), out_dir)
    return manifest
