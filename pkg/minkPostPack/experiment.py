import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path

from .corpusGenerator import NoiseSpec, generate_corpus
from .dataIO import (load_hmm, load_manifest, load_posteriors, load_priors, load_transcript, read_json,
                     save_transcript)
from .errors import ValidationError
from .evaluation import corpus_wer, relative_reduction
from .minkowskiLoss import as_loss_order
from .posteriorOps import to_log_scores, transform_matrix, weak_frame_fraction
from .utils import format_float, format_table
from .viterbiDecoder import viterbi_decode

logger = logging.getLogger(__name__)

DEFAULT_ORDERS = (2, 4, 6)

CONFIG_FIELDS = {'hmm', 'num_utterances', 'frames_per_utterance', 'orders', 'renormalize', 'priors',
                 'splits', 'noise'}
SPLIT_FIELDS = {'name', 'noise', 'corpus'}


def decode_posteriors(posteriors, hmm, order, renormalize=True, priors=None):
    """
    Full inference pipeline for one utterance.

    transform -> (renormalize) -> log scores (optionally divided by priors)
    -> Viterbi.

    Returns
    -------
    result : viterbiDecoder.DecodingResult
    """
    transformed = transform_matrix(posteriors, order, renormalize=renormalize)
    scores = to_log_scores(transformed, priors=priors)
    return viterbi_decode(scores, hmm)


@dataclass(frozen=True)
class SplitConfig:
    name: str
    noise: NoiseSpec = None
    corpus: str = None


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Settings of an order-comparison experiment.

    Paths are kept as written in the config document and resolved against
    ``base_dir``, so the echo in the report does not depend on where the
    experiment runs.
    """

    hmm: str
    splits: tuple
    num_utterances: int = 20
    frames_per_utterance: tuple = (10, 20)
    orders: tuple = DEFAULT_ORDERS
    renormalize: bool = True
    priors: str = None
    base_dir: Path = Path('.')

    def __post_init__(self):
        orders = tuple(as_loss_order(o).value for o in self.orders)
        if 2 not in orders:
            raise ValidationError("orders must include the order-2 baseline")
        if len(set(orders)) != len(orders):
            raise ValidationError("orders must be distinct")
        object.__setattr__(self, 'orders', orders)
        if not self.splits:
            raise ValidationError("experiment needs at least one split")
        names = [s.name for s in self.splits]
        if len(set(names)) != len(names):
            raise ValidationError("split names must be unique")
        for split in self.splits:
            if (split.noise is None) == (split.corpus is None):
                raise ValidationError(f"split {split.name!r} needs exactly one of 'noise' or 'corpus'")
        if int(self.num_utterances) != self.num_utterances or self.num_utterances < 1:
            raise ValidationError("num_utterances must be an integer >= 1")
        if not isinstance(self.renormalize, bool):
            raise ValidationError(f"renormalize must be true or false, got {self.renormalize!r}")
        if len(self.frames_per_utterance) != 2:
            raise ValidationError("frames_per_utterance must be [min, max]")

    def resolve(self, path):
        path = Path(path)
        return path if path.is_absolute() else Path(self.base_dir) / path

    def as_dict(self):
        return {
            'hmm': self.hmm,
            'num_utterances': self.num_utterances,
            'frames_per_utterance': list(self.frames_per_utterance),
            'orders': list(self.orders),
            'renormalize': self.renormalize,
            'priors': self.priors,
            'splits': [{'name': s.name,
                        'noise': None if s.noise is None else s.noise.as_dict(),
                        'corpus': s.corpus} for s in self.splits],
        }


def experiment_config_from_dict(document, base_dir='.'):
    """
    Builds an ``ExperimentConfig`` from its JSON document.

    A top-level ``noise`` object is shorthand for a single split named
    ``synthetic``. Unknown keys are rejected.
    """
    if not isinstance(document, dict):
        raise ValidationError("experiment config must be a JSON object")
    unknown = set(document) - CONFIG_FIELDS
    if unknown:
        raise ValidationError(f"unknown experiment config fields: {', '.join(sorted(unknown))}")
    if 'hmm' not in document:
        raise ValidationError("experiment config needs an 'hmm' path")
    if ('splits' in document) == ('noise' in document):
        raise ValidationError("experiment config needs exactly one of 'splits' or 'noise'")

    raw_splits = document['splits'] if 'splits' in document else [{'name': 'synthetic', 'noise': document['noise']}]
    splits = []
    for raw in raw_splits:
        if not isinstance(raw, dict) or 'name' not in raw:
            raise ValidationError("every split needs a 'name'")
        extra = set(raw) - SPLIT_FIELDS
        if extra:
            raise ValidationError(f"unknown split fields: {', '.join(sorted(extra))}")
        noise = None if raw.get('noise') is None else NoiseSpec.from_dict(raw['noise'])
        splits.append(SplitConfig(name=str(raw['name']), noise=noise, corpus=raw.get('corpus')))

    return ExperimentConfig(
        hmm=document['hmm'],
        splits=tuple(splits),
        num_utterances=document.get('num_utterances', 20),
        frames_per_utterance=tuple(document.get('frames_per_utterance', (10, 20))),
        orders=tuple(document.get('orders', DEFAULT_ORDERS)),
        renormalize=document.get('renormalize', True),
        priors=document.get('priors'),
        base_dir=Path(base_dir),
    )


def load_experiment_config(path):
    path = Path(path)
    return experiment_config_from_dict(read_json(path), base_dir=path.parent)


@dataclass(frozen=True)
class OrderResult:
    order: int
    wer: object
    decode_seconds: float


@dataclass(frozen=True)
class SplitResult:
    name: str
    num_utterances: int
    weak_frame_fraction: float
    results: tuple

    def baseline(self):
        return next(r for r in self.results if r.order == 2)

    def relative_reductions(self):
        """Relative WER reduction of every order > 2 against order 2."""
        base = self.baseline().wer.wer
        return {r.order: relative_reduction(base, r.wer.wer) for r in self.results if r.order != 2}


@dataclass(frozen=True)
class ExperimentReport:
    config: dict
    splits: tuple

    def as_dict(self, include_timing=False):
        """Machine-readable report; timings are left out unless asked for, they vary between runs."""
        splits = []
        for split in self.splits:
            reductions = split.relative_reductions()
            orders = []
            for r in split.results:
                entry = {'order': r.order, **r.wer.as_dict(),
                         'relative_reduction': reductions.get(r.order)}
                if include_timing:
                    entry['decode_seconds'] = r.decode_seconds
                orders.append(entry)
            splits.append({'name': split.name, 'num_utterances': split.num_utterances,
                           'weak_frame_fraction': split.weak_frame_fraction, 'orders': orders})
        return {'config': self.config, 'splits': splits}

    def to_json(self, include_timing=False):
        return json.dumps(self.as_dict(include_timing), indent=2, sort_keys=True) + '\n'

    def to_table(self, include_timing=False):
        headers = ['split', 'order', 'S', 'D', 'I', 'N', 'WER', 'rel_reduction']
        if include_timing:
            headers.append('decode_s')
        rows = []
        for split in self.splits:
            reductions = split.relative_reductions()
            for r in split.results:
                row = [split.name, r.order, r.wer.substitutions, r.wer.deletions, r.wer.insertions,
                       r.wer.ref_length, r.wer.wer, reductions.get(r.order, '-')]
                if include_timing:
                    row.append(format(r.decode_seconds, '.3f'))
                rows.append(row)
        return format_table(rows, headers=headers) + '\n'


def _split_corpus(config, split, hmm, out_dir):
    if split.corpus is not None:
        return load_manifest(config.resolve(split.corpus))
    return generate_corpus(hmm, config.num_utterances, config.frames_per_utterance, split.noise,
                           Path(out_dir) / split.name)


def run_experiment(config, out_dir):
    """
    Decodes every utterance of every split at each configured order and scores it.

    The same posterior files are decoded at every order, so the transform is
    the only thing that changes between the rows of a split.

    Parameters
    ----------
    config : ExperimentConfig
    out_dir : str or Path
        Generated corpora go to ``out_dir/<split>/`` and hypotheses to
        ``out_dir/<split>/hyp_order<k>/<utt>.hyp``.

    Returns
    -------
    report : ExperimentReport
    """
    out_dir = Path(out_dir)
    hmm = load_hmm(config.resolve(config.hmm))
    priors = None if config.priors is None else load_priors(config.resolve(config.priors))

    split_results = []
    for split in config.splits:
        manifest = _split_corpus(config, split, hmm, out_dir)
        utterances = [(u.utt_id, load_posteriors(u.posteriors), load_transcript(u.reference))
                      for u in manifest.utterances]
        total_frames = sum(p.shape[0] for _, p, _ in utterances)
        weak = sum(weak_frame_fraction(p) * p.shape[0] for _, p, _ in utterances) / total_frames

        results = []
        for order in config.orders:
            hyp_dir = out_dir / split.name / f'hyp_order{order}'
            hyp_dir.mkdir(parents=True, exist_ok=True)
            start = time.perf_counter()
            pairs = []
            for utt_id, posteriors, reference in utterances:
                decoded = decode_posteriors(posteriors, hmm, order, config.renormalize, priors)
                save_transcript(decoded.token_sequence, hyp_dir / f'{utt_id}.hyp')
                pairs.append((reference, decoded.token_sequence))
                logger.debug("split %s order %d %s: %d tokens", split.name, order, utt_id,
                             len(decoded.token_sequence))
            elapsed = time.perf_counter() - start
            report = corpus_wer(pairs)
            results.append(OrderResult(order=order, wer=report, decode_seconds=elapsed))
            logger.info("split %s order %d: WER %s over %d words", split.name, order,
                        format_float(report.wer), report.ref_length)

        split_results.append(SplitResult(name=split.name, num_utterances=len(utterances),
                                         weak_frame_fraction=weak, results=tuple(results)))

    return ExperimentReport(config=config.as_dict(), splits=tuple(split_results))
