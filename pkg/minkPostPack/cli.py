"""
Command-line entry point: ``minkpost <command> ...``.

Commands: transform, curves, decode, score, synth, experiment.
Exit codes: 0 success, 2 usage error, 3 validation error, 4 I/O error,
5 solver failure.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from .correspondenceCurves import correspondence_table, format_correspondence, plot_correspondence
from .corpusGenerator import NoiseSpec, generate_corpus
from .dataIO import load_hmm, load_posteriors, load_priors, load_transcript, save_posteriors, save_transcript
from .errors import ConvergenceError, DataIOError, ValidationError
from .evaluation import align_and_score
from .experiment import DEFAULT_ORDERS, decode_posteriors, load_experiment_config, run_experiment
from .minkowskiLoss import LossOrder
from .posteriorOps import transform_matrix
from .utils import configure_logging, format_float, format_table

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_IO = 4
EXIT_SOLVER = 5


def _on_off(value):
    value = value.lower()
    if value not in ('on', 'off'):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return value == 'on'


def _emit(text, out_path=None):
    if out_path is None:
        sys.stdout.write(text)
    else:
        try:
            Path(out_path).write_text(text, encoding='utf-8')
        except OSError as err:
            raise DataIOError(f"cannot write {out_path}: {err.strerror or err}") from err


## ------------------------------------------------------------------------------------------------
## COMMANDS
## ------------------------------------------------------------------------------------------------


def cmd_transform(args):
    order = LossOrder(args.order)
    posteriors = load_posteriors(args.input)
    transformed = transform_matrix(posteriors, order, renormalize=args.renormalize)
    save_posteriors(transformed, args.out)
    logger.info("transformed %s at order %d -> %s", args.input, order.value, args.out)
    return EXIT_OK


def cmd_curves(args):
    orders = [LossOrder(o).value for o in (args.order or [4, 6])]
    table = correspondence_table(orders, grid_points=args.grid_points)
    if args.format == 'machine':
        header = ' '.join(['mu'] + [f'order{o}' for o in orders])
        text = header + '\n' + ''.join(' '.join(format_float(v) for v in row) + '\n' for row in table)
    else:
        text = format_correspondence(table, orders) + '\n'
    _emit(text, args.out)
    if args.svg is not None:
        svg = Path(args.svg)
        plot_correspondence(table, orders, save_path=str(svg.parent), filename=svg.name)
    return EXIT_OK


def cmd_decode(args):
    order = LossOrder(args.order)
    posteriors = load_posteriors(args.posteriors)
    hmm = load_hmm(args.hmm)
    priors = None if args.priors is None else load_priors(args.priors)
    result = decode_posteriors(posteriors, hmm, order, renormalize=args.renormalize, priors=priors)
    if args.out is None:
        _emit(''.join(f'{token}\n' for token in result.token_sequence))
    else:
        save_transcript(result.token_sequence, args.out)
    logger.info("decoded %s at order %d: %d tokens, log score %s", args.posteriors, order.value,
                len(result.token_sequence), format_float(result.log_score))
    return EXIT_OK


def cmd_score(args):
    report = align_and_score(load_transcript(args.reference), load_transcript(args.hypothesis))
    if args.format == 'machine':
        text = json.dumps(report.as_dict(), indent=2, sort_keys=True) + '\n'
    else:
        text = format_table([[report.substitutions, report.deletions, report.insertions,
                              report.ref_length, report.wer]],
                            headers=['S', 'D', 'I', 'N', 'WER']) + '\n'
    _emit(text, args.out)
    return EXIT_OK


def cmd_synth(args):
    hmm = load_hmm(args.hmm)
    noise = NoiseSpec(concentration=args.concentration, confusion_rate=args.confusion_rate, seed=args.seed)
    manifest = generate_corpus(hmm, args.num_utterances, (args.min_frames, args.max_frames), noise, args.out)
    print(f"{len(manifest.utterances)} utterances written to {args.out}")
    return EXIT_OK


def cmd_experiment(args):
    config = load_experiment_config(args.config)
    out_dir = Path(args.config).parent / 'experiment' if args.out is None else Path(args.out)
    report = run_experiment(config, out_dir)
    document = report.to_json(include_timing=args.timing)
    table = report.to_table(include_timing=args.timing)
    # both renderings are kept next to the hypotheses
    _emit(document, out_dir / 'report.json')
    _emit(table, out_dir / 'report.txt')
    _emit(document if args.format == 'machine' else table)
    return EXIT_OK


## ------------------------------------------------------------------------------------------------
## PARSER
## ------------------------------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog='minkpost',
        description='Higher-order Minkowski loss posterior transform, decoding and scoring.')
    parser.add_argument('-v', '--verbose', action='count', default=0, help='-v for info, -vv for debug logs')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('transform', help='transform a posterior matrix file')
    p.add_argument('input', help='posterior matrix file')
    p.add_argument('--out', required=True, help='output posterior matrix file')
    p.add_argument('--order', type=int, default=4, help='even loss order (default 4)')
    p.add_argument('--renormalize', type=_on_off, default=True, metavar='{on,off}')
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser('curves', help='tabulate transform(mu) over a grid of posteriors')
    p.add_argument('--order', type=int, action='append',
                   help='even loss order, repeat for several columns (default 4 and 6)')
    p.add_argument('--grid-points', type=int, default=101)
    p.add_argument('--out', help='table file (default stdout)')
    p.add_argument('--svg', help='also save an SVG chart to this path')
    p.add_argument('--format', choices=('table', 'machine'), default='table')
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser('decode', help='transform, then Viterbi-decode one posterior file')
    p.add_argument('posteriors', help='posterior matrix file')
    p.add_argument('hmm', help='HMM JSON document')
    p.add_argument('--order', type=int, default=2)
    p.add_argument('--out', help='transcript file (default stdout)')
    p.add_argument('--renormalize', type=_on_off, default=True, metavar='{on,off}')
    p.add_argument('--priors', help='class prior file; scores become ln p - ln prior')
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser('score', help='word error rate of a hypothesis transcript')
    p.add_argument('reference')
    p.add_argument('hypothesis')
    p.add_argument('--out', help='report file (default stdout)')
    p.add_argument('--format', choices=('table', 'machine'), default='table')
    p.set_defaults(func=cmd_score)

    p = sub.add_parser('synth', help='generate a seeded synthetic corpus')
    p.add_argument('hmm', help='HMM JSON document')
    p.add_argument('--out', required=True, help='corpus directory')
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--num-utterances', type=int, default=20)
    p.add_argument('--min-frames', type=int, default=10)
    p.add_argument('--max-frames', type=int, default=20)
    p.add_argument('--concentration', type=float, default=5.0)
    p.add_argument('--confusion-rate', type=float, default=0.3)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser('experiment', help=f'compare orders {DEFAULT_ORDERS} on synthetic corpora')
    p.add_argument('config', help='experiment JSON document')
    p.add_argument('--out', help='working directory (default <config dir>/experiment)')
    p.add_argument('--format', choices=('table', 'machine'), default='table')
    p.add_argument('--timing', action='store_true', help='include decode times (not reproducible)')
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)

    try:
        return args.func(args)
    except ValidationError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConvergenceError as err:
        print(f"solver error: {err}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as err:
        print(f"I/O error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == '__main__':
    sys.exit(main())
