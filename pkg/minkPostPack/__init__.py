# minkPostPack/__init__.py

# Import all the public functions from the package
from .errors import (MinkowskiError, ValidationError, OddOrderError, FormatError, DataIOError,
                     ConvergenceError, InstanceTooLargeError, EncodingError)
from .utils import format_float, format_table, configure_logging
from .minkowskiLoss import LossOrder, SolverConfig, GradientPolynomial, RootAnalysis
from .minkowskiLoss import expected_loss, gradient_coefficients, evaluate_gradient
from .minkowskiLoss import closed_form_transform, newton_transform, brute_force_transform
from .minkowskiLoss import transform_posteriors, analyze_odd_order, contraction_gap
from .posteriorOps import LOG_FLOOR, transform_matrix, to_log_scores, renormalize_rows
from .posteriorOps import validate_posterior_matrix, weak_frame_fraction
from .viterbiDecoder import HmmModel, DecodingResult, uniform_hmm
from .viterbiDecoder import viterbi_decode, exhaustive_decode, score_path
from .evaluation import WerReport, align, align_and_score, corpus_wer, relative_reduction
from .dataIO import load_posteriors, save_posteriors, load_hmm, save_hmm
from .dataIO import load_transcript, save_transcript, load_priors, save_priors
from .dataIO import CorpusManifest, load_manifest, save_manifest
from .corpusGenerator import NoiseSpec, generate_corpus
from .correspondenceCurves import correspondence_table, plot_correspondence
from .experiment import ExperimentConfig, ExperimentReport, SplitConfig, decode_posteriors
from .experiment import load_experiment_config, run_experiment

# Define __all__ for wildcard imports
__all__ = [
    'MinkowskiError',
    'ValidationError',
    'OddOrderError',
    'FormatError',
    'DataIOError',
    'ConvergenceError',
    'InstanceTooLargeError',
    'EncodingError',
    'format_float',
    'format_table',
    'configure_logging',
    'LossOrder',
    'SolverConfig',
    'GradientPolynomial',
    'RootAnalysis',
    'expected_loss',
    'gradient_coefficients',
    'evaluate_gradient',
    'closed_form_transform',
    'newton_transform',
    'brute_force_transform',
    'transform_posteriors',
    'analyze_odd_order',
    'contraction_gap',
    'LOG_FLOOR',
    'transform_matrix',
    'to_log_scores',
    'renormalize_rows',
    'validate_posterior_matrix',
    'weak_frame_fraction',
    'HmmModel',
    'DecodingResult',
    'uniform_hmm',
    'viterbi_decode',
    'exhaustive_decode',
    'score_path',
    'WerReport',
    'align',
    'align_and_score',
    'corpus_wer',
    'relative_reduction',
    'load_posteriors',
    'save_posteriors',
    'load_hmm',
    'save_hmm',
    'load_transcript',
    'save_transcript',
    'load_priors',
    'save_priors',
    'CorpusManifest',
    'load_manifest',
    'save_manifest',
    'NoiseSpec',
    'generate_corpus',
    'correspondence_table',
    'plot_correspondence',
    'ExperimentConfig',
    'ExperimentReport',
    'SplitConfig',
    'decode_posteriors',
    'load_experiment_config',
    'run_experiment',
]

# Optional metadata for the package
__version__ = '1.0.0'
__author__ = 'RosNaviGator'
