import json

import pytest

from minkPostPack.corpusGenerator import NoiseSpec
from minkPostPack.dataIO import load_manifest, load_transcript
from minkPostPack.errors import OddOrderError, ValidationError
from minkPostPack.evaluation import corpus_wer
from minkPostPack.experiment import (ExperimentConfig, SplitConfig, experiment_config_from_dict,
                                     load_experiment_config, run_experiment)


def write_config(path, document):
    path.write_text(json.dumps(document), encoding='utf-8')
    return path


@pytest.fixture
def noisy_config(tmp_path, hmm_file):
    return write_config(tmp_path / 'experiment.json', {
        'hmm': hmm_file.name,
        'num_utterances': 8,
        'frames_per_utterance': [6, 14],
        'splits': [
            {'name': 'clean', 'noise': {'concentration': 20.0, 'confusion_rate': 0.05, 'seed': 1}},
            {'name': 'other', 'noise': {'concentration': 2.0, 'confusion_rate': 0.4, 'seed': 2}},
        ],
    })


## ------------------------------------------------------------------------------------------------
## configuration
## ------------------------------------------------------------------------------------------------


def test_noise_shorthand_builds_one_split(tmp_path):
    config = experiment_config_from_dict({'hmm': 'hmm.json', 'noise': {'concentration': 3, 'confusion_rate': 0.1}},
                                         base_dir=tmp_path)
    assert [s.name for s in config.splits] == ['synthetic']
    assert config.splits[0].noise == NoiseSpec(3.0, 0.1, seed=0)
    assert config.orders == (2, 4, 6)
    assert config.resolve('hmm.json') == tmp_path / 'hmm.json'


@pytest.mark.parametrize('document, message', [
    ({'hmm': 'h.json', 'noise': {'concentration': 1, 'confusion_rate': 0}, 'beam': 3}, 'unknown experiment'),
    ({'noise': {'concentration': 1, 'confusion_rate': 0}}, "'hmm'"),
    ({'hmm': 'h.json'}, "exactly one of 'splits' or 'noise'"),
    ({'hmm': 'h.json', 'splits': [{'name': 'a'}]}, "exactly one of 'noise' or 'corpus'"),
    ({'hmm': 'h.json', 'splits': [{'noise': {'concentration': 1, 'confusion_rate': 0}}]}, "'name'"),
    ({'hmm': 'h.json', 'splits': [{'name': 'a', 'corpus': 'c', 'weight': 1}]}, 'unknown split fields'),
    ({'hmm': 'h.json', 'splits': [{'name': 'a', 'corpus': 'c'}, {'name': 'a', 'corpus': 'd'}]}, 'unique'),
    ({'hmm': 'h.json', 'noise': {'concentration': 1, 'confusion_rate': 0}, 'orders': [4, 6]}, 'order-2'),
    ({'hmm': 'h.json', 'noise': {'concentration': 1, 'confusion_rate': 0}, 'orders': [2, 4, 4]}, 'distinct'),
    ({'hmm': 'h.json', 'noise': {'concentration': 1, 'confusion_rate': 0}, 'num_utterances': 0}, 'num_utterances'),
    ({'hmm': 'h.json', 'noise': {'concentration': 1, 'confusion_rate': 0}, 'renormalize': 'off'}, 'renormalize'),
    ({'hmm': 'h.json', 'noise': {'concentration': 1, 'confusion_rate': 0}, 'renormalize': 0}, 'renormalize'),
])
def test_config_validation(document, message):
    with pytest.raises(ValidationError, match=message):
        experiment_config_from_dict(document)


def test_config_renormalize_flag():
    noise = {'concentration': 1, 'confusion_rate': 0}
    assert experiment_config_from_dict({'hmm': 'h.json', 'noise': noise}).renormalize is True
    assert experiment_config_from_dict({'hmm': 'h.json', 'noise': noise, 'renormalize': False}).renormalize is False


def test_config_rejects_odd_orders():
    with pytest.raises(OddOrderError):
        ExperimentConfig(hmm='h.json', splits=(SplitConfig('a', corpus='c'),), orders=(2, 3))


def test_config_invalid_json(tmp_path):
    path = tmp_path / 'experiment.json'
    path.write_text('{"hmm": }', encoding='utf-8')
    with pytest.raises(ValidationError, match='invalid JSON'):
        load_experiment_config(path)


## ------------------------------------------------------------------------------------------------
## runs
## ------------------------------------------------------------------------------------------------


def test_noiseless_experiment_has_no_errors(tmp_path, hmm_file):
    path = write_config(tmp_path / 'experiment.json', {
        'hmm': hmm_file.name, 'num_utterances': 5, 'frames_per_utterance': [4, 10],
        'noise': {'concentration': 'inf', 'confusion_rate': 0.0, 'seed': 3},
    })
    report = run_experiment(load_experiment_config(path), tmp_path / 'run')
    document = report.as_dict()
    (split,) = document['splits']
    assert [o['order'] for o in split['orders']] == [2, 4, 6]
    for entry in split['orders']:
        assert entry['wer'] == 0.0
    assert [o['relative_reduction'] for o in split['orders']] == [None, 0.0, 0.0]
    assert split['weak_frame_fraction'] == 0.0


def test_reports_are_byte_identical_across_runs(tmp_path, noisy_config):
    config = load_experiment_config(noisy_config)
    first = run_experiment(config, tmp_path / 'run1')
    second = run_experiment(config, tmp_path / 'run2')
    assert first.to_json() == second.to_json()
    assert first.to_table() == second.to_table()
    assert 'decode_seconds' not in first.to_json()
    assert 'decode_seconds' in first.to_json(include_timing=True)


def test_report_populates_every_split_and_order(tmp_path, noisy_config):
    report = run_experiment(load_experiment_config(noisy_config), tmp_path / 'run')
    document = json.loads(report.to_json())
    assert [s['name'] for s in document['splits']] == ['clean', 'other']
    for split in document['splits']:
        assert split['num_utterances'] == 8
        reductions = {o['order']: o['relative_reduction'] for o in split['orders']}
        assert set(reductions) == {2, 4, 6}
        assert reductions[2] is None
    assert document['config']['hmm'] == 'hmm.json'
    assert document['config']['splits'][1]['noise'] == {'concentration': 2.0, 'confusion_rate': 0.4, 'seed': 2}
    # the noisier split has more weak frames
    assert document['splits'][1]['weak_frame_fraction'] > document['splits'][0]['weak_frame_fraction']

    table = report.to_table()
    assert table.splitlines()[0].split() == ['split', 'order', 'S', 'D', 'I', 'N', 'WER', 'rel_reduction']
    assert len(table.splitlines()) == 1 + 2 * 3


def test_written_hypotheses_rescore_to_the_report(tmp_path, noisy_config):
    out = tmp_path / 'run'
    report = run_experiment(load_experiment_config(noisy_config), out)
    for split in report.splits:
        manifest = load_manifest(out / split.name)
        for result in split.results:
            hyp_dir = out / split.name / f'hyp_order{result.order}'
            pairs = [(load_transcript(u.reference), load_transcript(hyp_dir / f'{u.utt_id}.hyp'))
                     for u in manifest.utterances]
            assert corpus_wer(pairs) == result.wer


def test_existing_corpus_split(tmp_path, hmm_file, noisy_config):
    first = run_experiment(load_experiment_config(noisy_config), tmp_path / 'run')
    path = write_config(tmp_path / 'reuse.json', {
        'hmm': hmm_file.name,
        'splits': [{'name': 'other', 'corpus': 'run/other'}],
    })
    again = run_experiment(load_experiment_config(path), tmp_path / 'rerun')
    assert [r.wer for r in again.splits[0].results] == [r.wer for r in first.splits[1].results]
