import json

import numpy as np
import pytest

from conftest import random_posteriors
from minkPostPack.dataIO import (CorpusManifest, UtteranceEntry, load_hmm, load_manifest, load_posteriors,
                                 load_priors, load_transcript, parse_posteriors, save_hmm, save_manifest,
                                 save_posteriors, save_priors, save_transcript)
from minkPostPack.errors import (DataIOError, EncodingError, HmmFormatError, MalformedHeaderError,
                                 ManifestError, NonNumericTokenError, ProbabilityRangeError, RowCountError,
                                 RowLengthError, RowSumError)
from minkPostPack.viterbiDecoder import uniform_hmm


## ------------------------------------------------------------------------------------------------
## posterior matrices
## ------------------------------------------------------------------------------------------------


def test_parse_example_file():
    np.testing.assert_array_equal(parse_posteriors("1 2\n0.5 0.5\n"), [[0.5, 0.5]])


def test_parse_accepts_missing_final_newline():
    np.testing.assert_array_equal(parse_posteriors("2 2\n0.5 0.5\n1 0"), [[0.5, 0.5], [1.0, 0.0]])


@pytest.mark.parametrize('text, error, line', [
    ("1 2\n0.7 0.2\n", RowSumError, 2),
    ("2 2\n0.5 0.5\n0.7 0.2\n", RowSumError, 3),
    ("1\n0.5 0.5\n", MalformedHeaderError, 1),
    ("one two\n0.5 0.5\n", MalformedHeaderError, 1),
    ("1 1\n1\n", MalformedHeaderError, 1),
    ("", MalformedHeaderError, 1),
    ("2 2\n0.5 0.5\n", RowCountError, 3),
    ("1 3\n0.5 0.5\n", RowLengthError, 2),
    ("1 2\n0.5  0.5\n", RowLengthError, 2),
    ("1 2\n0.5 half\n", NonNumericTokenError, 2),
    ("1 2\n1.5 -0.5\n", ProbabilityRangeError, 2),
])
def test_parse_errors_carry_line_numbers(text, error, line):
    with pytest.raises(error) as excinfo:
        parse_posteriors(text, path='utt.post')
    assert excinfo.value.line == line
    assert str(excinfo.value).startswith(f'utt.post:{line}: ')


def test_row_sum_error_is_a_value_error():
    with pytest.raises(ValueError):
        parse_posteriors("1 2\n0.7 0.2\n")


def test_save_load_round_trip_is_exact(tmp_path):
    rng = np.random.default_rng(50)
    matrix = random_posteriors(rng, 50, 10)
    path = tmp_path / 'm.post'
    save_posteriors(matrix, path)
    np.testing.assert_array_equal(load_posteriors(path), matrix)


def test_saved_file_layout(tmp_path):
    path = tmp_path / 'm.post'
    save_posteriors([[0.5, 0.5], [0.1, 0.9]], path)
    assert path.read_text(encoding='utf-8') == "2 2\n0.5 0.5\n0.10000000000000001 0.90000000000000002\n"


def test_load_missing_file(tmp_path):
    with pytest.raises(DataIOError):
        load_posteriors(tmp_path / 'nope.post')


def test_invalid_utf8_reports_the_line(tmp_path):
    path = tmp_path / 'utt.post'
    path.write_bytes(b"2 2\n0.5 0.5\n0.5 0\xe9.5\n")
    with pytest.raises(EncodingError) as excinfo:
        load_posteriors(path)
    assert excinfo.value.line == 3
    assert str(excinfo.value).startswith(f'{path}:3: invalid UTF-8 byte 0xe9')

    hmm = tmp_path / 'hmm.json'
    hmm.write_bytes(b'{"labels": ["\xff"]}')
    with pytest.raises(EncodingError):
        load_hmm(hmm)


## ------------------------------------------------------------------------------------------------
## HMM documents
## ------------------------------------------------------------------------------------------------


def hmm_document(**overrides):
    document = {'num_states': 2, 'initial': [0.5, 0.5], 'transitions': [[0.5, 0.5], [0.5, 0.5]],
                'labels': ['a', 'b'], 'state_to_class': [0, 1]}
    document.update(overrides)
    return document


def write_json(path, document):
    path.write_text(json.dumps(document), encoding='utf-8')
    return path


def test_load_uniform_hmm(tmp_path):
    hmm = load_hmm(write_json(tmp_path / 'hmm.json', hmm_document()))
    np.testing.assert_allclose(hmm.log_transitions, np.log(0.5))
    assert hmm.state_labels == ('a', 'b')


def test_hmm_round_trip(tmp_path, three_word_hmm):
    path = tmp_path / 'hmm.json'
    save_hmm(three_word_hmm, path)
    loaded = load_hmm(path)
    np.testing.assert_allclose(loaded.log_transitions, three_word_hmm.log_transitions, atol=1e-12)
    np.testing.assert_allclose(loaded.log_initial, three_word_hmm.log_initial, atol=1e-12)
    np.testing.assert_array_equal(loaded.state_to_class, three_word_hmm.state_to_class)
    assert loaded.state_labels == three_word_hmm.state_labels


def test_hmm_row_sum_error_names_the_row(tmp_path):
    path = write_json(tmp_path / 'hmm.json', hmm_document(transitions=[[0.5, 0.5], [0.4, 0.4]]))
    with pytest.raises(HmmFormatError, match='transition row 1'):
        load_hmm(path)


@pytest.mark.parametrize('overrides, message', [
    ({'extra': 1}, 'unknown HMM fields: extra'),
    ({'num_states': 3}, 'num_states=3'),
    ({'num_states': 0}, 'positive integer'),
    ({'state_to_class': [0, 1.5]}, 'list of integers'),
    ({'labels': ['a', 2]}, 'list of strings'),
    ({'initial': [1.2, -0.2]}, 'nonnegative'),
    ({'labels': ['a']}, 'state labels'),
])
def test_hmm_document_errors(tmp_path, overrides, message):
    path = write_json(tmp_path / 'hmm.json', hmm_document(**overrides))
    with pytest.raises(HmmFormatError, match=message):
        load_hmm(path)


def test_hmm_missing_field(tmp_path):
    document = hmm_document()
    del document['labels']
    with pytest.raises(HmmFormatError, match='missing HMM fields: labels'):
        load_hmm(write_json(tmp_path / 'hmm.json', document))


def test_hmm_invalid_json_reports_line(tmp_path):
    path = tmp_path / 'hmm.json'
    path.write_text('{\n  "num_states": 2,\n  oops\n}\n', encoding='utf-8')
    with pytest.raises(HmmFormatError) as excinfo:
        load_hmm(path)
    assert excinfo.value.line == 3


## ------------------------------------------------------------------------------------------------
## transcripts and priors
## ------------------------------------------------------------------------------------------------


def test_transcript_round_trip(tmp_path):
    path = tmp_path / 'utt.ref'
    save_transcript(['yes', 'no', 'yes'], path)
    assert path.read_text(encoding='utf-8') == 'yes\nno\nyes\n'
    assert load_transcript(path) == ['yes', 'no', 'yes']


def test_empty_transcript(tmp_path):
    path = tmp_path / 'utt.hyp'
    save_transcript([], path)
    assert load_transcript(path) == []


def test_priors_round_trip(tmp_path):
    path = tmp_path / 'priors.txt'
    priors = np.array([0.2, 0.3, 0.5])
    save_priors(priors, path)
    np.testing.assert_array_equal(load_priors(path), priors)


@pytest.mark.parametrize('text', ['', '0.5 x\n'])
def test_priors_errors(tmp_path, text):
    path = tmp_path / 'priors.txt'
    path.write_text(text, encoding='utf-8')
    with pytest.raises(NonNumericTokenError):
        load_priors(path)


## ------------------------------------------------------------------------------------------------
## manifests
## ------------------------------------------------------------------------------------------------


def small_corpus(root):
    entries = []
    for utt_id in ('u0', 'u1'):
        entry = UtteranceEntry(utt_id, root / f'{utt_id}.post', root / f'{utt_id}.ref')
        save_posteriors([[1.0, 0.0]], entry.posteriors)
        save_transcript(['0'], entry.reference)
        entries.append(entry)
    hmm_path = root / 'hmm.json'
    save_hmm(uniform_hmm(2), hmm_path)
    return CorpusManifest(root=root, utterances=tuple(entries), seed=3, hmm=hmm_path)


def test_manifest_round_trip(tmp_path):
    manifest = small_corpus(tmp_path)
    path = save_manifest(manifest)
    document = json.loads(path.read_text(encoding='utf-8'))
    assert document['utterances'][0] == {'id': 'u0', 'posteriors': 'u0.post', 'reference': 'u0.ref'}

    loaded = load_manifest(tmp_path)
    assert loaded.ids == ['u0', 'u1']
    assert loaded.seed == 3
    assert loaded.hmm == tmp_path / 'hmm.json'
    assert loaded.utterances[1].posteriors == tmp_path / 'u1.post'


def test_manifest_missing_file(tmp_path):
    save_manifest(small_corpus(tmp_path))
    (tmp_path / 'u1.ref').unlink()
    with pytest.raises(ManifestError, match='utterance u1: missing file'):
        load_manifest(tmp_path / 'manifest.json')


def test_manifest_duplicate_ids(tmp_path):
    manifest = small_corpus(tmp_path)
    with pytest.raises(ManifestError, match='unique'):
        CorpusManifest(root=tmp_path, utterances=manifest.utterances + manifest.utterances[:1])

    path = tmp_path / 'manifest.json'
    write_json(path, {'utterances': [{'id': 'u0', 'posteriors': 'u0.post', 'reference': 'u0.ref'}] * 2})
    with pytest.raises(ManifestError, match='unique'):
        load_manifest(path)


def test_manifest_malformed_entries(tmp_path):
    path = write_json(tmp_path / 'manifest.json', {'utterances': [{'id': 'u0'}]})
    with pytest.raises(ManifestError, match="needs 'id'"):
        load_manifest(path)
    write_json(path, {'utterance': []})
    with pytest.raises(ManifestError, match="'utterances' list"):
        load_manifest(path)
