from pathlib import Path

import numpy as np
import pytest

from minkPostPack import HmmModel, save_hmm


def random_hmm(rng, n_states, n_classes=None):
    """HMM with Dirichlet initial/transition rows and a random state -> class map."""
    n_classes = n_states if n_classes is None else n_classes
    initial = rng.dirichlet(np.ones(n_states))
    transitions = rng.dirichlet(np.ones(n_states), size=n_states)
    labels = [f'w{s}' for s in range(n_states)]
    state_to_class = rng.integers(0, n_classes, size=n_states)
    return HmmModel.from_probabilities(initial, transitions, labels, state_to_class)


def random_posteriors(rng, frames, classes, concentration=1.0):
    return rng.dirichlet(np.full(classes, concentration), size=frames)


@pytest.fixture
def sticky_hmm():
    """2 states, one class each, mildly sticky."""
    return HmmModel.from_probabilities([0.5, 0.5], [[0.6, 0.4], [0.4, 0.6]], ['a', 'b'], [0, 1])


@pytest.fixture
def three_word_hmm():
    return HmmModel.from_probabilities(
        [0.5, 0.3, 0.2],
        [[0.80, 0.15, 0.05],
         [0.10, 0.80, 0.10],
         [0.05, 0.15, 0.80]],
        ['yes', 'no', 'maybe'],
        [0, 1, 2])


@pytest.fixture
def hmm_file(tmp_path, three_word_hmm):
    path = tmp_path / 'hmm.json'
    save_hmm(three_word_hmm, path)
    return path


SNAPSHOT_DIR = Path(__file__).parent / 'snapshots'


@pytest.fixture
def snapshot():
    """
    Compares text with ``tests/snapshots/<name>``.

    A missing snapshot is recorded and the test skipped; commit the file to
    pin the value.
    """
    def check(name, text):
        path = SNAPSHOT_DIR / name
        if not path.is_file():
            SNAPSHOT_DIR.mkdir(exist_ok=True)
            path.write_text(text, encoding='utf-8')
            pytest.skip(f"recorded snapshot {name}")
        assert text == path.read_text(encoding='utf-8')
    return check
