"""Session fixtures: one workspace, three training runs, shared evals.

The workspace is produced once per session by driving the typosmith
command line (see fixture_build); the three desk-scale training runs —
realistic noise, uniform noise, and the pure copy task — are the
expensive part, so every test that needs a trained model shares them.
Step budgets were chosen by measuring convergence on this exact
fixture: the realistic run reaches ~0.93 typo / ~0.99 identity
accuracy at 1500 steps, and the copy run is perfect at 1000.
"""

from __future__ import annotations

import pytest
import torch

from fixture_build import build_workspace, model_accuracy, read_pairs_tsv
from toytrainer import Dataset, SubwordVocab, TrainerConfig, train_model

REAL_STEPS = 1500
BASE_STEPS = 1500
COPY_STEPS = 1000
EVAL_SLICE = 400  # pairs per accuracy measurement

torch.set_num_threads(1)


@pytest.fixture(scope="session")
def workspace(tmp_path_factory):
    return build_workspace(tmp_path_factory.mktemp("workspace"))


@pytest.fixture(scope="session")
def vocab(workspace):
    return SubwordVocab.load(workspace.merges, workspace.tokens)


@pytest.fixture(scope="session")
def eval_typos(workspace):
    return read_pairs_tsv(workspace.eval_typos)[:EVAL_SLICE]


@pytest.fixture(scope="session")
def eval_identity(workspace):
    return read_pairs_tsv(workspace.eval_identity)[:EVAL_SLICE]


@pytest.fixture(scope="session")
def real_run(workspace, vocab):
    """Desk model trained on realistic noise; writes its checkpoint
    directory so artifact tests can inspect it."""
    dataset = Dataset.load(workspace.real_train, workspace.real_valid,
                           vocab.size)
    return train_model(dataset, vocab.size,
                       TrainerConfig.desk(steps=REAL_STEPS, seed=0),
                       workspace.root / "real_checkpoints")


@pytest.fixture(scope="session")
def base_run(workspace, vocab):
    """Same budget and seed, trained on uniform noise."""
    dataset = Dataset.load(workspace.base_train, workspace.base_valid,
                           vocab.size)
    return train_model(dataset, vocab.size,
                       TrainerConfig.desk(steps=BASE_STEPS, seed=0))


@pytest.fixture(scope="session")
def copy_run(workspace, vocab):
    """Trained on the zero-noise identity dataset."""
    dataset = Dataset.load(workspace.identity_train,
                           workspace.identity_valid, vocab.size)
    return train_model(dataset, vocab.size,
                       TrainerConfig.desk(steps=COPY_STEPS, seed=0))


# Accuracy measurements are beam-search sweeps over 400 inputs, so the
# tests that share a number share one computation.

@pytest.fixture(scope="session")
def real_identity_accuracy(real_run, vocab, eval_identity):
    return model_accuracy(real_run.model, vocab, eval_identity, 0.5)


@pytest.fixture(scope="session")
def real_typo_accuracy(real_run, vocab, eval_typos):
    return model_accuracy(real_run.model, vocab, eval_typos, 0.5)


@pytest.fixture(scope="session")
def base_typo_accuracy(base_run, vocab, eval_typos):
    return model_accuracy(base_run.model, vocab, eval_typos, 0.5)
