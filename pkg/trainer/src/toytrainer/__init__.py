"""Desk-scale denoising seq2seq transformer over typosmith datasets.

Consumes the typo pipeline's emitted files — token-id dataset TSVs, the
BPE merges file, and the token table — trains a small encoder–decoder
to recover the clean string from the noisy one, and serves beam-search
corrections whose beam score acts as a confidence threshold.
"""

from .data import DataError, Dataset, read_id_pairs
from .inference import (MAX_INPUT_LENGTH, Correction, ScoredCandidate,
                        beam_search, format_prediction, predict,
                        predict_lines, score_input)
from .model import (DenoiserModel, ModelError, TrainerConfig, build_model,
                    count_parameters)
from .training import (TrainingError, TrainResult, inverse_sqrt_lr,
                       load_checkpoint, save_checkpoint, train_model,
                       validation_loss)
from .vocab import (BOS_ID, EOS_ID, PAD_ID, UNK_ID, SubwordVocab,
                    VocabError, load_merges, load_token_table)

__version__ = "0.1.0"

__all__ = [
    "BOS_ID", "Correction", "DataError", "Dataset", "DenoiserModel",
    "EOS_ID", "MAX_INPUT_LENGTH", "ModelError", "PAD_ID",
    "ScoredCandidate", "SubwordVocab", "TrainResult", "TrainerConfig",
    "TrainingError", "UNK_ID", "VocabError", "beam_search", "build_model",
    "count_parameters", "format_prediction", "inverse_sqrt_lr",
    "load_checkpoint", "load_merges", "load_token_table", "predict",
    "predict_lines", "read_id_pairs", "save_checkpoint", "score_input",
    "train_model", "validation_loss",
]
