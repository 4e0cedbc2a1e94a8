from .exports import (
    read_scores,
    read_selection,
    write_amplification,
    write_histogram,
    write_json,
    write_loss_history,
    write_mi,
    write_profiles,
    write_records,
    write_scores,
    write_selection,
)
from .model_file import FORMAT_VERSION, ModelFile, load_model, save_model

__all__ = [
    "FORMAT_VERSION",
    "ModelFile",
    "load_model",
    "read_scores",
    "read_selection",
    "save_model",
    "write_amplification",
    "write_histogram",
    "write_json",
    "write_loss_history",
    "write_mi",
    "write_profiles",
    "write_records",
    "write_scores",
    "write_selection",
]
