from .ingest import LoadedTable, load_csv
from .rank import RankNormalizer, fit_rank_normalizer, transform
from .split import split, split_tags

__all__ = [
    "LoadedTable",
    "RankNormalizer",
    "fit_rank_normalizer",
    "load_csv",
    "split",
    "split_tags",
    "transform",
]
