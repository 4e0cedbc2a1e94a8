from __future__ import annotations

from dataclasses import dataclass

import numpy as np

STAGES = ("split", "init", "shuffle", "subsample")


@dataclass(frozen=True)
class SeedStreams:
    """Expands one master seed into independent per-stage generators.

    Each stage draws from a Philox counter-based generator keyed by
    (master, stage index), so re-running a single stage reproduces it
    without replaying the others.
    """

    master: int

    def generator(self, stage: str) -> np.random.Generator:
        if stage not in STAGES:
            raise ValueError(f"Unknown seed stage: {stage}")
        seq = np.random.SeedSequence([int(self.master) & 0xFFFFFFFF, STAGES.index(stage)])
        return np.random.Generator(np.random.Philox(seq))
