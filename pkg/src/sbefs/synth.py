"""Gaussian two-class data with planted relevant, redundant and irrelevant columns."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import _rng
from .data import Dataset


@dataclass(frozen=True)
class SynthSpec:
    n_per_class: int = 200
    n_relevant: int = 8
    n_redundant: int = 0
    n_irrelevant: int = 56
    separation: float = 2.0
    redundancy_noise: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.n_per_class < 1:
            raise ValueError("n_per_class must be >= 1")
        if self.n_relevant < 1:
            raise ValueError("n_relevant must be >= 1")
        if self.n_redundant < 0 or self.n_irrelevant < 0:
            raise ValueError("feature counts must be non-negative")
        if self.separation < 0:
            raise ValueError("separation must be non-negative")
        if self.redundancy_noise < 0:
            raise ValueError("redundancy_noise must be non-negative")

    @property
    def n_features(self):
        return self.n_relevant + self.n_redundant + self.n_irrelevant

    def to_dict(self):
        return asdict(self)


def generate(spec):
    """Draw a dataset for ``spec``.

    Returns ``(dataset, relevant_ids, redundant_ids)`` where the ID lists refer
    to the shuffled column positions. Class 1 rows follow the class 0 rows.
    """
    n = 2 * spec.n_per_class
    labels = np.repeat([0, 1], spec.n_per_class)
    values = _rng.stream(spec.seed, "synth", "values")
    relevant = values.standard_normal((n, spec.n_relevant))
    relevant[labels == 1] += spec.separation
    sources = _rng.stream(spec.seed, "synth", "redundant-source").integers(
        0, spec.n_relevant, size=spec.n_redundant
    )
    redundant = relevant[:, sources] + spec.redundancy_noise * values.standard_normal((n, spec.n_redundant))
    irrelevant = values.standard_normal((n, spec.n_irrelevant))
    block = np.hstack([relevant, redundant, irrelevant])

    # position[j] is the shuffled column that receives block column j
    position = _rng.stream(spec.seed, "synth", "columns").permutation(spec.n_features)
    samples = np.empty_like(block)
    samples[:, position] = block
    relevant_ids = sorted(int(p) for p in position[: spec.n_relevant])
    redundant_ids = sorted(int(p) for p in position[spec.n_relevant: spec.n_relevant + spec.n_redundant])
    return Dataset(samples, labels), relevant_ids, redundant_ids
