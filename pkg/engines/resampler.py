"""
Nonparametric bootstrap resampling of dataset rows.
"""
import numpy as np

from core.dataset import Dataset


def bootstrap_indices(n, rng):
    """Row indices of one resample: n draws uniformly with replacement."""
    return rng.integers(0, n, size=n)


def bootstrap_sample(data: Dataset, rng) -> Dataset:
    """
    Draw n rows i.i.d. with replacement; each row keeps its own mask.

    Args:
        data (Dataset): Dataset to resample (observed or completed)
        rng (numpy.random.Generator): Stream for this resample

    Returns:
        Dataset: Resampled dataset of the same size
    """
    return data.take(bootstrap_indices(data.n_rows, rng))
