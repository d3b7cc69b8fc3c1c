import numpy as np
import pytest

from loudclass.pipeline import (
    SyntheticConfig,
    feature_matrix,
    generate_synthetic,
    labels_of,
)


@pytest.fixture(scope="session")
def small_records():
    """Overlapping 6-class data, 24 ears per class."""
    return generate_synthetic(SyntheticConfig(records_per_class=24, seed=7))


@pytest.fixture(scope="session")
def small_xy(small_records):
    return feature_matrix(small_records), labels_of(small_records)


@pytest.fixture(scope="session")
def separable_records():
    """Zero generator noise: every record of a class is identical."""
    cfg = SyntheticConfig(
        records_per_class=30,
        seed=3,
        jitter_sd=0.0,
        l2_5_offset_sd=0.0,
        l_cut_noise_sd=0.0,
    )
    return generate_synthetic(cfg)


@pytest.fixture(scope="session")
def separable_xy(separable_records):
    return feature_matrix(separable_records), labels_of(separable_records)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
