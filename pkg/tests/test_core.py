import numpy as np
import pytest

from insbank.core import CandidatePoint, EvolutionConfig, validate_pool
from insbank.errors import (
    ConfigError,
    DimensionMismatch,
    DuplicateId,
    EmptyPool,
    NonFiniteValue,
)

from conftest import make_point


def test_validate_pool_ok():
    pool = validate_pool([make_point(f"x{i}", [i, 0, 0, 1]) for i in range(3)])
    assert len(pool) == 3


def test_duplicate_id():
    with pytest.raises(DuplicateId):
        validate_pool([make_point("a", [0, 1]), make_point("a", [1, 0])])


def test_mixed_dimension():
    with pytest.raises(DimensionMismatch):
        validate_pool([make_point("a", [0, 1]), make_point("b", [1, 0, 2])])


def test_non_finite_embedding():
    with pytest.raises(NonFiniteValue):
        make_point("a", [0.0, np.nan])


def test_non_finite_quality():
    with pytest.raises(NonFiniteValue):
        make_point("a", [0.0, 1.0], quality=np.inf)


def test_empty_pool():
    with pytest.raises(EmptyPool):
        validate_pool([])


def test_point_is_immutable():
    p = make_point("a", [1.0, 2.0])
    with pytest.raises(ValueError):
        p.embedding[0] = 3.0


def test_config_defaults_match_reference_setting():
    cfg = EvolutionConfig()
    assert cfg.alpha0 == 0.3
    assert cfg.lam == 0.9
    assert cfg.beta == 0.5
    assert cfg.gamma == 1.0
    assert cfg.bank_size == 6000
    assert cfg.batch_size == 27000
    assert cfg.r_l == 0.3
    assert cfg.r_h == 0.95
    assert cfg.preference == 0.0


@pytest.mark.parametrize(
    "kwargs",
    [
        {"bank_size": 0},
        {"alpha0": 1.5},
        {"lam": 0.0},
        {"beta": 1.0},
        {"gamma": -1.0},
        {"combination": "weird"},
        {"r_l": 0.9, "r_h": 0.5},
        {"r_l": 0.5, "r_h": 0.5},
        {"bank_size": 100, "batch_size": 100},
        {"stable_iters": 0},
    ],
)
def test_config_rejects_bad_values(kwargs):
    with pytest.raises(ConfigError):
        EvolutionConfig(**kwargs)


def test_config_roundtrip():
    cfg = EvolutionConfig(bank_size=10, batch_size=50, gamma=2.0)
    assert EvolutionConfig.from_dict(cfg.to_dict()) == cfg
