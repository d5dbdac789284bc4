import numpy as np
import pytest

from inrrecon.acquisition import PATTERNS, gen_mask
from inrrecon.core import make_rng

TABLE1 = [  # width, R, acs, lines, rate (%)
    (368, 6, 18, 61, 16.58),
    (368, 8, 16, 46, 12.50),
    (368, 10, 12, 36, 9.78),
    (320, 6, 18, 53, 16.56),
    (320, 8, 16, 40, 12.50),
    (320, 10, 12, 32, 10.00),
]


@pytest.mark.parametrize("width,accel,acs,lines,rate", TABLE1)
@pytest.mark.parametrize("pattern", ["random-lines", "uniform-lines"])
def test_table1_line_counts(pattern, width, accel, acs, lines, rate):
    m = gen_mask(pattern, 32, width, accel, acs, make_rng(0))
    assert m.num_lines == lines
    assert round(100 * m.undersampling_rate, 2) == rate


@pytest.mark.parametrize("pattern", ["random-lines", "uniform-lines"])
def test_line_structure_and_acs(pattern):
    m = gen_mask(pattern, 64, 128, 4, 16, make_rng(3))
    cols = m.sampled.sum(axis=0)
    assert set(np.unique(cols)) <= {0.0, 64.0}
    rs, cs = m.acs_slices()
    assert np.all(m.sampled[:, cs] == 1)
    assert cs.start == 64 - 8


@pytest.mark.parametrize("pattern", PATTERNS)
def test_no_acceleration_gives_full_mask(pattern):
    m = gen_mask(pattern, 32, 32, 1, 8, make_rng(0))
    assert np.all(m.sampled == 1)


@pytest.mark.parametrize("pattern", ["radial", "spiral"])
def test_point_patterns_hit_density(pattern):
    m = gen_mask(pattern, 128, 128, 10, 12, make_rng(0))
    assert 0.09 <= m.undersampling_rate <= 0.11
    rs, cs = m.acs_slices()
    assert np.all(m.sampled[rs, cs] == 1)


def test_random_lines_deterministic_and_seed_dependent():
    a = gen_mask("random-lines", 16, 128, 4, 16, make_rng(5)).sampled
    b = gen_mask("random-lines", 16, 128, 4, 16, make_rng(5)).sampled
    c = gen_mask("random-lines", 16, 128, 4, 16, make_rng(6)).sampled
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_mask_idempotent():
    m = gen_mask("random-lines", 16, 64, 4, 8, make_rng(0)).sampled
    k = np.arange(16 * 64).reshape(16, 64).astype(complex)
    assert np.array_equal(m * (m * k), m * k)


def test_errors():
    with pytest.raises(ValueError, match="smaller than acs"):
        gen_mask("random-lines", 32, 64, 8, 12, make_rng(0))
    with pytest.raises(ValueError):
        gen_mask("random-lines", 32, 64, 0.5, 4, make_rng(0))
    with pytest.raises(ValueError):
        gen_mask("random-lines", 32, 64, 4, 64, make_rng(0))
    with pytest.raises(ValueError):
        gen_mask("zigzag", 32, 64, 4, 4, make_rng(0))
    with pytest.raises(ValueError, match="achievable range"):
        gen_mask("radial", 64, 64, 50, 30, make_rng(0))
