import numpy as np
import pytest
from scipy.special import comb

from simplectra.complexes import PureComplex, adjacency_matrix, colex_rank
from simplectra.errors import ValidationError
from simplectra.lm_model import (
    LMParams,
    adjacency_dense,
    centered_scaled,
    colex_ranks,
    complete_spectrum_reference,
    facet_coins,
    facet_table,
    sample_from_complex,
    sample_lm,
)


def test_extreme_probabilities():
    assert len(sample_lm(LMParams(10, 2, 1.0, 7))) == comb(10, 3, exact=True)
    assert len(sample_lm(LMParams(10, 2, 0.0, 7))) == 0
    assert sample_lm(LMParams(10, 2, 1.0, 7)).complex == PureComplex.complete(10, 2)


def test_same_seed_same_sample():
    a = sample_lm(LMParams(12, 2, 0.4, 99))
    b = sample_lm(LMParams(12, 2, 0.4, 99))
    c = sample_lm(LMParams(12, 2, 0.4, 100))
    assert a.present == b.present
    assert a.present != c.present


def test_invalid_params():
    with pytest.raises(ValidationError):
        sample_lm(LMParams(2, 2, 0.5, 0))
    with pytest.raises(ValidationError):
        sample_lm(LMParams(5, 0, 0.5, 0))
    with pytest.raises(ValidationError):
        sample_lm(LMParams(5, 1, 1.5, 0))


@pytest.mark.parametrize("params", [(5, 1, "abc", 0), (5, 1, None, 0), ("five", 1, 0.5, 0), (5, 1, 0.5, "x"),
                                    (5, 1, float("nan"), 0)])
def test_malformed_params(params):
    with pytest.raises(ValidationError):
        LMParams(*params).validate()


def test_validate_coerces():
    params = LMParams("6", 2.0, "0.25", "11").validate()
    assert params == (6, 2, 0.25, 11)
    assert isinstance(params.n, int) and isinstance(params.p, float)


def test_facet_table_is_colex():
    table = facet_table(7, 2)
    assert [colex_rank(tuple(row)) for row in table] == list(range(len(table)))
    assert np.array_equal(colex_ranks(table, 7), np.arange(len(table)))


def test_facet_count_mean():
    count = comb(30, 3, exact=True)
    sizes = np.array([len(sample_lm(LMParams(30, 2, 0.5, seed))) for seed in range(1000)])
    se = np.sqrt(count * 0.25 / 1000)
    assert abs(sizes.mean() - 0.5 * count) <= 3 * se


def test_coins_are_uncorrelated():
    trials = 2000
    coins = np.array([facet_coins(LMParams(12, 1, 0.5, seed)) for seed in range(trials)]) < 0.5
    rng = np.random.default_rng(1)
    pairs = rng.choice(coins.shape[1], size=(100, 2))
    assert abs(coins.mean() - 0.5) < 0.01
    for a, b in pairs:
        if a == b:
            continue
        r = np.corrcoef(coins[:, a], coins[:, b])[0, 1]
        assert abs(r) <= 4 / np.sqrt(trials)


def test_dense_adjacency_matches_complex_adjacency():
    sample = sample_lm(LMParams(8, 2, 0.5, 3))
    dense = adjacency_dense(8, 2, sample.mask)
    assert np.array_equal(dense, adjacency_matrix(sample.complex, 1).matrix)


def test_centered_entries():
    n, d, p = 9, 2, 0.5
    sample = sample_lm(LMParams(n, d, p, 21))
    H = centered_scaled(sample).H
    A = adjacency_dense(n, d, sample.mask)
    K = adjacency_dense(n, d)
    assert np.allclose(H, (A - p * K) / np.sqrt(n * p * (1 - p)))
    assert np.array_equal(H, H.T)
    assert np.all(np.diag(H) == 0)
    nonzero = np.abs(H[K != 0])
    assert np.allclose(nonzero, 1 / np.sqrt(n))


def test_centering_needs_interior_p():
    for p in (0.0, 1.0):
        with pytest.raises(ValidationError):
            centered_scaled(sample_lm(LMParams(6, 1, p, 0)))


def test_centered_mean_is_zero():
    n, d, p, trials = 10, 2, 0.3, 1000
    total = np.zeros((comb(n, d, exact=True),) * 2)
    squares = np.zeros_like(total)
    for seed in range(trials):
        H = centered_scaled(sample_lm(LMParams(n, d, p, seed))).H
        total += H
        squares += H ** 2
    mean = total / trials
    se = np.sqrt(np.maximum(squares / trials - mean ** 2, 1e-30) / trials)
    cells = adjacency_dense(n, d) != 0
    assert np.all(mean[~cells] == 0)
    # about 0.3% of cells leave a 3 standard error band by chance
    assert np.mean(np.abs(mean[cells]) <= 3 * se[cells]) > 0.99


def test_row_energy_approaches_d():
    n, d, p = 200, 1, 0.5
    energies = []
    for seed in range(5):
        H = centered_scaled(sample_lm(LMParams(n, d, p, seed))).H
        energies.append(np.sum(H ** 2) / H.shape[0])
    # E |H|_F^2 / C(n, d) = d (n - d) / n exactly
    assert abs(np.mean(energies) - d * (n - d) / n) <= 0.05 * d


@pytest.mark.parametrize(
    "n, d, expected",
    [(5, 2, {3: 4, -2: 6}), (3, 1, {2: 1, -1: 2}), (8, 3, {5: 21, -3: 35})],
)
def test_complete_spectrum_reference(n, d, expected):
    reference = complete_spectrum_reference(n, d)
    assert dict(reference) == expected
    assert sum(reference.values()) == comb(n, d, exact=True)


def test_complete_spectrum_matches_eigensolver():
    for d in range(1, 4):
        for n in range(d + 1, 11):
            eigs = np.sort(np.linalg.eigvalsh(adjacency_dense(n, d)))
            reference = complete_spectrum_reference(n, d)
            expected = np.sort(np.concatenate([np.full(m, float(v)) for v, m in reference.items()]))
            assert np.allclose(eigs, expected, atol=1e-8)


def test_sample_from_complex_round_trip():
    sample = sample_lm(LMParams(9, 2, 0.35, 4))
    again = sample_from_complex(sample.complex, 0.35, 4)
    assert np.array_equal(again.mask, sample.mask)
