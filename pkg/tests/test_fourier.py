import json

import numpy as np
import pytest

from qaum.circuits import (
    FeatureGate,
    ParamCircuit,
    WeightGate,
    build_qaoa_embedding,
    build_qaum,
    evaluate,
    evaluate_batch,
    permute_features,
)
from qaum.exceptions import ConfigurationError, StructuralError
from qaum.fourier import (
    FourierSpectrum,
    enumerate_multiplicities,
    extract_feature_spectrum,
    extract_spectrum,
    frequency_multiplicities,
    grid_angles,
    verify_truncation,
)


def rand_w(c, seed):
    return np.random.default_rng(seed).uniform(0, 2 * np.pi, c.n_weights)


def test_multiplicities_examples():
    assert frequency_multiplicities(1) == {-1: 1, 0: 2, 1: 1}
    assert frequency_multiplicities(2) == {-2: 1, -1: 4, 0: 6, 1: 4, 2: 1}
    assert sum(frequency_multiplicities(3).values()) == 64


@pytest.mark.parametrize("L", range(1, 7))
def test_multiplicities_match_enumeration(L):
    assert frequency_multiplicities(L) == enumerate_multiplicities(L)
    assert sum(frequency_multiplicities(L).values()) == 4**L


def test_multiplicities_reject_bad_L():
    with pytest.raises(ConfigurationError):
        frequency_multiplicities(0)


@pytest.mark.parametrize("L", [1, 2, 3])
def test_single_feature_support_bounded_by_L(L):
    c = build_qaum(1, L)
    for seed in range(5):
        s = extract_spectrum(c, rand_w(c, seed), L + 2)
        rep = verify_truncation(s, L)
        assert rep.passed, rep
        assert rep.max_leakage < 1e-9
        assert s.hermitian_defect() < 1e-9


def test_l1_leakage_at_degree_two_is_zero():
    c = build_qaum(1, 1)
    s = extract_spectrum(c, rand_w(c, 0), 3)
    assert abs(s.coefficient((2,))) < 1e-9 and abs(s.coefficient((-2,))) < 1e-9
    assert abs(s.coefficient((1,))) > 1e-6


def test_constant_circuit():
    c = ParamCircuit(1, [WeightGate("RY", (0,), 0)], 1, 0)
    s = extract_spectrum(c, [1.1], 3)
    assert s.coefficients == {(): pytest.approx(complex(np.sin(0.55) ** 2))}
    rep = verify_truncation(s, 1)
    assert rep.passed and rep.max_leakage == 0.0


def test_constant_in_feature_gives_only_dc():
    # the feature only acts through RZ on |0>, which is a phase
    c = ParamCircuit(1, [FeatureGate("RZ", (0,), 0), WeightGate("RY", (0,), 0)], 1, 1)
    s = extract_spectrum(c, [0.8], 3)
    nonzero = {g for g, v in s.coefficients.items() if abs(v) > 1e-12}
    assert nonzero == {(0,)}
    assert s.coefficient((0,)).real == pytest.approx(evaluate(c, [0.8], [0.3]).p1, abs=1e-12)


def test_two_features_two_reps_support():
    c = build_qaum(2, 2)
    s = extract_spectrum(c, rand_w(c, 1), 4)
    assert verify_truncation(s, 2).passed
    assert s.hermitian_defect() < 1e-9
    assert max(abs(s.coefficient(g)) for g in [(2, 2), (-2, 1), (0, 2)]) > 1e-8


def test_stacked_encodings_leak_beyond_l1():
    c = ParamCircuit(
        1,
        [WeightGate("RY", (0,), 0), FeatureGate("RZ", (0,), 0), WeightGate("RX", (0,), 1),
         FeatureGate("RZ", (0,), 0), WeightGate("RY", (0,), 2)],
        3,
        1,
    )
    s = extract_spectrum(c, [0.7, 1.3, 0.4], 3)
    rep = verify_truncation(s, 1)
    assert not rep.passed
    assert rep.max_leakage == pytest.approx(max(abs(s.coefficient((2,))), abs(s.coefficient((-2,)))))
    assert max(abs(s.coefficient((3,))), abs(s.coefficient((-3,)))) < 1e-9


def test_verify_requires_margin():
    c = build_qaum(1, 2)
    with pytest.raises(ConfigurationError):
        verify_truncation(extract_spectrum(c, rand_w(c, 0), 3), 2)


def test_grid_guard():
    c = build_qaum(8, 1)
    with pytest.raises(ConfigurationError):
        extract_spectrum(c, rand_w(c, 0), 3)


def test_dft_roundtrip_reproduces_grid():
    c = build_qaum(2, 1)
    w = rand_w(c, 2)
    s = extract_spectrum(c, w, 3)
    g = grid_angles(3)
    xx, yy = np.meshgrid(g, g, indexing="ij")
    grid = np.column_stack([xx.ravel(), yy.ravel()])
    np.testing.assert_allclose(s.synthesize(grid), evaluate_batch(c, w, grid), atol=1e-9)


def test_series_reproduces_off_grid_points():
    c = build_qaum(2, 2)
    w = rand_w(c, 3)
    s = extract_spectrum(c, w, 2)
    x = np.random.default_rng(4).uniform(-10, 10, (50, 2))
    np.testing.assert_allclose(s.synthesize(x), evaluate_batch(c, w, x), atol=1e-9)


def test_higher_frequencies_less_accessible_on_average():
    c = build_qaum(1, 2)
    c1, c2 = [], []
    for seed in range(300):
        s = extract_spectrum(c, rand_w(c, seed), 4)
        c1.append((abs(s.coefficient((1,))) + abs(s.coefficient((-1,)))) / 2)
        c2.append((abs(s.coefficient((2,))) + abs(s.coefficient((-2,)))) / 2)
    assert np.mean(c2) < np.mean(c1)


def test_permutation_covariance():
    c = build_qaum(3, 1)
    w = rand_w(c, 5)
    perm = np.array([2, 0, 1])
    s = extract_spectrum(c, w, 2)
    sp = extract_spectrum(permute_features(c, perm), w, 2)
    # the permuted circuit reads feature perm[i] where the original read i
    for gamma, val in s.coefficients.items():
        moved = [0, 0, 0]
        for i, g in enumerate(gamma):
            moved[perm[i]] = g
        assert abs(sp.coefficient(moved) - val) < 1e-9


def test_per_feature_spectrum_of_production_model():
    c = build_qaum(8, 2)
    w = rand_w(c, 6)
    base = np.random.default_rng(7).uniform(0, np.pi, 8)
    for i in range(8):
        s = extract_feature_spectrum(c, w, i, base, 4)
        assert verify_truncation(s, 2).passed
        assert s.hermitian_defect() < 1e-9
    with pytest.raises(StructuralError):
        extract_feature_spectrum(c, w, 8, base, 4)


def test_qaoa_per_feature_degree():
    # each feature is encoded reps + 1 times in the embedding
    c = build_qaoa_embedding(4, 3, 1)
    w = rand_w(c, 8)
    base = np.random.default_rng(9).uniform(0, np.pi, 3)
    s = extract_feature_spectrum(c, w, 0, base, 4)
    assert verify_truncation(s, 2).passed


def test_json_roundtrip():
    c = build_qaum(1, 1)
    s = extract_spectrum(c, rand_w(c, 0), 3)
    d = json.loads(s.to_json())
    assert {e["gamma"][0] for e in d["coefficients"]} == set(range(-3, 4))
    back = FourierSpectrum.from_dict(d)
    for g, v in s.coefficients.items():
        assert back.coefficient(g) == v
    assert np.allclose(back.as_array(), s.as_array())
