import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dagger_lab.derivations import inner_derivation
from dagger_lab.dynamics import (
    EvolutionTrace,
    TraceSample,
    TranslationParams,
    Wavepacket,
    conserved_quantity_check,
    continuum_limit_study,
    flow_derivative_check,
    flow_derivative_study,
    generalized_schrodinger,
    heisenberg_evolve,
    time_operator_flow,
    translation_generator,
)
from dagger_lab.errors import DimensionMismatchError, NotHermitianError, UnderResolvedError
from dagger_lab.lattice import LatticeSpec, hamiltonian_operator, momentum_operator, position_operator, time_operator
from dagger_lab.linalg_core import NILPOTENT, SIGMA_X, SIGMA_Y, SIGMA_Z, cstar_norm
from dagger_lab.serialization import read_operator

from .conftest import ginibre, hermitian
from .oracles import expm_unitary, pauli_rotation
from .strategies import hermitian_matrices


@pytest.mark.parametrize("s, expected", [(np.pi / 2, -SIGMA_X), (np.pi / 4, -SIGMA_Y)])
def test_pauli_rotation_examples(s, expected):
    F = heisenberg_evolve(SIGMA_X, SIGMA_Z, s)
    np.testing.assert_allclose(F, expected, atol=1e-15)
    np.testing.assert_allclose(F, pauli_rotation(s), atol=1e-15)


@given(st.floats(-20, 20))
def test_pauli_rotation_closed_form(s):
    np.testing.assert_allclose(heisenberg_evolve(SIGMA_X, SIGMA_Z, s), pauli_rotation(s), atol=1e-13)


def test_evolve_matches_expm(rng):
    T, F = hermitian(6, rng), ginibre(6, rng)
    U = expm_unitary(T, 0.8, 1.5)
    np.testing.assert_allclose(heisenberg_evolve(F, T, 0.8, 1.5), U.conj().T @ F @ U, atol=1e-12)


def test_evolve_at_zero_returns_input(rng):
    F = ginibre(4, rng)
    assert np.array_equal(heisenberg_evolve(F, hermitian(4, rng), 0.0), F)


def test_evolve_errors():
    with pytest.raises(NotHermitianError):
        heisenberg_evolve(SIGMA_X, NILPOTENT, 1.0)
    with pytest.raises(DimensionMismatchError):
        heisenberg_evolve(np.eye(3), SIGMA_Z, 1.0)


@given(hermitian_matrices(dim=5), hermitian_matrices(dim=5), st.floats(-3, 3), st.floats(-3, 3))
def test_flow_invariants(T, F, s1, s2):
    T = T / max(1.0, cstar_norm(T))
    Fs = heisenberg_evolve(F, T, s1)
    nF = max(1.0, cstar_norm(F))
    assert abs(cstar_norm(Fs) - cstar_norm(F)) <= 1e-9 * nF
    np.testing.assert_allclose(np.linalg.eigvalsh(Fs), np.linalg.eigvalsh(F), atol=1e-9 * nF)
    composed = heisenberg_evolve(heisenberg_evolve(F, T, s1), T, s2)
    assert cstar_norm(composed - heisenberg_evolve(F, T, s1 + s2)) <= 1e-9 * nF


def test_conservation(rng):
    for T in (SIGMA_Z, position_operator(LatticeSpec(16)), hermitian(12, rng)):
        trace = conserved_quantity_check(T, [0.0, 0.1, 1.0, 10.0])
        assert trace.samples[0].deviation == 0.0
        assert np.all(trace.deviations <= 1e-10 * cstar_norm(T))


def test_flow_derivative_pauli_order():
    study = flow_derivative_study(SIGMA_X, SIGMA_Z, steps=(1e-2, 5e-3))
    assert study.local_orders[0] == pytest.approx(2.0, abs=0.2)
    check = flow_derivative_check(SIGMA_X, SIGMA_Z, h=1e-2)
    assert check.observed_order == pytest.approx(2.0, abs=0.2)
    assert check.residual_half < check.residual


def test_flow_derivative_commuting_pair():
    check = flow_derivative_check(np.diag([1.0, 2, 3]), np.diag([4.0, 5, 6]), h=1e-1)
    assert check.residual <= 1e-15
    assert check.residual_half <= 1e-15


def test_flow_derivative_fit_random_d8():
    rng = np.random.default_rng(8)
    T, F = hermitian(8, rng), hermitian(8, rng)
    study = flow_derivative_study(F, T, steps=(1e-2, 5e-3, 2.5e-3, 1.25e-3))
    assert study.fitted_order == pytest.approx(2.0, abs=0.1)
    assert math.isfinite(study.fitted_constant)
    assert np.all(study.residuals <= 1.5 * study.fitted_constant * study.steps**2)


def test_time_operator_flow_commuting():
    t_op = time_operator(LatticeSpec(3))
    flow = time_operator_flow(t_op, np.diag([2.0, -1.0, 0.5]), [0.0, 1.0, 5.0])
    assert not np.any(flow.instantaneous)
    assert np.all(flow.trace.deviations <= 1e-14)
    assert np.array_equal(flow.trace.samples[0].observable, t_op)


def test_time_operator_flow_linear_growth():
    t_op = time_operator(LatticeSpec(3))
    T = momentum_operator(LatticeSpec(3))
    flow = time_operator_flow(t_op, T, [1e-4, 2e-4, 4e-4])
    expected = inner_derivation(T).apply(t_op)
    np.testing.assert_allclose(flow.instantaneous, expected)
    for sample in flow.trace.samples:
        assert sample.deviation == pytest.approx(sample.s * flow.rate, rel=1e-3)


def test_translation_generator():
    spec = LatticeSpec(6, centering="centered")
    P, H = momentum_operator(spec), hamiltonian_operator(spec, potential=[0, 0, 1])
    np.testing.assert_array_equal(translation_generator(TranslationParams(0.0, 1.0), P, H), P)
    np.testing.assert_array_equal(translation_generator(TranslationParams(1.0, 0.0), P, H), -H)
    T = translation_generator(TranslationParams(0.3, -0.2), P, H)
    assert np.array_equal(T, T.conj().T)
    with pytest.warns(UserWarning):
        params = TranslationParams(0.0, 0.0)
    assert not np.any(translation_generator(params, P, H))
    with pytest.raises(NotHermitianError):
        translation_generator(TranslationParams(1.0, 1.0), NILPOTENT, SIGMA_Z)


def test_schrodinger_sigma_z():
    sol = generalized_schrodinger(SIGMA_Z)
    np.testing.assert_array_equal(sol.eigenvalues, [-1, 1])
    np.testing.assert_allclose(np.abs(sol.kets[0]), [0, 1])
    np.testing.assert_allclose(np.abs(sol.kets[1]), [1, 0])


def test_schrodinger_position_lattice():
    sol = generalized_schrodinger(position_operator(LatticeSpec(5)))
    np.testing.assert_array_equal(sol.eigenvalues, [0, 1, 2, 3, 4])
    np.testing.assert_array_equal(np.abs(sol.eigenkets), np.eye(5))
    assert np.all(sol.residuals == 0)


def test_schrodinger_random_d12():
    T = hermitian(12, np.random.default_rng(12))
    sol = generalized_schrodinger(T)
    assert np.all(sol.residuals <= 1e-10 * cstar_norm(T))
    V = sol.eigenkets
    assert cstar_norm(V.conj().T @ V - np.eye(12)) <= 1e-10
    with pytest.raises(NotHermitianError):
        generalized_schrodinger(NILPOTENT)


def test_continuum_study_converges():
    table = continuum_limit_study([32, 64, 128, 256], Wavepacket(0.0, 1.0, 1.0), shift=0.5)
    errors = table.errors
    assert np.all(np.diff(errors) < 0)
    assert math.isnan(table.rows[0].order)
    assert table.final_order == pytest.approx(2.0, abs=0.3)


def test_continuum_zero_shift():
    table = continuum_limit_study([32, 64, 128], shift=0.0)
    assert np.all(table.errors <= 1e-13)


@pytest.mark.parametrize("counts", [[64, 32], [8, 16], [32, 32]])
def test_continuum_rejects_bad_counts(counts):
    with pytest.raises(ValueError):
        continuum_limit_study(counts)


def test_continuum_rejects_under_resolved():
    with pytest.raises(UnderResolvedError):
        continuum_limit_study([16, 32], Wavepacket(width=0.2), interval_length=20.0)
    with pytest.raises(UnderResolvedError):
        continuum_limit_study([64, 128], Wavepacket(width=1.0), interval_length=8.0)


def test_trace_invariants_and_csv(tmp_path):
    with pytest.raises(ValueError):
        EvolutionTrace((TraceSample(1.0, np.eye(2), 0.0), TraceSample(1.0, np.eye(2), 0.0)))
    with pytest.raises(ValueError):
        conserved_quantity_check(SIGMA_Z, [1.0, 0.5])
    trace = conserved_quantity_check(SIGMA_Z, [0.0, 0.5])
    assert trace.to_csv().splitlines()[0] == "s,deviation"
    paths = trace.dump_operators(tmp_path / "ops")
    assert [p.name for p in paths] == ["sample_0.json", "sample_1.json"]
    np.testing.assert_array_equal(read_operator(paths[1]), trace.samples[1].observable)
