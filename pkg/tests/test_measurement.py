import cmath
import math

import numpy as np
import pytest

from rtosim.analysis import correlation_at
from rtosim.linalg import (
    AB_BASIS,
    READY,
    StateVector,
    basis_state,
    entangled_state,
    outer,
    partial_trace,
    superposition,
    tensor,
)
from rtosim.measurement import (
    MeasurementMap,
    apply_measurement,
    coherence_report,
    oracle_probabilities,
    outcome_distribution,
    propagate,
)
from rtosim.circuits import RtoCircuit, coincidence_probabilities
from rtosim.optics import beam_splitter, element_unitary, phase_shifter

GRID = np.linspace(0, math.pi, 101)
READY_B = basis_state("B", READY)


def _premeasure(alpha, beta):
    return tensor(StateVector.from_amplitudes("A", [alpha, beta], normalize=True), READY_B)


class TestApplyMeasurement:
    def test_superposition_becomes_entangled(self):
        out = apply_measurement(tensor(superposition("A"), READY_B))
        np.testing.assert_allclose(out.amplitudes, entangled_state().amplitudes, atol=1e-15)

    def test_basis_state_calibration(self):
        out = apply_measurement(tensor(basis_state("A", 1), READY_B))
        np.testing.assert_array_equal(out.amplitudes, [1, 0, 0, 0])
        out = apply_measurement(tensor(basis_state("A", 2), READY_B))
        np.testing.assert_array_equal(out.amplitudes, [0, 0, 0, 1])

    def test_phase_family(self):
        for phi in GRID:
            out = apply_measurement(tensor(superposition("A", phi), READY_B))
            expected = [1 / math.sqrt(2), 0, 0, cmath.exp(1j * phi) / math.sqrt(2)]
            np.testing.assert_allclose(out.amplitudes, expected, atol=1e-12)
            assert abs(np.sum(np.abs(out.amplitudes) ** 2) - 1) < 1e-12

    def test_outside_calibrated_subspace(self):
        with pytest.raises(ValueError, match="calibrated"):
            apply_measurement(tensor(superposition("A"), basis_state("B", 1)))

    def test_isometry(self):
        rng = np.random.default_rng(5)
        inputs = [_premeasure(1, 0), _premeasure(0, 1)]
        inputs += [_premeasure(*(rng.normal(size=2) + 1j * rng.normal(size=2))) for _ in range(6)]
        outputs = [apply_measurement(s) for s in inputs]
        for i, (si, oi) in enumerate(zip(inputs, outputs)):
            for sj, oj in zip(inputs[i:], outputs[i:]):
                assert abs(si.inner(sj) - oi.inner(oj)) < 1e-12

    def test_map_rejects_colliding_targets(self):
        m = MeasurementMap()
        keys = list(m.calibration)
        with pytest.raises(ValueError):
            MeasurementMap({keys[0]: AB_BASIS[0], keys[1]: AB_BASIS[0]})


class TestPropagate:
    def test_identity(self):
        s = entangled_state(0.3)
        out = propagate(s, [("A", np.eye(2)), ("B", np.eye(2))])
        np.testing.assert_array_equal(out.amplitudes, s.amplitudes)

    def test_single_beam_splitter(self):
        out = propagate(basis_state("A", 1), [("A", element_unitary(beam_splitter()))])
        np.testing.assert_allclose(out.amplitudes, np.array([1, 1j]) / math.sqrt(2), atol=1e-15)

    def test_acts_on_correct_factor(self):
        # U on B of |A1>|B1> should give |A1> (x) U|B1>
        u = element_unitary(beam_splitter())
        out = propagate(tensor(basis_state("A", 1), basis_state("B", 1)), [("B", u)])
        np.testing.assert_allclose(out.amplitudes, [u[0, 0], u[1, 0], 0, 0], atol=1e-15)

    def test_fig2_chain_gives_quarter_sinusoids(self):
        for d in GRID:
            ops = [("B", element_unitary(phase_shifter(d, 1))),
                   ("A", element_unitary(beam_splitter())), ("B", element_unitary(beam_splitter()))]
            out = propagate(entangled_state(), ops)
            p = np.abs(out.amplitudes) ** 2
            # raw port order: both transmit-transmit/reflect-reflect cells carry (1 - cos d)/4
            np.testing.assert_allclose(p[[0, 3]], (1 - math.cos(d)) / 4, atol=1e-12)
            np.testing.assert_allclose(p[[1, 2]], (1 + math.cos(d)) / 4, atol=1e-12)

    def test_rejects_bad_dimensions(self):
        with pytest.raises(ValueError):
            propagate(entangled_state(), [("A", np.eye(3))])
        with pytest.raises(ValueError):
            propagate(entangled_state(), [("C", np.eye(2))])
        with pytest.raises(ValueError):
            propagate(tensor(superposition("A"), READY_B), [("A", np.eye(2))])

    def test_oracle_matches_path_sum(self):
        for d in GRID:
            c = RtoCircuit(1.0, 1.0 + d)
            np.testing.assert_allclose(oracle_probabilities(c), coincidence_probabilities(c), atol=1e-12)


class TestCoherence:
    def test_entangled_state_is_decohered(self):
        for sub in "AB":
            r = coherence_report(entangled_state(), sub)
            assert r.offdiag_magnitude < 1e-15
            assert r.purity == pytest.approx(0.5, abs=1e-12)

    def test_unentangled_keeps_coherence(self):
        s = tensor(superposition("A"), basis_state("B", 1))
        r = coherence_report(s, "A")
        assert r.offdiag_magnitude == pytest.approx(0.5, abs=1e-12)
        assert r.purity == pytest.approx(1.0, abs=1e-12)

    def test_unequal_schmidt_weights(self):
        # rho_A = diag(0.9, 0.1), purity 0.81 + 0.01
        s = StateVector.from_amplitudes("AB", [math.sqrt(0.9), 0, 0, math.sqrt(0.1)])
        r = coherence_report(s, "A")
        assert r.purity == pytest.approx(0.82, abs=1e-12)
        assert r.offdiag_magnitude < 1e-15

    def test_purity_matches_trace_of_square(self):
        s = StateVector.from_amplitudes("AB", [0.3, 0.5j, -0.2, 0.4], normalize=True)
        rho = partial_trace(outer(s), "B").entries
        assert coherence_report(s, "B").purity == pytest.approx(np.trace(rho @ rho).real, abs=1e-12)

    def test_coherence_transfer(self):
        # reduced states frozen, post-beam-splitter correlation tracks cos(phi)
        for phi in GRID:
            s = entangled_state(phi)
            for sub in "AB":
                np.testing.assert_allclose(partial_trace(outer(s), sub).entries, np.diag([0.5, 0.5]), atol=1e-12)
            # the relative phase e^{i phi} on the mode-2 pair is what phi_A = phi imprints
            p = oracle_probabilities(RtoCircuit(0.0, 0.0), source=s)
            c = p[0, 0] + p[1, 1] - p[0, 1] - p[1, 0]
            assert c == pytest.approx(math.cos(phi), abs=1e-12)
            assert c == pytest.approx(correlation_at(phi, 0.0), abs=1e-12)


class TestOutcomeDistribution:
    def test_measurement_state_is_definite(self):
        t = outcome_distribution(entangled_state())
        assert t.p[0, 1] == 0.0 and t.p[1, 0] == 0.0
        assert t.p[0, 0] == pytest.approx(0.5, abs=1e-15)
        assert t.p[1, 1] == pytest.approx(0.5, abs=1e-15)
        assert t.p_same == pytest.approx(1.0, abs=1e-15)

    def test_basis_state(self):
        t = outcome_distribution(tensor(basis_state("A", 1), basis_state("B", 2)))
        np.testing.assert_array_equal(t.p, [[0, 1], [0, 0]])

    def test_relative_sign_invisible_without_recombination(self):
        minus = entangled_state(math.pi)
        np.testing.assert_allclose(outcome_distribution(minus).p, outcome_distribution(entangled_state()).p,
                                   atol=1e-15)

    def test_rejects_non_composite(self):
        with pytest.raises(ValueError):
            outcome_distribution(superposition("A"))
