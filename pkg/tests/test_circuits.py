import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rtosim.circuits import (
    DETECTOR_PAIRS,
    MziCircuit,
    RtoCircuit,
    coincidence_amplitude,
    coincidence_probabilities,
    enumerate_paths,
    mzi_probabilities,
)
from rtosim.measurement import oracle_probabilities
from rtosim.optics import ElementKind, PhaseConvention, random_convention

GRID = np.linspace(0, math.pi, 101)
finite = st.floats(min_value=-20, max_value=20, allow_nan=False)


class TestMzi:
    @pytest.mark.parametrize("delta, expected", [
        (0.0, (1.0, 0.0)),
        (math.pi, (0.0, 1.0)),
        (math.pi / 2, (0.5, 0.5)),
    ])
    def test_reference_points(self, delta, expected):
        assert mzi_probabilities(MziCircuit(0.4, 0.4 + delta)) == pytest.approx(expected, abs=1e-12)

    @given(finite, finite)
    def test_cosine_law_and_normalization(self, phi1, phi2):
        p1, p2 = mzi_probabilities(MziCircuit(phi1, phi2))
        assert abs(p1 - (1 + math.cos(phi2 - phi1)) / 2) < 1e-12
        assert abs(p1 + p2 - 1) < 1e-15

    @given(finite, finite)
    def test_without_bs2_is_which_path(self, phi1, phi2):
        assert mzi_probabilities(MziCircuit(phi1, phi2, bs2_present=False)) == pytest.approx((0.5, 0.5), abs=1e-12)

    def test_non_finite_phase_rejected(self):
        with pytest.raises(ValueError):
            MziCircuit(math.inf, 0.0)


class TestEnumeratePaths:
    def test_a1_b2_branches(self):
        solid, dashed = enumerate_paths(RtoCircuit(0.1, 0.7), (1, 2))
        assert (solid.branch, dashed.branch) == ("solid", "dashed")
        ports = lambda p: {s.subsystem: s.port for s in p.elements if s.port}  # noqa: E731
        assert ports(solid)["A"] == "transmit"
        assert ports(dashed)["A"] == "reflect"
        # station B reads its output ports in the opposite order to A, so B2 on
        # the solid arm is reached by transmission (see circuits module docstring)
        assert (ports(solid)["B"], ports(dashed)["B"]) == ("transmit", "reflect")

    def test_two_paths_per_pair(self):
        assert len(enumerate_paths(RtoCircuit(), (1, 1))) == 2

    def test_eight_paths_one_port_per_photon(self):
        c = RtoCircuit(0.3, 1.9)
        paths = [p for pair in DETECTOR_PAIRS for p in enumerate_paths(c, pair)]
        assert len(paths) == 8
        for p in paths:
            bs = p.beam_splitter_ports()
            assert sorted(s.subsystem for s in bs) == ["A", "B"]
            shifters = [s for s in p.elements if s.element.kind is ElementKind.PHASE_SHIFTER]
            # phi_B rides the solid arm, phi_A the dashed arm
            assert [s.subsystem for s in shifters] == (["B"] if p.branch == "solid" else ["A"])

    @pytest.mark.parametrize("pair", [(0, 1), (1, 3), "xy", None])
    def test_invalid_pair(self, pair):
        with pytest.raises(ValueError):
            enumerate_paths(RtoCircuit(), pair)


class TestCoincidenceAmplitude:
    def test_constructive_and_destructive(self):
        # zero phase: "same" pairs constructive, |(1 + 1)/(2 sqrt2)|^2 = 1/2;
        # "different" pairs cancel
        c = RtoCircuit(0.0, 0.0)
        assert abs(coincidence_amplitude(c, (1, 1))) ** 2 == pytest.approx(0.5, abs=1e-15)
        assert abs(coincidence_amplitude(c, (1, 2))) ** 2 < 1e-30
        c = RtoCircuit(0.0, math.pi)
        assert abs(coincidence_amplitude(c, (1, 2))) ** 2 == pytest.approx(0.5, abs=1e-15)
        assert abs(coincidence_amplitude(c, (2, 2))) ** 2 < 1e-30

    def test_matches_state_vector_oracle_on_grid(self):
        for delta in GRID:
            c = RtoCircuit(0.25, 0.25 + delta)
            np.testing.assert_allclose(coincidence_probabilities(c), oracle_probabilities(c), atol=1e-12)

    def test_matches_oracle_under_random_conventions(self):
        rng = np.random.default_rng(2024)
        for _ in range(20):
            conv = random_convention(rng)
            for delta in GRID[::10]:
                c = RtoCircuit(-0.6, -0.6 + delta, conv)
                np.testing.assert_allclose(coincidence_probabilities(c), oracle_probabilities(c), atol=1e-12)

    @given(finite, finite)
    def test_probability_conserved_and_bounded(self, a, b):
        p = coincidence_probabilities(RtoCircuit(a, b))
        assert abs(p.sum() - 1) < 1e-12
        assert p.max() <= 0.5 + 1e-12

    def test_depends_only_on_phase_difference(self):
        rng = np.random.default_rng(99)
        for _ in range(25):
            a, b, d = rng.uniform(-2 * math.pi, 2 * math.pi, 3)
            conv = random_convention(rng)
            np.testing.assert_allclose(coincidence_probabilities(RtoCircuit(a + d, b + d, conv)),
                                       coincidence_probabilities(RtoCircuit(a, b, conv)), atol=1e-12)

    def test_convention_is_carried(self):
        conv = PhaseConvention(bs_reflection_phase=-math.pi / 2, mirror_phase=0.3)
        assert enumerate_paths(RtoCircuit(convention=conv), (2, 2))
        assert RtoCircuit(convention=conv).convention is conv
