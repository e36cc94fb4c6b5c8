"""Noise-model coefficients against closed forms and the dense oracle."""

import csv
import math

import numpy as np
import pytest

from graphent import graphs, oracle, states
from conftest import random_graph

SQRT2 = math.sqrt(2.0)


class TestCoefficients:
    def test_thermal_power_of_weight(self):
        st = states.DiagonalState(graphs.chain(4), states.Thermal(0.3))
        assert st.coefficient(0b0011) == pytest.approx(0.09)
        assert st.coefficient(0) == 1.0

    def test_local_depolarised_identity_y(self):
        for p in (0.0, 0.3, 1.0):
            st = states.DiagonalState(graphs.ring(4), states.LocalDepolarised(p))
            assert st.coefficient(0) == 1.0

    def test_global_depolarised_closed_form(self):
        st = states.DiagonalState(graphs.chain(3), states.GlobalDepolarised(2.0))
        for y in range(1, 8):
            assert st.coefficient(y) == pytest.approx(0.2)
        assert st.coefficient(0) == 1.0

    def test_inhomogeneous_product(self):
        st = states.DiagonalState(
            graphs.chain(3), states.ThermalSites((0.2, 0.5, 0.7))
        )
        assert st.coefficient(0b101) == pytest.approx(0.14)
        assert np.allclose(
            st.coefficient_table(), [st.coefficient(y) for y in range(8)]
        )

    def test_table_matches_scalar_path(self, rng):
        for _ in range(8):
            g = random_graph(rng, int(rng.integers(2, 7)))
            model = [
                states.Thermal(float(rng.uniform(0, 0.95))),
                states.LocalDepolarised(float(rng.uniform(0, 1))),
                states.GlobalDepolarised(float(rng.uniform(0, 6))),
                states.ThermalSites(tuple(rng.uniform(0, 0.9, g.n))),
            ][int(rng.integers(0, 4))]
            st = states.DiagonalState(g, model)
            assert np.allclose(
                st.coefficient_table(),
                [st.coefficient(y) for y in range(1 << g.n)],
                atol=1e-12,
            )

    def test_model_validation(self):
        with pytest.raises(ValueError):
            states.Thermal(1.0)
        with pytest.raises(ValueError):
            states.LocalDepolarised(1.2)
        with pytest.raises(ValueError):
            states.GlobalDepolarised(-0.5)
        with pytest.raises(ValueError):
            states.DiagonalState(graphs.chain(2), states.ThermalSites((0.1,)))


class TestOracleAgreement:
    """coefficient(st, y) must equal Tr(rho K_y) on the dense state."""

    def test_all_models_trace_rule(self, rng):
        for _ in range(6):
            n = int(rng.integers(2, 6))
            g = random_graph(rng, n, p=0.6)
            for model in (
                states.Thermal(float(rng.uniform(0, 0.9))),
                states.ThermalSites(tuple(rng.uniform(0, 0.9, n))),
                states.GlobalDepolarised(float(rng.uniform(0, 5))),
                states.LocalDepolarised(float(rng.uniform(0, 1))),
            ):
                st = states.DiagonalState(g, model)
                rho = oracle.build_state(st)
                for y in range(1 << n):
                    trace = np.trace(rho @ oracle.k_operator(g, y)).real
                    assert trace == pytest.approx(st.coefficient(y), abs=1e-10)

    def test_local_depolarising_channel_route(self):
        # applying the single-site channel to the pure graph state site by site
        for n, g in ((4, graphs.chain(4)), (5, graphs.star(5))):
            psi = oracle.graph_state_vector(g)
            pure = np.outer(psi, psi.conj())
            for p in (0.1, 0.468, 0.9):
                channelled = oracle.apply_local_depolarising(pure, p, n)
                model = oracle.build_state(
                    states.DiagonalState(g, states.LocalDepolarised(p))
                )
                assert np.abs(channelled - model).max() < 1e-12

    def test_explicit_validity_matches_dense_psd(self, rng):
        for _ in range(24):
            n = int(rng.integers(2, 7))
            g = random_graph(rng, n, p=0.5)
            table = rng.uniform(-0.4, 0.8, 1 << n)
            table[0] = 1.0
            st = states.DiagonalState(g, states.Explicit(tuple(table)))
            dense_min = oracle.eigenvalues(oracle.build_state(st)).min()
            assert st.check_valid() == (dense_min >= -1e-12)


class TestTemperature:
    def test_distillable_constant(self):
        t = states.from_beta_delta(math.log(SQRT2 + 1.0))
        assert t.s == pytest.approx(SQRT2 - 1.0, abs=1e-14)
        assert t.t_over_delta == pytest.approx(1.0 / math.log(1.0 + SQRT2), abs=1e-14)

    def test_separable_constant(self):
        t = states.from_beta_delta(math.log(SQRT2))
        assert t.s == pytest.approx(3.0 - 2.0 * SQRT2, abs=1e-14)
        assert t.t_over_delta == pytest.approx(1.0 / math.log(SQRT2), abs=1e-14)

    def test_infinite_temperature_flag(self):
        t = states.from_s(0.0)
        assert t.infinite and math.isinf(t.t_over_delta)

    def test_roundtrips(self, rng):
        for _ in range(30):
            s = float(rng.uniform(1e-6, 0.999))
            t = states.from_s(s)
            assert states.from_beta_delta(t.beta_delta).s == pytest.approx(
                s, rel=1e-12
            )
            assert states.from_t_over_delta(t.t_over_delta).s == pytest.approx(
                s, rel=1e-12
            )

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            states.from_s(1.0)
        with pytest.raises(ValueError):
            states.from_s(-0.1)


class TestExplicitCsv:
    def test_load_normalises_and_defaults(self, tmp_path):
        path = tmp_path / "coeffs.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["000", "2.0"])
            writer.writerow(["110", "1.0"])
        st = states.explicit_from_csv(graphs.chain(3), str(path))
        assert st.coefficient(0) == 1.0
        assert st.coefficient(0b011) == pytest.approx(0.5)  # "110" = vertices 0,1
        assert st.coefficient(0b100) == 0.0  # missing row defaults to zero

    def test_missing_s0_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("010,0.5\n")
        with pytest.raises(ValueError):
            states.explicit_from_csv(graphs.chain(3), str(path))
