import json

import numpy as np
import pytest

from splitssa import (
    MassAction,
    bundled_model,
    bundled_model_names,
    evaluate_propensity,
    load_model,
    load_model_file,
    register_custom_form,
    save_model_file,
)


def test_bundled_names():
    assert bundled_model_names() == ["bimolecular", "birth_death", "dimerization", "illposed"]


class TestGoldenModels:
    """The shipped files must carry exactly the documented stoichiometry and rates."""

    def test_birth_death(self):
        doc = bundled_model("birth_death")
        net = doc.network
        assert net.stoich.tolist() == [[-1, 1]]
        assert isinstance(net.propensities[0], MassAction)
        assert net.propensities[0].rate_constant == 5.0
        assert net.propensities[1].rate_constant == 0.05
        assert doc.initial_state.tolist() == [50]
        assert doc.split.set_one == (0,) and doc.split.set_two == (1,)

    def test_dimerization_rate_fixes_equilibrium_mean(self):
        doc = bundled_model("dimerization")
        k = doc.network.propensities[0].rate_constant
        nu = doc.network.propensities[1].rate_constant
        # the pair-sink rate is normalized so sqrt(k / (2 nu)) = 100
        assert np.sqrt(k / (2 * nu)) == pytest.approx(100.0)
        assert doc.network.stoich.tolist() == [[-1, 2]]
        assert doc.network.propensities[1].reactant_multiplicity == (2,)

    def test_bimolecular_matrix(self):
        net = bundled_model("bimolecular").network
        assert net.stoich.tolist() == [[-1, 0, 1], [0, -1, 1]]
        x = np.array([3, 4])
        w = [evaluate_propensity(net, r, x) for r in range(3)]
        assert w == [5.0, 5.0, pytest.approx(0.005 * 12)]

    def test_illposed_rates(self):
        doc = bundled_model("illposed")
        net = doc.network
        # state changes per firing: +1, -2, -2, +1
        assert net.stoich.tolist() == [[-1, 2, 2, -1]]
        x = np.array([3])
        assert [evaluate_propensity(net, r, x) for r in range(4)] == [10.0, 3.0, 3.0, 6.0]
        assert doc.initial_state.tolist() == [10]
        assert doc.split.set_one == (0, 1) and doc.split.set_two == (2, 3)

    def test_illposed_group_two_has_zero_net_drift(self):
        # the troublesome sub-system moves mass (-2 and +1 at rates w and
        # 2w) yet its expected drift cancels exactly
        net = bundled_model("illposed").network
        for x in range(3, 30):
            s = np.array([x])
            drift = sum(
                -net.stoich[0, r] * evaluate_propensity(net, r, s) for r in (2, 3)
            )
            assert drift == 0.0


def test_round_trip_all_bundled(tmp_path):
    from importlib import resources

    for name in bundled_model_names():
        raw = json.loads((resources.files("splitssa") / "models" / f"{name}.json").read_text())
        p = tmp_path / f"{name}.json"
        save_model_file(p, raw)
        doc = load_model_file(p)
        ref = bundled_model(name)
        assert np.array_equal(doc.network.stoich, ref.network.stoich)
        assert doc.network.channel_names == ref.network.channel_names
        x = ref.initial_state
        for r in range(ref.network.channel_count):
            assert evaluate_propensity(doc.network, r, x) == evaluate_propensity(
                ref.network, r, x
            )


def test_builtin_custom_form():
    doc = load_model(
        {
            "species": ["A"],
            "channels": [
                {"stoich": [1], "propensity": {"type": "builtin", "form": "linear",
                                               "params": {"species": 0, "rate": 0.5}}}
            ],
        }
    )
    assert evaluate_propensity(doc.network, 0, np.array([8])) == pytest.approx(4.0)


def test_polynomial_builtin():
    doc = load_model(
        {
            "species": ["A"],
            "channels": [
                {"stoich": [1], "propensity": {"type": "builtin", "form": "polynomial",
                                               "params": {"species": 0, "coefficients": [0, 0.5, 0.25]}}}
            ],
        }
    )
    # 0.5 x + 0.25 x^2 at x=4 -> 6
    assert evaluate_propensity(doc.network, 0, np.array([4])) == pytest.approx(6.0)


def test_register_custom_form():
    register_custom_form("test_const7", lambda: (lambda x: 7.0))
    doc = load_model(
        {
            "species": ["A"],
            "channels": [
                {"stoich": [-1], "propensity": {"type": "builtin", "form": "test_const7"}}
            ],
        }
    )
    assert evaluate_propensity(doc.network, 0, np.array([0])) == 7.0
    with pytest.raises(ValueError):
        register_custom_form("test_const7", lambda: (lambda x: 7.0))


class TestSchemaErrors:
    def test_unknown_form(self):
        with pytest.raises(ValueError, match="unknown builtin"):
            load_model(
                {"species": ["A"],
                 "channels": [{"stoich": [1], "propensity": {"type": "builtin", "form": "nope"}}]}
            )

    def test_stoich_length_mismatch(self):
        with pytest.raises(ValueError, match="stoich"):
            load_model(
                {"species": ["A", "B"],
                 "channels": [{"stoich": [1], "propensity": {"type": "mass_action", "rate": 1, "multiplicity": [1, 0]}}]}
            )

    def test_bad_split(self):
        with pytest.raises(ValueError):
            load_model(
                {"species": ["A"],
                 "channels": [{"stoich": [1], "propensity": {"type": "mass_action", "rate": 1, "multiplicity": [1]}}],
                 "split": {"set_one": [0, 1], "set_two": []}}
            )

    def test_mesh_rates_per_species(self):
        with pytest.raises(ValueError, match="one rate per species"):
            load_model(
                {"species": ["A", "B"],
                 "channels": [{"stoich": [1, 0], "propensity": {"type": "mass_action", "rate": 1, "multiplicity": [1, 0]}}],
                 "mesh": {"cells": 2, "connections": [{"from": 0, "to": 1, "rates": [1.0]}]}}
            )


def test_mesh_section_loads():
    doc = load_model(
        {
            "species": ["A"],
            "channels": [{"stoich": [-1], "propensity": {"type": "mass_action", "rate": 1, "multiplicity": [0]}}],
            "mesh": {"cells": 3, "connections": [
                {"from": 0, "to": 1, "rates": [2.0]},
                {"from": 1, "to": 0, "rates": [2.0]},
            ]},
        }
    )
    assert doc.mesh.cell_count == 3
    assert doc.mesh.connections() == [(0, 1), (1, 0)]
