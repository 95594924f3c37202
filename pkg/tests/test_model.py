import json

import pytest

from cfrobust.errors import ParseError, ValidationError
from cfrobust.model import (ConfigBundle, LinkBudget, NetworkConfig, RobustnessBounds,
                            SolverParams, apply_overrides, dump_config, load_config,
                            load_config_dict, serialize, validate)


def write(tmp_path, data):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return p


def test_reference_dimensions_valid(tmp_path):
    p = write(tmp_path, {"network": {"num_aps": 16, "antennas_per_ap": 4, "num_ues": 32,
                                     "num_scheduled": 16}})
    net, link, bounds, solver = load_config(p)
    assert (net.num_aps, net.antennas_per_ap, net.num_ues, net.num_scheduled) == (16, 4, 32, 16)
    assert net.num_antennas == 64


def test_zero_scheduled_rejected(tmp_path):
    p = write(tmp_path, {"network": {"num_scheduled": 0}})
    with pytest.raises(ValidationError, match="num_scheduled"):
        load_config(p)


def test_missing_mc_samples_defaults(tmp_path):
    p = write(tmp_path, {"solver": {"step_d": 0.25}})
    _, _, _, solver = load_config(p)
    assert solver.mc_samples == 2000
    assert solver.step_d == 0.25


def test_malformed_file(tmp_path):
    with pytest.raises(ParseError):
        load_config(write(tmp_path, "{not json"))
    with pytest.raises(ParseError):
        load_config(tmp_path / "missing.json")
    with pytest.raises(ParseError):
        load_config(write(tmp_path, "[1, 2]"))


def test_unknown_keys_rejected(tmp_path):
    with pytest.raises(ValidationError, match="unknown key"):
        load_config(write(tmp_path, {"network": {"num_antennas": 3}}))
    with pytest.raises(ValidationError, match="unknown config section"):
        load_config(write(tmp_path, {"channel": {}}))


def test_validate_alpha_bounds():
    assert validate(ConfigBundle(robustness=RobustnessBounds(0.05, 0.3))) is None
    err = validate(ConfigBundle(robustness=RobustnessBounds(0.3, 0.05)))
    assert isinstance(err, ValidationError)
    assert "alpha_lo" in str(err)


def test_validate_n_above_antennas():
    net = NetworkConfig(num_aps=2, antennas_per_ap=2, num_ues=10, num_scheduled=5)
    err = validate(ConfigBundle(network=net))
    assert isinstance(err, ValidationError) and "exceeds M" in str(err)


def test_validate_requires_more_ues_than_scheduled():
    net = NetworkConfig(num_ues=16, num_scheduled=16)
    assert "must exceed" in str(validate(ConfigBundle(network=net)))


@pytest.mark.parametrize("section, kwargs", [
    ("link", {"rho_f": 0.0}),
    ("link", {"noise_var": -1.0}),
    ("solver", {"step_d": 0.0}),
    ("solver", {"iters_d": 0}),
    ("solver", {"hessian_tol": -1e-3}),
    ("network", {"area_side": 0.0}),
    ("network", {"num_ues": 2.5}),
    ("network", {"seed": -1}),
])
def test_validate_field_invariants(section, kwargs):
    cls = {"link": LinkBudget, "solver": SolverParams, "network": NetworkConfig}[section]
    bundle = ConfigBundle(**{section: cls(**kwargs)})
    assert isinstance(validate(bundle), ValidationError)


def test_round_trip(tmp_path):
    bundle = ConfigBundle(network=NetworkConfig(num_ues=40, seed=7),
                          solver=SolverParams(iters_d=10, backtracking=False))
    path = tmp_path / "out.json"
    dump_config(bundle, path)
    again = load_config(path)
    assert again == bundle
    assert serialize(again) == serialize(bundle)


def test_every_field_serialized():
    data = serialize(ConfigBundle())
    for name, cls in [("network", NetworkConfig), ("link", LinkBudget),
                      ("robustness", RobustnessBounds), ("solver", SolverParams)]:
        assert set(data[name]) == set(cls.__dataclass_fields__)


def test_integer_floats_coerced():
    bundle = load_config_dict({"network": {"num_ues": 40.0}})
    assert bundle.network.num_ues == 40 and isinstance(bundle.network.num_ues, int)


def test_overrides():
    raw = apply_overrides({}, ["network.num_ues=40", "iters_d=7", "backtracking=false"])
    bundle = load_config_dict(raw)
    assert bundle.network.num_ues == 40
    assert bundle.solver.iters_d == 7
    assert bundle.solver.backtracking is False
    with pytest.raises(ParseError):
        apply_overrides({}, ["no_equals_sign"])
    with pytest.raises(ValidationError):
        apply_overrides({}, ["nonexistent=1"])


def test_link_budget_snr():
    link = LinkBudget.from_snr_db(10.0)
    assert link.rho_f == pytest.approx(10.0)
    assert link.snr_db == pytest.approx(10.0)


def test_bundle_unpacks():
    net, link, bounds, solver = ConfigBundle()
    assert isinstance(net, NetworkConfig) and isinstance(solver, SolverParams)
