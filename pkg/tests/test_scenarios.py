import numpy as np
import pytest

from risbound import (
    LOAD_SETS,
    ParseError,
    ScenarioSpec,
    generate_scenario,
    load_model,
    load_set,
    ni_bound,
    save_model,
    with_loads,
)


def test_generation_is_deterministic():
    spec = ScenarioSpec(n_s=6, seed=42, direct_path="random")
    t1 = generate_scenario(spec)
    t2 = generate_scenario(spec)
    assert t1.h0 == t2.h0
    assert np.array_equal(t1.a, t2.a)
    assert np.array_equal(t1.b, t2.b)
    assert np.array_equal(t1.gamma, t2.gamma)
    t3 = generate_scenario(ScenarioSpec(n_s=6, seed=43, direct_path="random"))
    assert not np.array_equal(t1.gamma, t3.gamma)


@pytest.mark.parametrize("n_s", [1, 4, 12])
def test_generated_gamma_is_contractive(n_s):
    for seed in range(5):
        th = generate_scenario(ScenarioSpec(n_s=n_s, seed=seed))
        assert np.linalg.norm(th.gamma, 2) <= 0.95 + 1e-12


def test_default_loads_are_short_open():
    th = generate_scenario(ScenarioSpec(n_s=3, seed=0))
    assert th.alpha == -1.0 and th.beta == 1.0


def test_direct_path_policy():
    assert generate_scenario(ScenarioSpec(n_s=3, seed=5)).h0 == 0.0
    assert generate_scenario(ScenarioSpec(n_s=3, seed=5, direct_path="random")).h0 != 0.0


def test_with_loads_swaps_only_terminations():
    th = generate_scenario(ScenarioSpec(n_s=5, seed=1, direct_path="random"))
    pin = with_loads(th, "pin")
    assert pin.alpha == LOAD_SETS["PIN"].alpha
    assert pin.beta == LOAD_SETS["PIN"].beta
    assert pin.h0 == th.h0
    assert np.array_equal(pin.a, th.a)
    assert np.array_equal(pin.b, th.b)
    assert np.array_equal(pin.gamma, th.gamma)


def test_reciprocal_scenario_has_symmetric_coupling():
    th = generate_scenario(ScenarioSpec(n_s=6, seed=2, reciprocal=True))
    assert np.allclose(th.gamma, th.gamma.T, atol=1e-15)
    th2 = generate_scenario(ScenarioSpec(n_s=6, seed=2))
    assert not np.allclose(th2.gamma, th2.gamma.T, atol=1e-6)


def test_coupling_scale_zero_decouples_elements():
    th = generate_scenario(ScenarioSpec(n_s=5, seed=3, coupling_scale=0.0))
    off = th.gamma[~np.eye(5, dtype=bool)]
    assert np.all(off == 0)


def test_coupling_scale_keeps_passivity():
    for scale in (0.5, 2.0, 10.0):
        th = generate_scenario(ScenarioSpec(n_s=5, seed=3, coupling_scale=scale))
        assert np.linalg.norm(th.gamma, 2) <= 0.95 + 1e-12


def test_spec_validation():
    with pytest.raises(ValueError):
        ScenarioSpec(n_s=0, seed=0)
    with pytest.raises(ValueError):
        ScenarioSpec(n_s=2, seed=0, max_singular_value=1.0)
    with pytest.raises(ValueError):
        ScenarioSpec(n_s=2, seed=0, coupling_scale=-1.0)
    with pytest.raises(ValueError):
        ScenarioSpec(n_s=2, seed=0, direct_path="maybe")


def test_save_load_round_trip_exact(tmp_path):
    th = generate_scenario(ScenarioSpec(n_s=4, seed=9, direct_path="random"))
    path = tmp_path / "model.json"
    save_model(th, path)
    back = load_model(path)
    assert back.alpha == th.alpha and back.beta == th.beta and back.h0 == th.h0
    assert np.array_equal(back.a, th.a)
    assert np.array_equal(back.b, th.b)
    assert np.array_equal(back.gamma, th.gamma)


def test_load_rejects_invalid_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"n_s": 2,\n  "alpha": [1, 0\n}\n')
    with pytest.raises(ParseError, match=r"line \d+, column \d+"):
        load_model(path)


def test_load_rejects_missing_fields(tmp_path):
    path = tmp_path / "partial.json"
    path.write_text('{"n_s": 2, "alpha": [1, 0]}')
    with pytest.raises(ParseError, match="missing field"):
        load_model(path)


def _valid_doc():
    return {
        "n_s": 2,
        "alpha": [-1.0, 0.0],
        "beta": [1.0, 0.0],
        "h0": [0.0, 0.0],
        "a": [[1.0, 0.0], [0.5, 0.0]],
        "b": [[1.0, 0.0], [0.0, 0.5]],
        "gamma": [[[0.0, 0.0], [0.1, 0.0]], [[0.1, 0.0], [0.0, 0.0]]],
    }


@pytest.mark.parametrize(
    "mutate, fragment",
    [
        (lambda d: d.update(n_s=-1), "n_s"),
        (lambda d: d.update(alpha=[1.0]), "alpha"),
        (lambda d: d.update(h0=["x", 0.0]), "h0"),
        (lambda d: d.update(a=[[1.0, 0.0]]), "'a'"),
        (lambda d: d.update(b=[[1.0, 0.0], [float("nan"), 0.0]]), "b\\[1\\]"),
        (lambda d: d.update(gamma=[[[0.0, 0.0]]]), "gamma"),
        (lambda d: d["gamma"][1].pop(), "gamma\\[1\\]"),
    ],
)
def test_load_rejects_malformed_documents(tmp_path, mutate, fragment):
    import json

    doc = _valid_doc()
    mutate(doc)
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(ParseError, match=fragment):
        load_model(path)


def test_load_set_values():
    pm = load_set("pm")
    assert pm.alpha == -1.0 and pm.beta == 1.0
    pin = load_set("PIN")
    assert pin.alpha == pytest.approx(0.6366 - 0.7712j)
    assert pin.beta == pytest.approx(-0.8116)
    zo = load_set("01")
    assert zo.alpha == 0.0 and zo.beta == 1.0
    with pytest.raises(ValueError, match="unknown load set"):
        load_set("varactor")


def test_generated_scenarios_keep_norm_bound_valid():
    # the passivity cap keeps gamma * |loads| away from 1 for every standard
    # termination, so the closed-form bound always applies
    for seed in range(5):
        th = generate_scenario(ScenarioSpec(n_s=6, seed=700 + seed, direct_path="random"))
        for name in sorted(LOAD_SETS):
            res = ni_bound(with_loads(th, name))
            assert res.valid and np.isfinite(res.value)
