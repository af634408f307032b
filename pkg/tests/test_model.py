import numpy as np
import pytest

from risbound import (
    InvalidNoise,
    ModelParameters,
    SingularResolvent,
    SingularUpdate,
    capacity_from_gain,
    channel_gain,
    channel_gain_batch,
    channel_gain_full,
    encode_loads,
    prepare_baseline,
    reduce_model,
    shannon_capacity,
    woodbury_channel,
)
from util import naive_channel, random_model, toy_model


def test_encode_loads_values():
    assert np.array_equal(encode_loads([0, 1], -1, 1), np.array([-1, 1], dtype=complex))
    assert np.array_equal(encode_loads([0, 0, 0], 2j, 5), np.full(3, 2j))
    pin = encode_loads([1, 0, 1], 0.6366 - 0.7712j, -0.8116)
    assert pin[0] == -0.8116 and pin[1] == 0.6366 - 0.7712j and pin[2] == -0.8116


def test_encode_loads_rejects_nonbinary():
    with pytest.raises(ValueError):
        encode_loads([0, 2], -1, 1)
    with pytest.raises(ValueError):
        encode_loads([[0, 1]], -1, 1)


def test_model_validation():
    with pytest.raises(ValueError):
        ModelParameters(alpha=-1, beta=1, h0=0, a=[1, 1], b=[1], gamma=[[0]])
    with pytest.raises(ValueError):
        ModelParameters(alpha=-1, beta=1, h0=0, a=[1], b=[1], gamma=[[np.nan]])
    with pytest.raises(ValueError):
        ModelParameters(alpha=np.inf, beta=1, h0=0, a=[1], b=[1], gamma=[[0]])


def test_channel_gain_scalar_cases():
    th = toy_model()
    assert channel_gain(th, [1.0]) == pytest.approx(1.0)
    th = toy_model(gamma=[[0.5]])
    assert channel_gain(th, [1.0]) == pytest.approx(2.0)


def test_channel_gain_matches_dense_oracle():
    for seed in range(10):
        th = random_model(3, seed)
        v = np.random.default_rng(seed).integers(0, 2, 3)
        r = encode_loads(v, th.alpha, th.beta)
        assert channel_gain(th, r) == pytest.approx(naive_channel(th, v), rel=1e-12)


def test_channel_gain_no_coupling_closed_form():
    rng = np.random.default_rng(7)
    for n in (1, 4, 9):
        th = random_model(n, n, gamma_scale=0.0)
        r = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        expected = th.h0 + np.sum(r * th.a * th.b)
        assert channel_gain(th, r) == pytest.approx(expected, rel=1e-12)


def test_channel_gain_neumann_series():
    # Small spectral radius: the truncated reflection series reproduces the
    # resolvent evaluation.
    th = random_model(6, 3, gamma_scale=0.15)
    v = np.array([1, 0, 1, 1, 0, 1])
    r = encode_loads(v, th.alpha, th.beta)
    pg = r[:, None] * th.gamma
    assert np.max(np.abs(np.linalg.eigvals(pg))) < 0.5
    x = r * th.b
    total = np.zeros(6, dtype=complex)
    term = x.copy()
    for _ in range(65):
        total += term
        term = pg @ term
    series = th.h0 + th.a @ total
    assert abs(series - channel_gain(th, r)) <= 1e-8


@pytest.mark.filterwarnings("ignore::scipy.linalg.LinAlgWarning")
def test_channel_gain_singular_raises():
    th = toy_model(alpha=1.0, gamma=[[1.0]])
    with pytest.raises(SingularResolvent):
        channel_gain(th, [1.0])


def test_channel_gain_full_consistency():
    for seed in range(5):
        th = random_model(5, seed)
        v = np.random.default_rng(seed).integers(0, 2, 5)
        r = encode_loads(v, th.alpha, th.beta)
        assert channel_gain_full(th, np.diag(r)) == pytest.approx(
            channel_gain(th, r), rel=1e-12
        )
        assert channel_gain_full(th, np.zeros((5, 5))) == pytest.approx(th.h0)


def test_channel_gain_batch_matches_loop():
    th = random_model(6, 11)
    rng = np.random.default_rng(0)
    V = rng.integers(0, 2, size=(32, 6))
    H = channel_gain_batch(th, V)
    for k in range(32):
        assert H[k] == pytest.approx(naive_channel(th, V[k]), rel=1e-12)


def test_woodbury_empty_and_full_flips():
    th = random_model(8, 5)
    v0 = np.array([0, 1, 0, 0, 1, 1, 0, 1], dtype=np.uint8)
    base = prepare_baseline(th, v0)
    assert woodbury_channel(base, []) == pytest.approx(
        naive_channel(th, v0), rel=1e-12
    )
    h_flip_all = woodbury_channel(base, range(8))
    assert h_flip_all == pytest.approx(naive_channel(th, 1 - v0), rel=1e-10)


def test_woodbury_random_flips_match_direct():
    rng = np.random.default_rng(123)
    worst = 0.0
    for trial in range(100):
        n = int(rng.integers(2, 17))
        th = random_model(n, 1000 + trial)
        v0 = rng.integers(0, 2, n).astype(np.uint8)
        base = prepare_baseline(th, v0)
        k = int(rng.integers(1, n + 1))
        flips = rng.choice(n, size=k, replace=False)
        w = v0.copy()
        w[flips] ^= 1
        try:
            h = woodbury_channel(base, flips)
        except SingularUpdate:
            continue
        ref = naive_channel(th, w)
        worst = max(worst, abs(h - ref) / max(abs(ref), 1e-30))
    assert worst <= 1e-10


def test_baseline_reproduces_reference():
    th = random_model(9, 2)
    v0 = np.zeros(9, dtype=np.uint8)
    base = prepare_baseline(th, v0)
    assert base.h_ref == pytest.approx(naive_channel(th, v0), rel=1e-12)


def test_reduce_model_identity_when_all_active():
    th = random_model(5, 9)
    red = reduce_model(th, range(5))
    assert np.array_equal(red.a, th.a)
    assert np.array_equal(red.gamma, th.gamma)
    assert red.h0 == th.h0


def test_reduce_model_no_coupling_closed_form():
    th = random_model(6, 4, gamma_scale=0.0)
    red = reduce_model(th, [0, 2, 4], fixed_state="beta")
    assert np.array_equal(red.a, th.a[[0, 2, 4]])
    assert np.array_equal(red.b, th.b[[0, 2, 4]])
    assert np.all(red.gamma == 0)
    expected_h0 = th.h0 + th.beta * np.sum(th.a[[1, 3, 5]] * th.b[[1, 3, 5]])
    assert red.h0 == pytest.approx(expected_h0, rel=1e-12)


@pytest.mark.parametrize("fixed_state", ["alpha", "beta"])
def test_reduce_model_exhaustive_agreement(fixed_state):
    th = random_model(6, 21)
    active = [1, 3, 4]
    red = reduce_model(th, active, fixed_state=fixed_state)
    fill = 0 if fixed_state == "alpha" else 1
    for code in range(8):
        sub = np.array([(code >> 2) & 1, (code >> 1) & 1, code & 1], dtype=np.uint8)
        full = np.full(6, fill, dtype=np.uint8)
        full[active] = sub
        h_red = channel_gain(red, encode_loads(sub, red.alpha, red.beta))
        h_full = naive_channel(th, full)
        assert abs(h_red - h_full) <= 1e-10 * max(1.0, abs(h_full))


def test_reduce_model_validation():
    th = random_model(4, 0)
    with pytest.raises(ValueError):
        reduce_model(th, [])
    with pytest.raises(ValueError):
        reduce_model(th, [5])
    with pytest.raises(ValueError):
        reduce_model(th, [0], fixed_state="gamma")


def test_capacity_values():
    assert shannon_capacity(0.0, 1.0, 1.0) == 0.0
    assert shannon_capacity(1.0, 1.0, 1.0) == pytest.approx(1.0)
    assert capacity_from_gain(1e-3, 10.0, 1e-5) == pytest.approx(
        np.log2(1001.0), abs=1e-10
    )


def test_capacity_monotone_and_errors():
    rng = np.random.default_rng(5)
    gains = np.sort(rng.uniform(0, 10, 200))
    caps = [capacity_from_gain(g, 10.0, 1e-5) for g in gains]
    assert np.all(np.diff(caps) > 0)
    with pytest.raises(InvalidNoise):
        capacity_from_gain(1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        capacity_from_gain(1.0, -1.0, 1.0)
    with pytest.raises(ValueError):
        capacity_from_gain(-1.0, 1.0, 1.0)
