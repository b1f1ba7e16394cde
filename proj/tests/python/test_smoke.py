import itertools
import math

import pytest

import ccnet


def brute_run_tail(T, v, p):
    total = 0.0
    for bits in itertools.product((0, 1), repeat=T):
        run = best = 0
        for b in bits:
            run = run + 1 if b else 0
            best = max(best, run)
        if best >= v:
            k = sum(bits)
            total += p**k * (1 - p) ** (T - k)
    return total


def test_version():
    assert ccnet.__version__ == "0.3.0"


@pytest.mark.parametrize("v,p", [(1, 0.2), (3, 0.5), (6, 0.9)])
def test_run_tail_matches_enumeration(v, p):
    assert ccnet.run_ccdf_demoivre(10, v, p) == pytest.approx(brute_run_tail(10, v, p), abs=1e-12)


def test_binomial_tail_edges():
    assert ccnet.binomial_tail(20, 0, 0.3) == pytest.approx(1.0)
    assert ccnet.binomial_tail(20, 20, 0.5) == pytest.approx(0.5**20)


def test_block_success_single_interferer():
    ch = ccnet.default_channel()
    ch.noise_power = 0.0
    ch.pathloss_exp = 4.0
    assert ccnet.cond_success_prob_block([10.0], 10.0, ch) == pytest.approx(0.5)


def test_analytic_restless_full_access_matches_run_tail():
    model = ccnet.NetworkModel(1e-4, 10.0, ccnet.default_channel())
    res = ccnet.prob_block_controllable_restless(20, 4, 1.0, model)
    assert 0.0 <= res["value"] <= 1.0
    assert res["abs_error"] >= 0.0


def test_regret_envelope():
    assert ccnet.regret_envelope(2, 1, 1, 1.0) == pytest.approx(math.sqrt(2 * math.log(2)))
    ref = math.sqrt(64 * 5000 * 10 * math.log(5000)) + 800
    assert ccnet.regret_envelope_explicit(5000, 20, 10) == pytest.approx(ref)


def test_config_roundtrip_and_errors():
    text = ccnet.parse_config("lambda = 1e-3\nT = 10\nv = 3\n")
    assert ccnet.parse_config(text) == text
    with pytest.raises(ValueError, match="q"):
        ccnet.parse_config("q = 1.5\n")


def test_sweep_is_reproducible():
    cfg = "lambda = 1e-3\nnum_realizations = 200\nq_grid = [0.5, 1]\n"
    a = ccnet.estimate_block_controllability(cfg, ["seed=9"])
    b = ccnet.estimate_block_controllability(cfg, ["seed=9", "threads=3"])
    assert a == b
    assert len(a) == 8


def test_ts_runs():
    out = ccnet.run_ts("lambda = 5e-4\nalpha = 4\nK = 50\n")
    assert len(out[0]["chosen_arm"]) == 50
    regret = out[0]["cumulative_regret"]
    assert all(b >= a for a, b in zip(regret, regret[1:]))


def test_selftest_passes():
    failures, report = ccnet.selftest()
    assert failures == 0, report
