import cmath
import math

import pytest

import fdris

TINY = """
experiment.profile = small
experiment.episodes = 2
experiment.steps = 30
experiment.runs = 1
train.batch = 8
agent.hidden = 8
"""


def test_config_defaults_and_overrides():
    c = fdris.Config.parse("")
    assert c.episodes == 100 and c.mt == 10 and c.n1 == 36
    q = fdris.Config.parse("agent.variant = msf-q-drl\nagent.bits = 2\n")
    assert q.variant == "msf-q-drl" and q.bits == 2
    s = fdris.Config.parse("experiment.scenario = shadowed-urban", profile="small")
    assert s.mt == 4 and s.p_a_max == 3.16


def test_config_errors_are_typed():
    with pytest.raises(fdris.ConfigError, match="train.gamma"):
        fdris.Config.parse("train.gamma = 1.5")
    with pytest.raises(fdris.ConfigError):
        fdris.Config.parse("no.such.key = 1")
    assert issubclass(fdris.ConfigError, fdris.FdrisError)


def test_signaling_table():
    assert fdris.signaling_bits("msf-drl-lssic", 36, 36) == 4608
    assert fdris.signaling_bits("msf-q-drl", 36, 36, bits=2) == 144
    assert fdris.signaling_bits("gp-msf-q-drl", 36, 36, bits=2, groups=9) == 36


def test_path_loss():
    assert fdris.path_loss_db(3.5e9, 1.0, 2.2) == pytest.approx(-43.33, abs=0.01)


def test_environment_step():
    c = fdris.Config.parse("", profile="small")
    env = fdris.Environment(c, run=0)
    with pytest.raises(fdris.LifecycleError):
        env.step(env.random_action(1))
    state = env.reset()
    assert len(state) == 2 + c.n1 + c.n2 + 4 * c.mt + 2
    a = env.random_action(3)
    a.validate(c)
    assert all(abs(abs(w) - 1.0) < 1e-12 for w in [cmath.exp(1j * t) for t in a.theta_u])
    out = env.step(a)
    assert out["reward"] == pytest.approx(0.5 * out["r_bs"] + 0.5 * out["r_dl"])
    assert out["r_bs"] == pytest.approx(math.log2(1 + out["gamma_bs"]))
    bad = env.random_action(4)
    bad.p_a = 10.0
    with pytest.raises(fdris.ActionError):
        env.step(bad)


def test_training_is_reproducible_and_evaluates():
    c = fdris.Config.parse(TINY)
    a = fdris.train(c)
    b = fdris.train(c)
    strip = lambda rows: [{k: v for k, v in r.items() if k != "wall_ms"} for r in rows]
    assert strip(a["mean"]) == strip(b["mean"])
    assert a["checkpoints"][0] == b["checkpoints"][0]
    assert len(a["mean"]) == 2 and a["mean"][0]["window"] == 30
    r_bs, r_dl = fdris.evaluate_cdf(c, a["checkpoints"][0], episodes=1)
    assert len(r_bs) == 30 and r_bs == sorted(r_bs) and r_dl == sorted(r_dl)
    with pytest.raises(fdris.CheckpointError):
        fdris.evaluate_cdf(c, None)


def test_selfcheck_passes():
    results = fdris.selfcheck()
    assert results and all(passed for _, passed, _ in results)
