import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from glocal.learner import (LearnerConfig, PolicyState, clone_policy, effective_prior, evaluate,
                            evaluate_all, gate, init_prior, mark_mastered, success_probabilities, train)


def flat(bank, value, **kw):
    return PolicyState(competence=np.full(bank.N, float(value)), **kw)


def test_init_prior(bank, lcfg):
    a0, g6 = bank.by_label("A0"), bank.by_label("G6")
    p = init_prior(bank, a0, lcfg, np.random.default_rng(0))
    assert p.competence[a0] >= 0.80
    assert p.competence[g6] == 0.01
    assert np.all(np.delete(p.competence, a0) == lcfg.baseline)
    assert p.adaptability == 1.0
    assert p.parent_id is None
    assert p == init_prior(bank, a0, lcfg, np.random.default_rng(0))


def test_init_prior_invalid_task(bank, lcfg):
    with pytest.raises(KeyError):
        init_prior(bank, 99, lcfg, np.random.default_rng(0))


def test_init_prior_unlearnable(bank):
    cfg = LearnerConfig(kappa=50, delta=0.0)
    with pytest.raises(RuntimeError):
        init_prior(bank, bank.by_label("G6"), cfg, np.random.default_rng(0))


def test_effective_prior_examples(bank_tau2):
    b = bank_tau2
    assert effective_prior(flat(b, 0.0), 5, b) == 0.0
    c = np.zeros(b.N)
    c[b.by_label("A0")] = 0.9
    assert effective_prior(PolicyState(c), b.by_label("A1"), b) == pytest.approx(0.9 * math.exp(-0.5))
    assert effective_prior(PolicyState(c), b.by_label("A1"), b) == pytest.approx(0.546, abs=1e-3)
    c = np.full(b.N, 0.1)
    c[7] = 0.8
    assert effective_prior(PolicyState(c), 7, b) == 0.8


def test_train_zero_steps_identity(bank, lcfg):
    p = flat(bank, 0.3)
    assert train(p, 4, 0, bank, lcfg) is p


def test_train_negative_steps(bank, lcfg):
    with pytest.raises(ValueError):
        train(flat(bank, 0.3), 4, -1, bank, lcfg)


def test_train_closed_form_half_gap(bank):
    # no transfer anywhere, so the warm start is irrelevant
    cfg = LearnerConfig(eta=1e-3, kappa=12.0, delta=0.05)
    p = flat(bank, 0.0)
    p.competence[0] = 0.01
    rho = gate(effective_prior(p, 0, bank), 0.0, cfg)
    # choose eta so that rho * eta * adaptability * steps == ln 2
    out = train(p, 0, 1000, bank, replace(cfg, eta=math.log(2) / (rho * 1000)))
    assert out.competence[0] == pytest.approx(0.505)


def test_train_closed_form_without_warm_start(bank):
    cfg = LearnerConfig(warm_start=False)
    p = init_prior(bank, 0, cfg, np.random.default_rng(1))
    t = bank.by_label("A1")
    rho = gate(effective_prior(p, t, bank), bank.tasks[t].difficulty, cfg)
    out = train(p, t, 3000, bank, cfg)
    expect = 1 - (1 - cfg.baseline) * math.exp(-cfg.eta * rho * 3000)
    assert out.competence[t] == pytest.approx(expect, rel=1e-12)
    assert out.steps_trained == p.steps_trained + 3000
    assert out.policy_id == p.policy_id
    others = np.delete(np.arange(bank.N), t)
    assert np.array_equal(out.competence[others], p.competence[others])


def test_train_warm_start_uses_gated_transfer(bank, lcfg):
    p = init_prior(bank, 0, lcfg, np.random.default_rng(1))
    t = bank.by_label("A1")
    prior = effective_prior(p, t, bank)
    rho = gate(prior, bank.tasks[t].difficulty, lcfg)
    out = train(p, t, 3000, bank, lcfg)
    c0 = max(lcfg.baseline, rho * prior)
    expect = 1 - (1 - c0) * math.exp(-lcfg.eta * rho * 3000)
    assert out.competence[t] == pytest.approx(expect, rel=1e-12)


def test_reference_gate_blocks_g6():
    # reference constants of the original surrogate description
    assert gate(0.0, 1.0, LearnerConfig(kappa=12.0, delta=0.05)) < 1e-4
    assert gate(0.0, 1.0, LearnerConfig(kappa=12.0, delta=0.05)) == pytest.approx(
        1 / (1 + math.exp(12 * 0.95)))


def test_shipped_gate_blocks_g6_from_fresh_prior(bank, lcfg):
    p = init_prior(bank, 0, lcfg, np.random.default_rng(0))
    g6 = bank.by_label("G6")
    rho = gate(effective_prior(p, g6, bank), 1.0, lcfg)
    assert rho < 1e-4
    # gain over one full per-task cap of training stays negligible
    assert train(p, g6, 80_000, bank, lcfg).competence[g6] < 0.02


def test_shipped_prior_task_learnable_within_one_cap(bank, lcfg):
    fresh = flat(bank, lcfg.baseline)
    out = train(fresh, 0, 80_000, bank, lcfg)
    assert out.competence[0] > 0.8


def test_gate_extremes_do_not_overflow(lcfg):
    assert gate(1e6, 0.0, lcfg) == 1.0
    assert gate(-1e6, 0.0, lcfg) == 0.0


def test_mark_mastered_examples(bank):
    p = flat(bank, 0.2)
    cfg = LearnerConfig(lam=0.15)
    assert mark_mastered(p, cfg).adaptability == pytest.approx(0.85)
    assert mark_mastered(p, replace(cfg, lam=0.0)).adaptability == 1.0
    for _ in range(5):
        p = mark_mastered(p, cfg)
    assert p.adaptability == pytest.approx(0.85 ** 5)
    assert p.adaptability == pytest.approx(0.4437, abs=1e-4)


def test_clone_isolation_and_lineage(bank):
    p = flat(bank, 0.2, policy_id="G1")
    c = clone_policy(p)
    assert c.parent_id == "G1"
    assert c.policy_id != "G1"
    assert np.array_equal(c.competence, p.competence)
    c.competence[0] = 0.9
    assert p.competence[0] == 0.2
    assert clone_policy(p).policy_id != c.policy_id
    assert clone_policy(p, "L1.0").policy_id == "L1.0"


def test_evaluate_extremes(bank, lcfg, rng):
    assert evaluate(flat(bank, 1.0), 3, bank, lcfg, rng) == 100
    assert evaluate(flat(bank, 0.0), 3, bank, lcfg, rng) == 0


def test_evaluate_mean_at_075(bank, lcfg):
    p = flat(bank, 0.75)
    assert success_probabilities(p, bank, lcfg)[10] == pytest.approx(0.75)
    rng = np.random.default_rng(7)
    scores = [evaluate(p, 10, bank, lcfg, rng) for _ in range(10_000)]
    assert abs(np.mean(scores) - 75) <= 0.5


def test_evaluate_all(bank, lcfg):
    p = flat(bank, 0.5)
    rep = evaluate_all(p, [5, 2, 9], bank, lcfg, np.random.default_rng(3))
    assert list(rep) == [2, 5, 9]
    assert all(0 <= s <= 100 for s in rep.values())
    assert rep == evaluate_all(p, [9, 5, 2], bank, lcfg, np.random.default_rng(3))
    single = evaluate_all(p, [4], bank, lcfg, np.random.default_rng(3))
    assert len(single) == 1
    with pytest.raises(ValueError):
        evaluate_all(p, [], bank, lcfg, np.random.default_rng(3))


def test_evaluate_all_matches_repeated_evaluate(bank, lcfg):
    p = init_prior(bank, 0, lcfg, np.random.default_rng(0))
    r1, r2 = np.random.default_rng(11), np.random.default_rng(11)
    rep = evaluate_all(p, [0, 1, 7], bank, lcfg, r1)
    assert rep == {t: evaluate(p, t, bank, lcfg, r2) for t in (0, 1, 7)}


def test_deterministic_eval(bank):
    cfg = LearnerConfig(deterministic_eval=True, eval_mode="competence")
    p = flat(bank, 0.734)
    assert evaluate(p, 0, bank, cfg, np.random.default_rng(0)) == 73


def test_eval_modes(bank):
    c = np.zeros(bank.N)
    c[0] = 0.9
    p = PolicyState(c)
    a1 = bank.by_label("A1")
    comp = success_probabilities(p, bank, LearnerConfig(eval_mode="competence"))
    trans = success_probabilities(p, bank, LearnerConfig(eval_mode="transfer"))
    gated = success_probabilities(p, bank, LearnerConfig(eval_mode="gated"))
    assert comp[a1] == 0.0
    assert trans[a1] == pytest.approx(0.9 * math.exp(-1 / bank.tau))
    assert 0.0 < gated[a1] <= trans[a1]
    assert np.all(gated >= comp)


def test_config_validation():
    for bad in ({"eta": 0}, {"kappa": -1}, {"delta": -0.1}, {"lam": 1.0}, {"s_bar": 0},
                {"eval_mode": "nope"}, {"baseline": 2.0}):
        with pytest.raises(ValueError):
            LearnerConfig(**bad)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=49, max_size=49), st.integers(0, 48),
       st.integers(0, 50_000), st.floats(0.01, 1.0))
def test_train_never_decreases_competence(comp, task, steps, adapt):
    from glocal.tasks import build_default_bank
    bank = build_default_bank()
    cfg = LearnerConfig()
    p = PolicyState(np.array(comp), adaptability=adapt)
    out = train(p, task, steps, bank, cfg)
    assert np.all(out.competence >= p.competence)
    assert np.all((out.competence >= 0) & (out.competence <= 1))


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 0.9), st.floats(0, 0.1), st.integers(0, 48), st.integers(1, 50_000))
def test_higher_prior_never_hurts(base, bump, task, steps):
    from glocal.tasks import build_default_bank
    bank = build_default_bank()
    cfg = LearnerConfig()
    src = (task + 1) % bank.N
    lo = np.full(bank.N, 0.01)
    lo[src] = base
    hi = lo.copy()
    hi[src] = base + bump
    out_lo = train(PolicyState(lo), task, steps, bank, cfg).competence[task]
    out_hi = train(PolicyState(hi), task, steps, bank, cfg).competence[task]
    assert out_hi >= out_lo


def test_lineage_terminates(bank):
    p = flat(bank, 0.1, policy_id="init")
    seen = {p.policy_id: p.parent_id}
    for _ in range(20):
        p = clone_policy(p)
        seen[p.policy_id] = p.parent_id
    node, hops = p.policy_id, 0
    while node is not None:
        node = seen.get(node)
        hops += 1
        assert hops < 100
