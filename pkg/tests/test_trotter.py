import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import appendix_c_config
from lindri.bounds import fit_slope
from lindri.linalg import (commutator, dagger, expm, kron, pure_state, random_density,
                           random_hermitian, spectral_norm, trace_distance, trace_norm,
                           unitarity_error)
from lindri.lindblad import be_norm, propagate_taylor
from lindri.model import (LOWERING, I2, X, Z, InteractionSpec, OperatorSum, ThermalAncilla,
                          build_heisenberg, lowering_sum)
from lindri.rimap import RIConfig, ri_evolve, step_exponent
from lindri.trotter import (CommutatorProfile, TrotterPlan, commutator_profile, cost_2k, cost_first,
                            cost_first_max, formula_sequence, product_formula, ri_evolve_trotter,
                            sliced_formula, stage_count, step_summands, suzuki_weight,
                            trotter_channel)

RS = [4, 8, 16, 32, 64]


def printed_weight(order):
    # the misprinted recursion weight, kept only to show that it breaks the order
    return 1.0 / (4.0 - 4.0 ** ((order - 1) / 2))


def random_summands(rng, n=3, d=4):
    return [h / spectral_norm(h) for h in (random_hermitian(d, rng) for _ in range(n))]


def channel_errors(hs, rho, order, weight=suzuki_weight, tau=1.0):
    exact = expm(-1j * tau * sum(hs))
    want = exact @ rho @ dagger(exact)
    errs = []
    for r in RS:
        u = sliced_formula(hs, -1j * tau, TrotterPlan(order, r), weight)
        errs.append(trace_distance(u @ rho @ dagger(u), want))
    return errs


def test_plan_validation_and_counts():
    for bad in ({"order": 3}, {"order": 0}, {"r": 0}):
        with pytest.raises(ValueError):
            TrotterPlan(**bad)
    assert [stage_count(o) for o in (1, 2, 4, 6)] == [1, 2, 10, 50]
    plan = TrotterPlan(4, 7)
    assert plan.k == 2 and plan.stages == 10
    assert plan.gate_count(3) == 3 * 10 * 7
    assert isinstance(plan.gate_count(3), int)
    with pytest.raises(ValueError):
        stage_count(3)


def test_weights():
    assert suzuki_weight(4) == pytest.approx(1 / (4 - 4 ** (1 / 3)))
    assert printed_weight(4) == pytest.approx(-0.25)
    for order in (2, 4, 6):
        seq = formula_sequence(3, order)
        assert len(seq) == 3 * stage_count(order)
        for i in range(3):
            assert sum(f for j, f in seq if j == i) == pytest.approx(1.0, abs=1e-14)
    s = suzuki_weight(4)
    assert 4 * s + (1 - 4 * s) == pytest.approx(1)


@pytest.mark.parametrize("order", [1, 2, 4, 6])
def test_commuting_summands_exact(order, rng):
    u = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
    hs = [u @ np.diag(rng.normal(size=4)) @ dagger(u) for _ in range(3)]
    got = product_formula(hs, -0.7j, TrotterPlan(order))
    assert np.abs(got - expm(-0.7j * sum(hs))).max() <= 1e-12


def test_strang_hand_oracle():
    # exp(-i t P) = cos t I - i sin t P for a Pauli P
    def pexp(p, t):
        return np.cos(t) * I2 - 1j * np.sin(t) * p
    got = product_formula([X, Z], -0.1j, TrotterPlan(2))
    assert np.allclose(got, pexp(X, 0.05) @ pexp(Z, 0.1) @ pexp(X, 0.05), atol=1e-15)
    first = product_formula([X, Z], -0.1j, TrotterPlan(1))
    assert np.allclose(first, pexp(X, 0.1) @ pexp(Z, 0.1), atol=1e-15)


@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 2, 4]), st.floats(0.01, 3))
@settings(max_examples=20, deadline=None)
def test_formula_unitary(seed, order, tau):
    rng = np.random.default_rng(seed)
    u = product_formula(random_summands(rng), -1j * tau, TrotterPlan(order))
    assert unitarity_error(u) <= 1e-11


def test_term_order_permutes(rng):
    hs = random_summands(rng)
    a = product_formula(hs, -0.5j, TrotterPlan(1, term_order=(2, 0, 1)))
    b = product_formula([hs[2], hs[0], hs[1]], -0.5j, TrotterPlan(1))
    assert np.allclose(a, b)


def test_channel_zero_tau(rng):
    rho = random_density(4, rng)
    assert np.array_equal(trotter_channel(rho, random_summands(rng), 0.0, TrotterPlan(2, 4)), rho)


@pytest.mark.parametrize("order,slope,tol", [(1, 1.0, 0.1), (2, 2.0, 0.2), (4, 4.0, 0.4)])
def test_channel_order_slopes(order, slope, tol, rng):
    for _ in range(3):
        hs = random_summands(rng)
        rho = pure_state(rng.normal(size=4) + 1j * rng.normal(size=4))
        assert fit_slope(1 / np.array(RS), channel_errors(hs, rho, order)) == pytest.approx(slope, abs=tol)


def test_trotter_channel_matches_sliced(rng):
    hs = random_summands(rng)
    rho = random_density(4, rng)
    u = sliced_formula(hs, -0.3j, TrotterPlan(2, 5))
    assert np.allclose(trotter_channel(rho, hs, 0.3, TrotterPlan(2, 5)), u @ rho @ dagger(u))


def test_printed_weight_loses_fourth_order(rng):
    hs = random_summands(rng)
    rho = pure_state(rng.normal(size=4) + 1j * rng.normal(size=4))
    good = fit_slope(1 / np.array(RS), channel_errors(hs, rho, 4))
    bad = fit_slope(1 / np.array(RS), channel_errors(hs, rho, 4, printed_weight))
    assert good > 3.6 and bad < 2.5


def test_first_order_commutator_bound(rng):
    for _ in range(5):
        hs = random_summands(rng)
        tau = float(rng.uniform(0.1, 2))
        bound = sum(spectral_norm(commutator(hs[i], hs[j]))
                    for i in range(3) for j in range(i + 1, 3))
        exact = expm(-1j * tau * sum(hs))
        for r in RS:
            u = sliced_formula(hs, -1j * tau, TrotterPlan(1, r))
            rho = pure_state(rng.normal(size=4) + 1j * rng.normal(size=4))
            err = trace_norm(u @ rho @ dagger(u) - exact @ rho @ dagger(exact))
            assert err <= 2 * tau**2 / (2 * r) * bound


def test_step_summands(appc):
    anc, inter = appc.baths[0]
    parts = step_summands(appc, anc, inter)
    assert len(parts) == 3
    k = step_exponent(appc.h0_dense(), anc, inter, appc.tau, m=appc.m)
    assert np.allclose(sum(parts) * appc.tau, k)
    split = step_summands(appc, anc, inter, split_h0=True)
    assert len(split) == len(appc.h0.terms) + 2
    assert np.allclose(sum(split), sum(parts))
    fixed = appc.replace(coupling="fixed", lam=0.3)
    assert np.allclose(step_summands(fixed, anc, inter)[-1], 0.3 * inter.dense())


def test_commuting_toy_model_exact():
    h0 = OperatorSum.parse("0.4*ZI + 0.7*IZ + 0.2*ZZ")
    inter = InteractionSpec(OperatorSum.parse("0.5*ZZ"), Z / 2)
    conf = RIConfig(h0, [(ThermalAncilla(1.0, 0.3), inter)], t=0.4, nu=3)
    rho = pure_state(np.ones(4))
    a = ri_evolve(conf, rho)
    b = ri_evolve_trotter(conf, TrotterPlan(1, 1), rho)
    assert np.abs(a - b).max() <= 1e-13


@pytest.mark.parametrize("order,slope", [(1, 1.0), (2, 2.0)])
def test_ri_trotter_converges_to_ri(order, slope, rng):
    conf = appendix_c_config(t=0.05, nu=2)
    rho = pure_state(rng.normal(size=16) + 1j * rng.normal(size=16))
    ref = ri_evolve(conf, rho)
    errs = [trace_distance(ri_evolve_trotter(conf, TrotterPlan(order, r), rho), ref) for r in RS]
    assert fit_slope(1 / np.array(RS), errs) == pytest.approx(slope, rel=0.1)


def test_ri_trotter_reproduces_t_squared(rng):
    base = appendix_c_config()
    g = base.generator()
    be = be_norm(g)
    rho = np.eye(16) / 16
    ts = np.geomspace(0.05, 0.5, 6) / be
    errs = []
    for t in ts:
        out = ri_evolve_trotter(base.replace(t=float(t)), TrotterPlan(2, 64), rho)
        errs.append(trace_distance(out, propagate_taylor(g, rho, float(t))))
    assert fit_slope(ts, errs) == pytest.approx(2.0, abs=0.3)


def test_cost_2k_examples():
    args = dict(l=5, alpha0=3.0, alpha_int=[1.0, 2.0], omegas=[0.1, 0.2], m=2, t=1.5, nu=10, eps=1e-3)
    base = max((3.0 + 2 * w) * 1.5 + 2 * a * np.sqrt(15) for a, w in ((1.0, 0.1), (2.0, 0.2)))
    for k in (1, 2):
        oracle = 5 * stage_count(2 * k) * base ** (1 + 1 / (2 * k)) / (2 * 10 * 1e-3 ** (1 / (2 * k)))
        assert cost_2k(k=k, **args) == pytest.approx(oracle, rel=1e-12)
    c1 = cost_2k(k=1, **{**args, "alpha_int": 0.0})
    c2 = cost_2k(k=1, **{**args, "alpha_int": 0.0, "t": 3.0})
    assert c2 / c1 == pytest.approx(2 ** 1.5)
    for eps in (0.0, 1.0, -1e-3):
        with pytest.raises(ValueError):
            cost_2k(k=1, **{**args, "eps": eps})


@given(st.floats(1e-9, 0.5), st.floats(1e-9, 0.5), st.floats(0.1, 10), st.floats(0.1, 10),
       st.sampled_from([1, 2, 3]))
@settings(max_examples=50, deadline=None)
def test_cost_2k_monotone(e1, e2, t1, t2, k):
    kw = dict(l=4, k=k, alpha0=2.0, alpha_int=1.0, omegas=0.1, m=3, nu=7)
    (e_lo, e_hi), (t_lo, t_hi) = sorted((e1, e2)), sorted((t1, t2))
    assert cost_2k(t=1.0, eps=e_lo, **kw) >= cost_2k(t=1.0, eps=e_hi, **kw)
    assert cost_2k(t=t_lo, eps=1e-3, **kw) <= cost_2k(t=t_hi, eps=1e-3, **kw)


def test_cost_first_examples():
    assert cost_first(CommutatorProfile(0.0, 0.0, 0.0), 4, 2, 1.0, 10, 1e-2) == 0
    p = CommutatorProfile(1.5, 0.2, 3.0)
    oracle = 4 * (1.0 ** 1.5 / (2 * 1e-2 * np.sqrt(10)) * (1.5 + 2 * 0.2) + 1.0 / (2 * 1e-2 * 10) * 3.0 / 2)
    assert cost_first(p, 4, 2, 1.0, 10, 1e-2) == pytest.approx(oracle)
    only_first = CommutatorProfile(1.5, 0.2, 0.0)
    assert cost_first(only_first, 4, 2, 1.0, 40, 1e-2) == pytest.approx(cost_first(only_first, 4, 2, 1.0, 10, 1e-2) / 2)
    assert cost_first_max([p, only_first], 4, 2, 1.0, 10, 1e-2) == cost_first(p, 4, 2, 1.0, 10, 1e-2)
    with pytest.raises(ValueError):
        cost_first(p, 4, 2, 1.0, 10, 2.0)


def test_commutator_profile_examples():
    h0 = OperatorSum.parse("0.5*ZI + 0.3*IZ + ZZ")
    inter = InteractionSpec(OperatorSum.parse("ZI"), X / 2)
    p = commutator_profile(h0, ThermalAncilla(1.0, 0.0), inter)
    assert p.sum_h0_hi == 0 and p.sum_h0_h0 == 0 and p.he_hi == 0
    one = OperatorSum.parse("0.0*Z")
    p = commutator_profile(one, ThermalAncilla(1.0, 0.4), InteractionSpec(lowering_sum(1, 0)))
    h_i = kron(LOWERING, dagger(LOWERING)) + kron(dagger(LOWERING), LOWERING)
    assert p.he_hi == pytest.approx(spectral_norm(commutator(kron(I2, 0.4 * Z), h_i)))
    assert p.he_hi == pytest.approx(0.8)


def test_commutator_profile_heisenberg_oracle():
    h0 = build_heisenberg(4, 0.5)
    inter = InteractionSpec(lowering_sum(4, 1))
    p = commutator_profile(h0, ThermalAncilla(1.0, 0.1), inter)
    parts = [t.dense() for t in h0.terms]
    h_i = inter.dense()
    e = np.eye(2)
    oracle = sum(np.linalg.norm(kron(a, e) @ h_i - h_i @ kron(a, e), 2) for a in parts)
    assert p.sum_h0_hi == pytest.approx(oracle, rel=1e-12)
    oracle_hh = sum(np.linalg.norm(a @ b - b @ a, 2) for a in parts for b in parts)
    assert p.sum_h0_h0 == pytest.approx(oracle_hh, rel=1e-12)
