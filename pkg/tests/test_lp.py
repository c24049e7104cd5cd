import io

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from ldpcfloor.channel import llr_from_output, sample_awgn
from ldpcfloor.lp import (
    Classification,
    Status,
    build_lp,
    classify,
    erase,
    facet_status,
    lp_with_erasure,
    lp_with_pinned_bit,
    solve_lp,
    write_lp,
)
from ldpcfloor.lp import _structure
from ldpcfloor.toys import random_tree_code, single_check, single_cycle

from oracles import brute_ml, fundamental_polytope_lp, parse_lp_text


def frame(H, s2, seed):
    rng = np.random.default_rng(seed)
    return llr_from_output(sample_awgn(np.zeros(H.n_bits), s2, rng))


def test_tanner_problem_size(tanner):
    st_ = _structure(tanner)
    assert st_.n_vars == 155 + 93 * 16
    assert st_.A_eq.shape == (93 + 465, 1643)


@given(st.integers(0, 10**6))
def test_objective_matches_odd_set_polytope(hamming, seed):
    h = frame(hamming, 0.5, seed)
    sol = solve_lp(build_lp(hamming, h))
    ref, _ = fundamental_polytope_lp(hamming.dense(), h)
    assert sol.optimal
    assert sol.objective == pytest.approx(ref, abs=1e-8)


@pytest.mark.parametrize("seed", range(10))
def test_lp_is_ml_on_trees(seed):
    rng = np.random.default_rng(seed)
    H = random_tree_code(int(rng.integers(3, 12)), rng)
    h = rng.uniform(-2, 2, H.n_bits)
    sol = solve_lp(build_lp(H, h))
    assert sol.is_integral
    assert np.array_equal(np.round(sol.bit_values), brute_ml(H.dense().astype(np.int64), h))


def test_lp_is_ml_when_integral(hamming):
    for seed in range(60):
        h = frame(hamming, 1.0, seed)
        sol = solve_lp(build_lp(hamming, h))
        if sol.is_integral:
            ml = brute_ml(hamming.dense().astype(np.int64), h)
            assert np.array_equal(np.round(sol.bit_values), ml)


def test_zero_noise_decodes_to_zero(tanner):
    sol = solve_lp(build_lp(tanner, np.full(155, 1.0)))
    assert sol.classification is Classification.INTEGRAL_CODEWORD
    assert not sol.bit_values.any()


def test_check_beliefs_are_distributions(hamming):
    sol = solve_lp(build_lp(hamming, frame(hamming, 0.4, 7)))
    for cv in sol.check_values:
        assert cv.sum() == pytest.approx(1.0, abs=1e-9)
    assert sol.beliefs().compatibility_residual(hamming) < 1e-8


def test_fractional_vertex_on_cycle_gadget():
    # costs that reward bit 0 but penalise its cycle partner: a half-integral vertex
    H = single_cycle()
    h = np.array([-1.0, 0.6, 0.6, 0.6])
    sol = solve_lp(build_lp(H, h))
    ref, _ = fundamental_polytope_lp(H.dense(), h)
    assert sol.objective == pytest.approx(ref)


def test_pinning():
    H = single_check(3)
    h = np.array([1.0, 1.0, 1.0])
    sol = lp_with_pinned_bit(H, h, 0, 1)
    assert sol.optimal and sol.bit_values[0] == 1.0
    assert sol.objective == pytest.approx(2.0)
    prob = build_lp(single_check(2), np.zeros(2)).pin(0, 0).pin(1, 1)
    assert solve_lp(prob).status is Status.INFEASIBLE
    with pytest.raises(ValueError):
        build_lp(H, h).pin(0, 2)
    with pytest.raises(IndexError):
        build_lp(H, h).pin(3, 0)


def test_erasure_scales_costs(hamming):
    h = np.arange(1.0, 8.0)
    p = erase(build_lp(hamming, h), [1, 3], gamma=1.0)
    assert p.h[1] == p.h[3] == 0.0 and p.h[0] == 1.0
    assert erase(build_lp(hamming, h), [2], gamma=0.25).h[2] == pytest.approx(2.25)
    with pytest.raises(ValueError):
        erase(build_lp(hamming, h), [1], gamma=1.5)
    assert lp_with_erasure(hamming, h, [0]).optimal


def test_facet_status_ordering(hamming):
    h = frame(hamming, 0.3, 11)
    sol = solve_lp(build_lp(hamming, h))
    fs = facet_status(sol)
    bits = fs.bit_facets
    assert bits == fs.inactive[: len(bits)]
    assert [(f.bit, f.value) for f in bits] == sorted((f.bit, f.value) for f in bits)
    for f in bits:
        v = sol.bit_values[f.bit]
        assert (v > 1e-6) if f.value == 0.0 else (v < 1 - 1e-6)
    for i in fs.fractional_bits:
        assert sum(f.bit == i for f in bits) == 2
    assert all(f.kind == "check" for f in fs.inactive[len(bits):])


def test_classify_rejects_non_optimal():
    prob = build_lp(single_check(2), np.zeros(2)).pin(0, 0).pin(1, 1)
    sol = solve_lp(prob)
    with pytest.raises(ValueError):
        classify(sol)
    with pytest.raises(ValueError):
        facet_status(sol)


def test_build_lp_checks_length(hamming):
    with pytest.raises(ValueError):
        build_lp(hamming, np.zeros(3))


def test_lp_dump_re_solves_to_same_optimum(hamming):
    prob = build_lp(hamming, frame(hamming, 0.5, 3)).pin(2, 1)
    buf = io.StringIO()
    write_lp(prob, buf)
    text = buf.getvalue()
    assert text.splitlines()[1] == "Minimize" and text.rstrip().endswith("End")
    c, A, b, bounds = parse_lp_text(text)
    res = linprog(c, A_eq=A, b_eq=b, bounds=bounds, method="highs")
    assert res.fun == pytest.approx(solve_lp(prob).objective, abs=1e-9)


def test_perturbation_reports_true_objective(hamming):
    h = np.ones(7)
    sol = solve_lp(build_lp(hamming, h), perturb=True)
    assert sol.objective == 0.0
