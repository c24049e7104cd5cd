import io
import json

import numpy as np
import pytest

from ldpcfloor.channel import ChannelOutput, llr_from_output, sample_awgn
from ldpcfloor.decoders import (
    DecoderConfig,
    PcsConfig,
    PseudoCodeword,
    bit_guessing_decode,
    bit_guessing_from_sweep,
    bit_pins,
    facet_guessing_decode,
    loop_guided_decode,
    lp_decode,
    lp_erasure_decode,
    merge_catalog,
    pcs_catalog,
    pcs_search,
    pin_sweep,
    read_catalog,
    successful_bits,
    write_catalog,
)
from ldpcfloor.lp import build_lp, facet_status, solve_lp
from ldpcfloor.outcome import Method

# distances found by 8 restarts from default_rng(0) on the Tanner code
FROZEN_D = [16.4037, 16.4113, 16.4409, 17.4248, 28.766, 29.9505, 30.235]


@pytest.fixture(scope="module")
def catalog(tanner):
    stats = {}
    cat = pcs_catalog(tanner, 8, np.random.default_rng(0), stats=stats)
    return cat, stats


@pytest.fixture(scope="module")
def lowest(catalog):
    return catalog[0][0]


@pytest.fixture(scope="module")
def sweep(tanner, lowest):
    return pin_sweep(tanner, lowest.llr())


def test_catalog_regression(catalog):
    cat, stats = catalog
    assert [round(p.effective_distance, 4) for p in cat] == FROZEN_D
    assert stats["unclosed"] == 0 and stats["distinct"] == len(cat)
    assert stats["restarts"] == 8


def test_catalog_entries_close(tanner, catalog):
    for pc in catalog[0]:
        sol = solve_lp(build_lp(tanner, pc.llr()))
        assert np.abs(sol.bit_values - pc.omega).max() < 1e-4
        assert not pc.is_integral and not sol.is_integral


def test_lowest_entry_has_unit_loop(lowest):
    L = lowest.critical_loop
    assert len(L.bits) == 4 and abs(L.weight) == pytest.approx(1.0, abs=1e-4)


def test_second_entry_has_weaker_loop(catalog):
    L = catalog[0][1].critical_loop
    assert 0.7 < abs(L.weight) < 0.95


def test_lp_decode_zero_noise(tanner):
    out = lp_decode(tanner, np.full(155, 1.0))
    assert out.is_zero and out.method is Method.LP and out.work["lp_solves"] == 1


def test_bare_lp_fails_on_instanton(tanner, lowest):
    out = lp_decode(tanner, lowest.llr())
    assert not out.is_integral and not out.is_codeword


def test_guessing_decoders_correct_lowest(tanner, lowest):
    h = lowest.llr()
    lgg = loop_guided_decode(tanner, h)
    assert lgg.is_zero and lgg.work["lp_solves"] <= 1 + 2 * len(lowest.critical_loop.bits)
    era = lp_erasure_decode(tanner, h)
    assert era.is_zero and era.work["lp_solves"] <= 1 + DecoderConfig().max_loops


def test_bit_guessing_from_sweep_matches_direct(tanner, lowest, sweep):
    direct = bit_guessing_decode(tanner, lowest.llr())
    cached = bit_guessing_from_sweep(tanner, lowest.llr(), sweep)
    assert direct.is_zero and cached.is_zero
    assert direct.work["lp_solves"] == cached.work["lp_solves"] == 1 + len(sweep.pins)


def test_bit_pin_contract(sweep):
    pins = bit_pins(sweep.bare)
    b = sweep.bare.bit_values
    frac = set(facet_status(sweep.bare).fractional_bits)
    assert frac
    for i in range(len(b)):
        got = sorted(v for bit, v in pins if bit == i)
        if i in frac:
            assert got == [0, 1]
        else:
            assert got == [1 - int(round(b[i]))]


def test_successful_bits_hold_the_loop(tanner, lowest, sweep):
    sb = successful_bits(tanner, lowest, sweep=sweep)
    assert not sb.vacuous
    assert set(lowest.critical_loop.bits) <= sb.bits


def test_facet_guessing_variants(tanner, lowest):
    h = lowest.llr()
    bits_only = facet_guessing_decode(tanner, h, DecoderConfig(facets="bits"))
    assert bits_only.is_zero and bits_only.method is Method.FACET_GUESSING
    few = facet_guessing_decode(tanner, h, DecoderConfig(fraction=0.02, seed=1))
    assert few.work["facets"] == int(np.ceil(0.02 * len(facet_status(solve_lp(build_lp(tanner, h))).inactive)))
    assert few.work["lp_solves"] == 1 + few.work["facets"]


def test_lgg_never_worse_than_lp(tanner):
    for k in range(12):
        rng = np.random.default_rng([5, k])
        h = llr_from_output(sample_awgn(np.zeros(155), 1.0, rng))
        lp = lp_decode(tanner, h)
        lgg = loop_guided_decode(tanner, h, DecoderConfig(seed=k))
        assert lgg.is_zero or not lp.is_zero
        if lp.is_codeword:
            assert lgg.work["lp_solves"] == 1


def test_lgg_budget_is_respected(tanner, catalog):
    for pc in catalog[0][:3]:
        out = loop_guided_decode(tanner, pc.llr(), DecoderConfig(max_attempts=1))
        assert out.work["lp_solves"] <= 3


def test_pcs_search_from_clean_noise_hits_zero(tanner):
    res = pcs_search(tanner, 1.0, ChannelOutput(np.zeros(155), 1.0))
    assert res.converged_to_codeword and res.pseudo_codeword is None


def test_pcs_history_ends_at_entry_distance(tanner):
    rng = np.random.default_rng(0)
    x0 = sample_awgn(np.zeros(155), 0.6, rng)
    res = pcs_search(tanner, 0.6, x0, PcsConfig())
    if res.pseudo_codeword is not None:
        assert res.history[-1] == pytest.approx(res.pseudo_codeword.effective_distance)
        assert res.lp_solves == res.iterations + 1


def test_catalog_json_round_trip(catalog):
    buf = io.StringIO()
    write_catalog(catalog[0], buf, {"restarts": 8})
    lines = buf.getvalue().splitlines()
    first = json.loads(lines[1])
    assert set(first) == {"omega", "d_eff", "instanton", "critical_loop", "seed"}
    assert set(first["critical_loop"]) == {"bits", "checks", "r"}
    header, back = read_catalog(io.StringIO(buf.getvalue()))
    assert header == {"restarts": 8}
    for a, b in zip(catalog[0], back):
        assert np.array_equal(a.omega, b.omega)
        assert a.critical_loop.bits == b.critical_loop.bits
        assert a.seed == b.seed


@pytest.mark.parametrize("text", ["{not json}\n", '{"omega": [1.0]}\n'])
def test_malformed_catalog(text):
    with pytest.raises(ValueError, match="line 1"):
        read_catalog(io.StringIO(text))


def test_merge_catalog_drops_duplicates():
    a = PseudoCodeword.from_omega([1.0, 0.5, 0.5], seed=2)
    b = PseudoCodeword.from_omega([1.0, 0.5, 0.50001], seed=1)
    c = PseudoCodeword.from_omega([1.0, 1.0, 0.0], seed=3)
    merged = merge_catalog([c, a, b])
    assert len(merged) == 2
    assert merged[0].effective_distance <= merged[1].effective_distance


def test_successful_bits_vacuous_for_integral(hamming):
    pc = PseudoCodeword.from_omega([1, 1, 1, 0, 1, 0, 0])
    sb = successful_bits(hamming, pc, eps=-0.5)  # pulled back: LP returns zero
    assert sb.vacuous and not sb.bits


def test_hamming_campaign_is_mostly_integral(hamming):
    cat = pcs_catalog(hamming, 30, np.random.default_rng(1))
    integral = sum(pc.is_integral for pc in cat)
    assert cat and integral >= len(cat) - integral


def test_bit_guessing_solve_count(sweep):
    b = sweep.bare.bit_values
    k = int(((b > 1e-6) & (b < 1 - 1e-6)).sum())
    assert len(sweep.pins) == 2 * k + (len(b) - k)


def test_successful_set_size_regression(tanner, lowest, sweep):
    # lowest entry of this catalog (d_eff 16.4037): measured 53 successful bits
    assert len(successful_bits(tanner, lowest, sweep=sweep).bits) == 53


def test_random_facet_fraction_corrects_lowest(tanner, lowest):
    out = facet_guessing_decode(tanner, lowest.llr(), DecoderConfig(fraction=0.2, seed=3))
    assert out.is_zero


def test_pcs_distance_non_increasing(tanner):
    from ldpcfloor.decoders import _restart

    for seed in range(25):
        h = _restart(tanner, seed, PcsConfig(annotate_loops=False)).history
        assert all(b <= a + 1e-9 for a, b in zip(h, h[1:]))


def _hamming_failures(hamming, count=15):
    out, k = [], 0
    while len(out) < count:
        h = llr_from_output(sample_awgn(np.zeros(7), 0.4, np.random.default_rng([9, k])))
        k += 1
        if not lp_decode(hamming, h).is_codeword:
            out.append(h)
    return out


def test_guessing_contracts_on_small_code(hamming):
    for k, h in enumerate(_hamming_failures(hamming)):
        bg = bit_guessing_decode(hamming, h)
        fg_bits = facet_guessing_decode(hamming, h, DecoderConfig(facets="bits"))
        fg_full = facet_guessing_decode(hamming, h)
        fg_one = facet_guessing_decode(hamming, h, DecoderConfig(fraction=1.0))
        lgg = loop_guided_decode(hamming, h, DecoderConfig(seed=k))
        assert np.array_equal(bg.bit_values, fg_bits.bit_values)
        assert np.array_equal(fg_full.bit_values, fg_one.bit_values)
        assert bg.is_zero or not lgg.is_zero  # LGG uses a subset of BG's pins
        for out in (bg, fg_full, lgg):
            if out.is_codeword:
                others = [t[-1] for t in out.trace[1:] if len(t) == 5 and t[3] == "IntegralCodeword"]
                assert all(out.objective <= e + 1e-9 for e in others)
            if out.is_codeword:
                assert not out.converged or out.is_integral
