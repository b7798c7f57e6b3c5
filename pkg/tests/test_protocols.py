import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import h2
from seccompute.dist import FunctionSpec, JointDistribution
from seccompute.errors import DecoderSpaceTooLargeError, InvalidArgumentError
from seccompute.problem import bundled_fixture, parse_problem
from seccompute.protocols import (
    BinningScheme,
    balance_statistic,
    exact_binning_leakage,
    exact_secrecy,
    hamming_code,
    run_balance_check,
    run_binning,
    run_example1,
    sample_block,
)
from seccompute.protocols.balance import hypothesis_mass
from seccompute.protocols.binning import bin_count
from seccompute.protocols.estimators import exact_mi, plug_in_bias, plug_in_mi
from seccompute.protocols.linear_code import LinearCodeScheme, _codeword_from_info, _protocol, two_or_more_errors

H = h2(0.1)
seeds = st.integers(0, 2**32 - 1)


@pytest.fixture(scope="module")
def dsbs():
    pf = parse_problem(bundled_fixture("dsbs_delta01.json"))
    return pf.dist, pf.function()


def three_sigma(p, n):
    return 3 * math.sqrt(max(p * (1 - p), 1e-12) / n)


# -- sampling --------------------------------------------------------------

def test_point_mass_gives_constant_block():
    pmf = np.zeros((2, 3))
    pmf[1, 2] = 1.0
    d = JointDistribution((("a", "b"), ("x", "y", "z")), pmf)
    blk = sample_block(d, None, 50, seed=4)
    assert np.all(blk.sequences[0] == 1) and np.all(blk.sequences[1] == 2)
    assert blk.symbols(d, 2) == ["z"] * 50


def test_cell_frequencies_within_three_sigma(dsbs):
    d, g = dsbs
    n = 100_000
    blk = sample_block(d, g, n, seed=11)
    cells = np.ravel_multi_index(blk.sequences, d.shape)
    freq = np.bincount(cells, minlength=d.pmf.size) / n
    for p, f in zip(d.pmf.ravel(), freq):
        assert abs(f - p) <= three_sigma(p, n)
    assert np.array_equal(blk.g_sequence, blk.sequences[0] ^ blk.sequences[1])


def test_same_seed_same_block(dsbs):
    d, g = dsbs
    a, b = sample_block(d, g, 30, seed=7), sample_block(d, g, 30, seed=7)
    assert np.array_equal(a.sequences, b.sequences)
    assert not np.array_equal(a.sequences, sample_block(d, g, 30, seed=8).sequences)


# -- estimators ------------------------------------------------------------

def test_plug_in_on_perfect_dependence_and_independence():
    x = np.repeat([0, 1, 2, 3], 250)
    assert plug_in_mi(x, x) == pytest.approx(2.0)
    assert plug_in_mi(x, np.tile([0, 1], 500)) == pytest.approx(0.0, abs=1e-12)


def test_miller_madow_bias_form():
    x = [0, 0, 1, 1, 2]
    y = [0, 1, 0, 1, 0]
    # 5 joint cells observed, 3 and 2 marginal values
    assert plug_in_bias(x, y) == pytest.approx((5 - 3 - 2 + 1) / (2 * 5 * math.log(2)))


def test_exact_mi_matches_direct_formula():
    p = np.array([[0.3, 0.1], [0.2, 0.4]])
    xs, ys = np.indices(p.shape)
    direct = sum(p[i, j] * math.log2(p[i, j] / (p[i].sum() * p[:, j].sum())) for i in range(2) for j in range(2))
    assert exact_mi(xs.ravel(), ys.ravel(), p.ravel()) == pytest.approx(direct, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(1, 200))
def test_plug_in_nonnegative_and_relabeling_invariant(seed, n):
    rng = np.random.default_rng(seed)
    x = rng.integers(0, 5, n)
    y = (x + rng.integers(0, 2, n)) % 4
    mi = plug_in_mi(x, y)
    assert mi >= 0
    perm = rng.permutation(5) * 7 + 100
    assert plug_in_mi(perm[x], y) == pytest.approx(mi, abs=1e-12)
    assert plug_in_bias(perm[x], y) == pytest.approx(plug_in_bias(x, y), abs=1e-15)


# -- binning ---------------------------------------------------------------

def test_bin_counts():
    assert bin_count(0.0, 8) == 1
    assert bin_count(0.5, 8) == 16
    assert bin_count(H + 0.15, 8) == math.ceil(2 ** (8 * (H + 0.15)))
    scheme = BinningScheme.random((2, 2), [0.5, 1.0], 6, np.random.default_rng(0))
    assert scheme.bin_counts == (8, 64)
    assert len(scheme.maps[0]) == 64 and scheme.maps[0].max() < 8
    assert len(set(scheme.maps[1].tolist())) == 64


def test_full_revelation_has_no_error_and_large_leakage(dsbs):
    d, g = dsbs
    rep = run_binning(d, g, [1, 2], [1.0, 1.0], 4, 300, seed=2, exact_realizations=1)
    assert rep.omniscience_error == 0.0
    assert all(v == 0.0 for v in rep.terminal_errors.values())
    assert rep.leakage_plugin > 1.0
    assert rep.leakage_exact == pytest.approx(4 * H, abs=1e-9)


def test_zero_rates_fail_more_often_than_not(dsbs):
    d, g = dsbs
    n, trials = 8, 2000
    rep = run_binning(d, g, [1, 2], [0.0, 0.0], n, trials, seed=5)
    want = 1 - 0.9**n   # best guess of the other block is one's own
    for err in rep.terminal_errors.values():
        assert abs(err - want) <= three_sigma(want, trials)
    assert rep.omniscience_error > 0.5


def test_reproducible_reports(dsbs):
    d, g = dsbs
    a = run_binning(d, g, [1, 2], [H + 0.2, H + 0.2], 5, 200, seed=9).to_dict()
    b = run_binning(d, g, [1, 2], [H + 0.2, H + 0.2], 5, 200, seed=9).to_dict()
    assert a == b
    c = run_binning(d, g, [1, 2], [H + 0.2, H + 0.2], 5, 200, seed=10).to_dict()
    assert a != c


def test_regression_margin_on_first_terminal(dsbs):
    # seed-0 values at n = 8 with the first rate 0.15 above its optimal point
    d, g = dsbs
    rep = run_binning(d, g, [1, 2], [H + 0.15, H], 8, 2000, seed=0)
    assert rep.omniscience_error == pytest.approx(0.3105, abs=1e-12)
    assert rep.terminal_errors == pytest.approx({1: 0.2515, 2: 0.161}, abs=1e-12)
    assert rep.leakage_plugin == pytest.approx(2.023511576159681, abs=1e-9)
    assert rep.communication_rate == pytest.approx((math.log2(31) + math.log2(14)) / 8)


def test_error_decreases_with_blocklength_inside_region(dsbs):
    d, g = dsbs
    trials = 2000
    rates = [H + 0.45, H + 0.45]
    e4 = run_binning(d, g, [1, 2], rates, 4, trials, seed=0).omniscience_error
    e10 = run_binning(d, g, [1, 2], rates, 10, trials, seed=0).omniscience_error
    sigma = math.sqrt(e4 * (1 - e4) / trials + e10 * (1 - e10) / trials)
    assert e10 < e4 - 3 * sigma


def test_error_non_increasing_in_rate(dsbs):
    d, g = dsbs
    trials = 1500
    errs = [run_binning(d, g, [1, 2], [H + extra, H + 0.3], 6, trials, seed=1).terminal_errors[2]
            for extra in (0.0, 0.25, 0.5)]
    for lo, hi in zip(errs, errs[1:]):
        assert hi <= lo + 3 * math.sqrt((lo * (1 - lo) + hi * (1 - hi)) / trials)
    assert errs[-1] < errs[0]


def test_frozen_bins_and_exact_leakage(dsbs):
    d, g = dsbs
    rep = run_binning(d, g, [1, 2], [H + 0.2, H + 0.2], 4, 100, seed=3, freeze_bins=True, exact_realizations=1)
    assert rep.notes["fresh_bins"] is False
    assert rep.notes["exact_realizations"] == 1
    assert 0.0 <= rep.leakage_exact <= 4 * H + 1e-9


def test_exact_leakage_of_single_bin_is_zero(dsbs):
    d, g = dsbs
    scheme = BinningScheme.random(d.shape, [0.0, 0.0], 3, np.random.default_rng(0))
    assert exact_binning_leakage(d, g, scheme) == pytest.approx(0.0, abs=1e-12)


def test_decoder_caps(dsbs):
    d, g = dsbs
    with pytest.raises(DecoderSpaceTooLargeError):
        run_binning(d, g, [1, 2], [1.0, 1.0], 25, 1)
    with pytest.raises(DecoderSpaceTooLargeError):
        run_binning(d, g, [1, 2], [0.5, 0.5], 12, 1)   # 4^12 support blocks
    with pytest.raises(InvalidArgumentError):
        run_binning(d, g, [1, 2], [0.5], 4, 1)


def test_report_invariants(dsbs):
    d, g = dsbs
    rep = run_binning(d, g, [1], [H, 0.3], 4, 100, seed=0)
    assert 0 <= rep.omniscience_error <= 1
    assert set(rep.computation_errors) == {1}
    assert rep.leakage_plugin >= 0


# -- syndrome coset scheme -------------------------------------------------

def test_hamming_structure():
    code = hamming_code()
    assert (code.n, code.k) == (7, 4)
    # every nonzero syndrome has a weight-one leader
    assert sorted(code.leaders.sum(axis=1).tolist()) == [0] + [1] * 7


def test_dependent_rows_rejected():
    with pytest.raises(InvalidArgumentError):
        LinearCodeScheme.from_parity_check([[1, 1, 0], [1, 1, 0]])


def test_exact_secrecy_and_bijectivity():
    code = hamming_code()
    for delta in (0.02, 0.1, 0.3):
        ex = exact_secrecy(code, delta)
        assert abs(ex["I_K_F1"]) <= 1e-12
        assert abs(ex["I_G_F1"]) <= 1e-12
        assert ex["bijective"]
        assert ex["error_probability"] == pytest.approx(two_or_more_errors(delta, 7), abs=1e-12)


def test_syndrome_and_key_rebuild_each_block():
    code = hamming_code()
    rng = np.random.default_rng(0)
    x1 = rng.integers(0, 2, size=(500, 7), dtype=np.uint8)
    x2 = x1 ^ (rng.random((500, 7)) < 0.1).astype(np.uint8)
    out = _protocol(code, x1, x2)
    rebuilt = code.leaders[out["s1"]] ^ _codeword_from_info(code, out["key"])
    assert np.array_equal(rebuilt, x1)


def test_noiseless_channel():
    rep = run_example1(0.0, hamming_code(), 500, seed=1)
    assert rep.omniscience_error == 0.0
    assert rep.leakage_plugin == 0.0
    assert rep.leakage_exact == 0.0


def test_error_frequency_matches_two_flip_probability():
    trials = 10_000
    rep = run_example1(0.02, hamming_code(), trials, seed=0)
    want = 1 - 0.98**7 - 7 * 0.02 * 0.98**6
    assert want == pytest.approx(0.0078565, abs=1e-7)
    for err in rep.terminal_errors.values():
        assert abs(err - want) <= three_sigma(want, trials)


def test_framing_is_reported():
    rep = run_example1(0.1, hamming_code(), 100)
    assert rep.notes["encrypted_bits"] == 3 and rep.notes["index_bits"] == 3
    assert rep.leakage_exact == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(InvalidArgumentError):
        run_example1(0.1, hamming_code(), 10, n=15)


# -- balance statistic -----------------------------------------------------

def test_single_color_is_perfectly_balanced():
    joint = np.random.default_rng(0).random((30, 2))
    joint /= joint.sum()
    rep = run_balance_check(joint, np.zeros(30, int), 1, 10.0, 0.04, 20)
    assert rep.statistic_max == 0.0


def test_uniform_space_never_fails():
    joint = np.full((4096, 1), 1 / 4096)
    rep = run_balance_check(joint, np.zeros(4096, int), 4, 4096.0, 0.04, 200, seed=0)
    assert rep.failure_frequency == 0.0
    assert rep.statistic_max < rep.threshold
    assert rep.hypothesis_holds


def test_injective_coloring_equals_distance_from_uniform():
    rng = np.random.default_rng(1)
    U, V = 12, 3
    joint = rng.random((U, V))
    joint /= joint.sum()
    h = rng.integers(0, 2, U)
    phi = rng.permutation(U)
    direct = 0.0
    for j in range(2):
        for v in range(V):
            pjv = joint[h == j, v].sum()
            if pjv == 0:
                continue
            for i in range(U):
                mass = joint[(h == j) & (phi == i), v].sum() / pjv
                direct += pjv * abs(mass - 1 / U)
    assert balance_statistic(joint, h, phi, U) == pytest.approx(direct, abs=1e-12)


def test_hypothesis_mass():
    joint = np.array([[0.5, 0.0], [0.25, 0.25]])
    # P(U | V): column 0 is (2/3, 1/3), column 1 is (0, 1)
    assert hypothesis_mass(joint, 2.0) == pytest.approx(0.75)
    assert hypothesis_mass(joint, 1.0) == 0.0


def test_balance_argument_checks():
    joint = np.full((4, 1), 0.25)
    with pytest.raises(InvalidArgumentError):
        run_balance_check(joint, np.zeros(4, int), 2, 4.0, 0.05, 5)
    with pytest.raises(InvalidArgumentError):
        run_balance_check(joint, np.zeros(3, int), 2, 4.0, 0.04, 5)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_balance_reproducible_and_nonnegative(seed):
    rng = np.random.default_rng(seed)
    joint = rng.random((20, 2))
    joint /= joint.sum()
    h = rng.integers(0, 2, 20)
    a = run_balance_check(joint, h, 3, 5.0, 0.04, 10, seed=seed)
    b = run_balance_check(joint, h, 3, 5.0, 0.04, 10, seed=seed)
    assert a == b
    assert a.statistic_mean >= 0


def test_leakage_floor_when_total_rate_exceeds_conditional_entropy(dsbs):
    # I(F ^ G^n) >= H(F) - H(X_M^n | G^n), and H(X_M | G) = 1 bit on the DSBS
    d, g = dsbs
    n = 6
    scheme = BinningScheme.random(d.shape, [H + 0.15, H + 0.15], n, np.random.default_rng(4))
    blocks = np.array(np.meshgrid(np.arange(2**n), np.arange(2**n), indexing="ij")).reshape(2, -1)
    flips = np.array([bin(a ^ b).count("1") for a, b in blocks.T])
    prob = 0.5**n * 0.1**flips * 0.9 ** (n - flips)
    f = scheme.maps[0][blocks[0]] * scheme.bin_counts[1] + scheme.maps[1][blocks[1]]
    pf = np.bincount(f, weights=prob)
    h_f = -np.sum(pf[pf > 0] * np.log2(pf[pf > 0]))
    leak = exact_binning_leakage(d, g, scheme)
    assert h_f - n > 0.5
    assert leak >= h_f - n - 1e-9
