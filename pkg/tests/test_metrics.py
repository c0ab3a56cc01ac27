"""Metric formulas, property checks, and the chi-squared oracle comparison."""

import math

import numpy as np
import pytest

from liarsim.dist import COUNTS, PROBABILITY, Distribution, load_reference_table
from liarsim.metrics import (DEFAULT_CONSISTENT, MetricsConfig,
                             chi_squared_gof, consistency_fidelity,
                             full_report, interference_suppression,
                             tv_distance, z_flag)


def prob_dist(width, entries):
    return Distribution(width, entries, PROBABILITY)


def counts_dist(width, entries):
    return Distribution(width, entries, COUNTS)


def random_prob(rng, width=3):
    dim = 1 << width
    support = rng.choice(dim, size=int(rng.integers(2, dim + 1)), replace=False)
    masses = rng.random(len(support)) + 1e-3
    masses /= masses.sum()
    return prob_dist(width, {format(int(s), f"0{width}b"): float(m)
                             for s, m in zip(support, masses)})


# ---------------------------------------------------------------------------
# mass metrics

def test_consistency_fidelity_basic():
    dist = prob_dist(2, {"00": 0.25, "01": 0.5, "11": 0.25})
    assert consistency_fidelity(dist, ("01",)) == 0.5
    assert consistency_fidelity(dist, ("01", "11")) == 0.75
    assert consistency_fidelity(dist, ("10",)) == 0.0


def test_consistency_fidelity_uses_raw_probability_entries():
    # off-sum probability data is taken literally, not renormalized
    dist = prob_dist(1, {"0": 0.4, "1": 0.4})
    assert consistency_fidelity(dist, ("0",)) == 0.4


def test_consistency_fidelity_normalizes_counts():
    dist = counts_dist(1, {"0": 30.0, "1": 10.0})
    assert consistency_fidelity(dist, ("0",)) == 0.75


def test_consistency_fidelity_validates_states():
    dist = prob_dist(2, {"00": 1.0})
    with pytest.raises(ValueError):
        consistency_fidelity(dist, ("000",))
    with pytest.raises(ValueError):
        consistency_fidelity(dist, ())
    with pytest.raises(ValueError):
        consistency_fidelity(dist, ("00", "00"))


def test_tv_distance_cases():
    p = prob_dist(1, {"0": 1.0})
    q = prob_dist(1, {"1": 1.0})
    assert tv_distance(p, q) == 1.0
    assert tv_distance(p, p) == 0.0
    r = prob_dist(1, {"0": 0.5, "1": 0.5})
    assert tv_distance(p, r) == 0.5
    with pytest.raises(ValueError, match="width"):
        tv_distance(p, prob_dist(2, {"00": 1.0}))


def test_tv_distance_mixes_counts_and_probabilities():
    counts = counts_dist(1, {"0": 75.0, "1": 25.0})
    probs = prob_dist(1, {"0": 0.75, "1": 0.25})
    assert tv_distance(counts, probs) == pytest.approx(0.0, abs=1e-15)


def test_mass_metric_properties():
    rng = np.random.default_rng(314)
    for _ in range(1000):
        p = random_prob(rng)
        q = random_prob(rng)
        r = random_prob(rng)
        d_pq = tv_distance(p, q)
        assert 0.0 <= d_pq <= 1.0 + 1e-12
        assert d_pq == pytest.approx(tv_distance(q, p), abs=1e-15)
        assert d_pq <= tv_distance(p, r) + tv_distance(r, q) + 1e-12
        # complement identity: masses on S and its complement sum to the total
        states = list(p.entries)
        cut = max(1, len(states) // 2)
        inside = tuple(states[:cut])
        outside = tuple(s for s in
                        (format(i, "03b") for i in range(8)) if s not in inside)
        total = consistency_fidelity(p, inside) + consistency_fidelity(p, outside)
        assert total == pytest.approx(p.total(), abs=1e-12)


def test_interference_suppression():
    ideal = prob_dist(1, {"0": 0.5, "1": 0.5})
    experimental = prob_dist(1, {"0": 0.9, "1": 0.1})
    assert interference_suppression(experimental, ideal, ("1",)) == pytest.approx(0.8)
    # more experimental mass than ideal gives a negative ratio
    worse = prob_dist(1, {"0": 0.2, "1": 0.8})
    assert interference_suppression(worse, ideal, ("1",)) == pytest.approx(-0.6)


def test_interference_suppression_guards_zero_ideal_mass():
    ideal = prob_dist(1, {"0": 1.0})
    experimental = prob_dist(1, {"0": 0.9, "1": 0.1})
    with pytest.raises(ValueError, match="undefined"):
        interference_suppression(experimental, ideal, ("1",))


def test_z_flag():
    dist = prob_dist(2, {"00": 0.25, "10": 0.75})  # flag = qubit 1
    assert z_flag(dist, 1) == pytest.approx(0.25 - 0.75)
    assert z_flag(dist, 0) == 1.0
    # off-sum data is normalized so z stays in [-1, 1]
    off = prob_dist(1, {"0": 0.2, "1": 0.6})
    assert z_flag(off, 0) == pytest.approx((0.8 - 2 * 0.6) / 0.8)
    with pytest.raises(ValueError):
        z_flag(dist, 2)


def test_z_flag_pinned_reference_values():
    hw = load_reference_table("hardware")
    assert z_flag(hw, 3) == pytest.approx(-0.980519, abs=1e-6)
    sim_counts = load_reference_table("simulation", column=COUNTS)
    assert z_flag(sim_counts, 3) == pytest.approx(1.0 - 2.0 * 8126 / 8192, abs=1e-12)


# ---------------------------------------------------------------------------
# chi-squared

def chi2_tail_oracle(dof: int, stat: float) -> float:
    """Upper-tail probability by direct trapezoid integration of the density."""
    if stat <= 0.0:
        return 1.0
    upper = stat + 40.0 * max(1.0, math.sqrt(2.0 * dof))
    xs = np.linspace(stat, upper, 400_001)
    log_pdf = ((dof / 2.0 - 1.0) * np.log(xs) - xs / 2.0
               - (dof / 2.0) * math.log(2.0) - math.lgamma(dof / 2.0))
    ys = np.exp(log_pdf)
    return float(np.sum((ys[1:] + ys[:-1]) * np.diff(xs)) / 2.0)


def test_chi2_p_values_match_integration_oracle():
    grid = [(dof, stat) for dof in (1, 2, 3, 5, 10)
            for stat in (0.5, 1.0, 3.841, 7.0)]
    assert len(grid) == 20
    for dof, stat in grid:
        # synthesize a (dof+1)-bin comparison with the target statistic:
        # uniform expected, all discrepancy in the first two bins
        bins = dof + 1
        shots = 10000
        expected = prob_dist(4, {format(i, "04b"): 1.0 / bins for i in range(bins)})
        delta = math.sqrt(stat * (shots / bins) / 2.0)
        obs = {format(i, "04b"): float(shots // bins) for i in range(bins)}
        obs[format(0, "04b")] += delta
        obs[format(1, "04b")] -= delta
        # counts must stay integral; adjust the statistic accordingly
        obs = {k: float(round(v)) for k, v in obs.items()}
        observed = counts_dist(4, obs)
        result = chi_squared_gof(observed, expected)
        assert result.dof == dof
        oracle_p = chi2_tail_oracle(dof, result.statistic)
        assert result.p_value == pytest.approx(oracle_p, abs=1e-3), (dof, stat)


def test_chi2_reference_point():
    # dof 1, statistic 3.841 sits at the conventional 5% boundary
    assert chi2_tail_oracle(1, 3.841) == pytest.approx(0.05, abs=1e-3)


def test_chi2_identical_counts_give_p_one():
    observed = counts_dist(2, {"00": 50.0, "01": 30.0, "10": 20.0})
    result = chi_squared_gof(observed, observed)
    assert result.statistic == 0.0
    assert result.p_value == 1.0


def test_chi2_pools_small_expected_bins():
    expected = prob_dist(2, {"00": 0.98, "01": 0.01, "10": 0.01})
    observed = counts_dist(2, {"00": 97.0, "01": 2.0, "10": 1.0})
    result = chi_squared_gof(observed, expected)
    # the two 1-count bins merge into one residual bin
    assert result.bins == 2
    assert result.pooled_bins == 2
    assert result.dof == 1


def test_chi2_impossible_outcome_gives_zero_p():
    expected = prob_dist(1, {"0": 1.0})
    observed = counts_dist(1, {"0": 5.0, "1": 3.0})
    result = chi_squared_gof(observed, expected)
    assert math.isinf(result.statistic)
    assert result.p_value == 0.0


def test_chi2_degenerate_single_bin():
    expected = prob_dist(1, {"0": 1.0})
    observed = counts_dist(1, {"0": 10.0})
    result = chi_squared_gof(observed, expected)
    assert result.dof == 0
    assert result.p_value == 1.0


def test_chi2_requires_observed_counts():
    with pytest.raises(ValueError, match="counts"):
        chi_squared_gof(prob_dist(1, {"0": 1.0}), prob_dist(1, {"0": 1.0}))


# ---------------------------------------------------------------------------
# config and report

def test_config_defaults_for_width_4():
    consistent, paradox, flag = MetricsConfig().resolve(4)
    assert consistent == DEFAULT_CONSISTENT
    assert len(paradox) == 14
    assert "1001" not in paradox and "1010" not in paradox
    assert flag == 3


def test_config_requires_explicit_set_off_width_4():
    with pytest.raises(ValueError, match="consistent"):
        MetricsConfig().resolve(3)
    consistent, paradox, flag = MetricsConfig(consistent_set=("000",)).resolve(3)
    assert len(paradox) == 7
    assert flag == 2


def test_full_report_bundled_pinned_values():
    hw = load_reference_table("hardware")
    sim = load_reference_table("simulation")
    report = full_report(hw, sim)
    assert report.f_c_experimental == pytest.approx(0.8614, abs=1e-9)
    assert report.f_c_ideal == pytest.approx(0.8713, abs=1e-9)
    assert report.d_tv == pytest.approx(0.03385, abs=1e-9)
    assert report.r_i == pytest.approx(0.087816, abs=1e-4)
    assert report.chi2_statistic is None
    assert "counts" in report.chi2_note


def test_full_report_counts_enable_chi2():
    hw = load_reference_table("hardware", column=COUNTS)
    sim = load_reference_table("simulation", column=COUNTS)
    report = full_report(hw, sim)
    assert report.chi2_statistic is not None
    assert report.chi2_note is None
    assert 0.0 <= report.chi2_p_value <= 1.0


def test_full_report_notes_zero_ideal_paradox_mass():
    ideal = prob_dist(4, {"1001": 0.5, "1010": 0.5})
    experimental = prob_dist(4, {"1001": 0.4, "1010": 0.4, "0000": 0.2})
    report = full_report(experimental, ideal)
    assert report.r_i is None
    assert "undefined" in report.r_i_note
    assert report.f_c_experimental == pytest.approx(0.8)


def test_full_report_width_mismatch():
    with pytest.raises(ValueError, match="width"):
        full_report(prob_dist(1, {"0": 1.0}), prob_dist(2, {"00": 1.0}))
