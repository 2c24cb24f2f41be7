import numpy as np
import pytest

from majorana_worldlines.analysis import (anti_unruh_scan, backflow_region_scan, classify_slope,
                                          detect_backflow, detect_overtaking, sign_changes, slope_signs)
from majorana_worldlines.influence import InfluenceSeries


def _series(nodes, values):
    return InfluenceSeries("M", np.asarray(nodes, float), np.asarray(values, float),
                           np.zeros(len(values)))


def test_identical_series_do_not_cross():
    t = np.linspace(0, 1, 11)
    s = _series(t, -t)
    rep = detect_overtaking(s, s)
    assert rep.count == 0 and rep.reversal == 0.0


def test_single_crossing_located_by_interpolation():
    t = np.linspace(0, 2, 201)
    a = _series(t, -2 * t)
    b = _series(t, -1.5 * t ** 2)
    rep = detect_overtaking(a, b, labels=("A", "B"))
    assert rep.count == 1
    assert rep.crossings[0].tau == pytest.approx(4.0 / 3.0, abs=1e-3)
    assert rep.crossings[0].lower_before == "A"
    assert rep.crossings[0].lower_after == "B"
    assert rep.reversal > 0.1


def test_overtaking_is_antisymmetric():
    t = np.linspace(0, 2, 201)
    a, b = _series(t, -2 * t), _series(t, -1.5 * t ** 2)
    r1 = detect_overtaking(a, b, labels=("A", "B"))
    r2 = detect_overtaking(b, a, labels=("B", "A"))
    assert r1.times == r2.times
    assert r1.crossings[0].lower_before == r2.crossings[0].lower_before


def test_reversal_ignores_invisible_coherence():
    t = np.linspace(0, 4, 401)
    a = _series(t, -10 * t)
    b = _series(t, -10 * t + np.where(t < 3, 1e-6 * t, -5.0))
    assert detect_overtaking(a, b).reversal == 0.0
    assert detect_overtaking(a, b, visibility=0).reversal > 0


def test_mismatched_grids_rejected():
    with pytest.raises(ValueError):
        detect_overtaking(_series([0, 1], [0, -1]), _series([0, 2], [0, -1]))
    with pytest.raises(ValueError):
        detect_overtaking(_series([0, 1], [0, -1]), _series([0, 1, 2], [0, -1, -2]))


def test_monotone_series_has_no_backflow():
    t = np.linspace(0, 3, 301)
    assert not detect_backflow(_series(t, -t ** 2)).present


def test_backflow_interval_and_amplitude():
    t = np.linspace(0, 3, 301)
    v = -t + 0.2 * np.sin(3 * t) * t
    rep = detect_backflow(_series(t, v), threshold=1e-4)
    assert rep.present
    coh = np.exp(v)
    for lo, hi, rise in rep.intervals:
        assert 0 <= lo < hi <= 3
        assert rise >= 1e-4
    assert rep.max_rebound <= coh.max() - coh.min()


def test_backflow_below_threshold_ignored():
    t = np.linspace(0, 1, 101)
    v = -t + 1e-7 * np.sin(40 * t)
    assert not detect_backflow(_series(t, v), threshold=1e-4).present
    with pytest.raises(ValueError):
        detect_backflow(_series(t, v), threshold=0)


def test_single_cell_region_scan_matches_detector():
    t = np.linspace(0, 3, 301)
    s = _series(t, -t + 0.2 * np.sin(3 * t) * t)
    scan = backflow_region_scan([0.1], [1.0], lambda sig, a: s)
    assert scan.backflow.shape == (1, 1)
    assert scan.backflow[0, 0] == detect_backflow(s).present


def test_down_set_check():
    from majorana_worldlines.analysis import RegionScan
    ok = np.array([[1, 1, 0], [1, 0, 0], [0, 0, 0]], bool)
    bad = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 0]], bool)
    z = np.zeros(3)
    assert RegionScan(z, z, ok, ok * 1.0, 1e-4).is_down_set()
    assert not RegionScan(z, z, bad, bad * 1.0, 1e-4).is_down_set()


def test_slope_classes():
    assert classify_slope([5, 4, 3, 2]) == "anti-unruh"
    assert classify_slope([1, 2, 3]) == "unruh"
    assert classify_slope([3, 2, 2.5, 3]) == "crossover"
    assert classify_slope([1, 1, 1]) == "flat"
    assert sign_changes([3, 2, 2.5, 3]) == 1


def test_isolated_noise_is_filtered():
    # one spurious uptick in an otherwise decreasing sequence
    v = [10, 9, 8, 8.0001, 7, 6]
    assert slope_signs(v)[2] == -1
    assert classify_slope(v) == "anti-unruh"


def test_anti_unruh_scan_metadata():
    scan = anti_unruh_scan([1, 2, 3], lambda a: (1 / a, 2 / a))
    assert scan.class_full == scan.class_first == "anti-unruh"
    assert scan.strictly_decreasing_full and scan.strictly_decreasing_first
    assert scan.meta["slope_tolerance"] > 0 and scan.meta["filter_window"] == 3
