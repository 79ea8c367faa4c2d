import math

import numpy as np
import pytest

from keydyn import (
    BACKSPACE,
    FEATURE_NAMES,
    FeatureWindow,
    Keystroke,
    KeystrokeEvent,
    PairingError,
    extract_windows,
    features_to_matrix,
    generate_grid,
    instantiate_profiles,
    load_grid_features,
    pair_events,
    read_features,
    write_features,
)
from keydyn.features import FEATURE_HEADER, feature_filename


def ev(ts, key, action):
    return KeystrokeEvent(ts, key, action)


def ks(key, press, release, flight=None):
    return Keystroke(key, press, release, flight)


# --- pairing ------------------------------------------------------------


def test_pair_simple_sequence():
    events = [
        ev(0, "h", "press"), ev(100, "h", "release"),
        ev(200, "e", "press"), ev(260, "e", "release"),
    ]
    strokes = pair_events(events)
    assert [(s.key, s.press_ms, s.release_ms) for s in strokes] == [
        ("h", 0, 100), ("e", 200, 260)
    ]
    assert strokes[0].flight_ms is None
    assert strokes[0].dwell_ms == 100
    assert strokes[1].flight_ms == 100  # 200 - 100


def test_pair_handles_rollover():
    # Second key goes down before the first comes up.
    events = [
        ev(0, "a", "press"), ev(50, "b", "press"),
        ev(80, "a", "release"), ev(120, "b", "release"),
    ]
    strokes = pair_events(events)
    assert [s.key for s in strokes] == ["a", "b"]
    assert strokes[1].press_ms == 50
    # Flight can go negative under rollover: press before previous release.
    assert strokes[1].flight_ms == 50 - 80


def test_pair_rejects_double_press():
    events = [ev(0, "a", "press"), ev(10, "a", "press")]
    with pytest.raises(PairingError, match="pressed again"):
        pair_events(events)


def test_pair_rejects_orphan_release():
    with pytest.raises(PairingError, match="without a press"):
        pair_events([ev(0, "a", "release")])


def test_pair_rejects_unreleased_press():
    events = [ev(0, "a", "press"), ev(50, "a", "release"), ev(60, "b", "press")]
    with pytest.raises(PairingError, match="never released"):
        pair_events(events)


def test_pair_rejects_time_regression():
    events = [ev(100, "a", "press"), ev(50, "a", "release")]
    with pytest.raises(PairingError, match="out of order"):
        pair_events(events)


def test_pair_empty():
    assert pair_events([]) == []


# --- windowing ----------------------------------------------------------


def hand_fixture():
    """Five keystrokes, ten events, spanning two windows (one sparse)."""
    return [
        ev(0, "h", "press"), ev(100, "h", "release"),
        ev(200, "e", "press"), ev(260, "e", "release"),
        ev(400, BACKSPACE, "press"), ev(440, BACKSPACE, "release"),
        ev(500, "e", "press"), ev(590, "e", "release"),
        ev(5500, "t", "press"), ev(6050, "t", "release"),
    ]


def test_hand_fixture_window_values():
    windows = extract_windows(pair_events(hand_fixture()))
    assert len(windows) == 2

    w0 = windows[0]
    assert (w0.window_start_ms, w0.window_end_ms) == (0.0, 5000.0)
    assert not w0.sparse
    assert w0.n_keystrokes == 4
    # dwells 100, 60, 40, 90; flights 100, 140, 60 (first keystroke has none)
    assert w0.avg_dwell == pytest.approx(72.5, abs=1e-12)
    assert w0.std_dwell == pytest.approx(math.sqrt(568.75), abs=1e-12)
    assert w0.avg_flight == pytest.approx(100.0, abs=1e-12)
    assert w0.std_flight == pytest.approx(math.sqrt(3200.0 / 3.0), abs=1e-12)
    assert w0.error_rate_pct == pytest.approx(25.0, abs=1e-12)

    w1 = windows[1]
    assert (w1.window_start_ms, w1.window_end_ms) == (1000.0, 6000.0)
    assert w1.sparse
    assert w1.n_keystrokes == 1
    assert w1.avg_dwell == pytest.approx(550.0)
    assert w1.std_dwell == 0.0
    assert w1.avg_flight == pytest.approx(5500.0 - 590.0)
    assert w1.std_flight == 0.0
    assert w1.error_rate_pct == 0.0


def test_error_rate_three_of_eight():
    strokes = []
    prev_release = None
    for i, key in enumerate(["a", BACKSPACE, "b", BACKSPACE, "c", BACKSPACE, "d", "e"]):
        press = i * 600.0
        release = press + (900.0 if i == 7 else 50.0)
        strokes.append(ks(key, press, release,
                          None if prev_release is None else press - prev_release))
        prev_release = release
    # Last release lands at 5100, so exactly one full window exists.
    (window,) = extract_windows(strokes)
    assert window.n_keystrokes == 8
    assert window.error_rate_pct == pytest.approx(37.5, abs=1e-9)


def test_membership_is_press_in_half_open_window():
    strokes = [
        ks("a", 0.0, 10.0),
        ks("b", 99.9, 110.0, 89.9),
        ks("c", 100.0, 130.0, -10.0),
        ks("d", 150.0, 160.0, 20.0),
    ]
    windows = extract_windows(strokes, window_ms=100.0, step_ms=50.0)
    # Press at exactly 100 is outside [0, 100) but inside [50, 150).
    assert windows[0].n_keystrokes == 2
    assert windows[1].n_keystrokes == 2
    counts = {w.window_start_ms: w.n_keystrokes for w in windows}
    assert counts[0.0] == 2 and counts[50.0] == 2


def test_window_count_follows_last_event():
    strokes = [ks("a", 0.0, 10.0), ks("b", 100.0, 9000.0, 90.0)]
    windows = extract_windows(strokes)
    # Ends 5000..9000 all fit inside the event span.
    assert len(windows) == 5
    assert windows[-1].window_end_ms == 9000.0

    strokes = [ks("a", 0.0, 10.0), ks("b", 100.0, 8999.0, 90.0)]
    assert len(extract_windows(strokes)) == 4


def test_short_stream_has_no_windows():
    strokes = [ks("a", 0.0, 10.0), ks("b", 50.0, 4999.0, 40.0)]
    assert extract_windows(strokes) == []
    assert extract_windows([]) == []
    # Exactly one window length of activity gives exactly one window.
    strokes = [ks("a", 0.0, 10.0), ks("b", 50.0, 5000.0, 40.0)]
    assert len(extract_windows(strokes)) == 1


def test_empty_window_emits_nan_stats():
    strokes = [ks("a", 0.0, 10.0), ks("b", 7000.0, 7010.0, 6990.0)]
    windows = extract_windows(strokes)
    gap = windows[2]  # [2000, 7000) holds nothing
    assert gap.n_keystrokes == 0
    assert math.isnan(gap.avg_dwell) and math.isnan(gap.std_dwell)
    assert math.isnan(gap.avg_flight) and math.isnan(gap.std_flight)
    assert gap.error_rate_pct == 0.0
    assert gap.sparse


def test_equal_dwells_give_zero_std():
    strokes = []
    prev = None
    for i in range(6):
        press = i * 1000.0
        strokes.append(ks("a" if i % 2 else "b", press, press + 55.0,
                          None if prev is None else press - prev))
        prev = press + 55.0
    windows = extract_windows(strokes)
    assert windows[0].std_dwell == 0.0


def test_std_is_population_variant():
    strokes = [
        ks("a", 0.0, 2.0),            # dwell 2
        ks("b", 1000.0, 1004.0, 998.0),  # dwell 4
        ks("c", 4000.0, 5000.0, 2996.0),
    ]
    (w,) = extract_windows(strokes)
    dwells = np.array([2.0, 4.0, 1000.0])
    assert w.std_dwell == pytest.approx(float(dwells.std()), abs=1e-12)
    # Sample std would differ; population divides by n.
    assert w.std_dwell != pytest.approx(float(dwells.std(ddof=1)), abs=1e-9)


def test_first_keystroke_contributes_no_flight():
    strokes = [ks("a", 0.0, 50.0), ks("b", 200.0, 5100.0, 150.0)]
    windows = extract_windows(strokes)
    assert windows[0].avg_flight == pytest.approx(150.0)
    assert windows[0].std_flight == 0.0


def test_dilation_scales_timing_but_not_error_rate():
    base = pair_events(hand_fixture())
    dilated = [ks(k.key, 2 * k.press_ms, 2 * k.release_ms,
                  None if k.flight_ms is None else 2 * k.flight_ms) for k in base]
    w_base = extract_windows(base)
    w_dil = extract_windows(dilated, window_ms=10000.0, step_ms=2000.0)
    assert len(w_base) == len(w_dil)
    for a, b in zip(w_base, w_dil):
        assert b.error_rate_pct == pytest.approx(a.error_rate_pct, abs=1e-12)
        assert b.avg_dwell == pytest.approx(2 * a.avg_dwell, abs=1e-9)
        assert b.std_flight == pytest.approx(2 * a.std_flight, abs=1e-9)


def test_extract_validates_inputs():
    with pytest.raises(ValueError):
        extract_windows([ks("a", 0.0, 5001.0)], window_ms=0.0)
    with pytest.raises(ValueError):
        extract_windows([ks("b", 100.0, 6000.0), ks("a", 0.0, 50.0)])
    with pytest.raises(ValueError):
        Keystroke("a", 100.0, 100.0, None)


# --- matrices and files ---------------------------------------------------


def test_features_to_matrix_filters_sparse():
    windows = extract_windows(pair_events(hand_fixture()))
    dense = features_to_matrix(windows)
    assert dense.shape == (1, 5)
    assert dense[0, 4] == pytest.approx(25.0)
    both = features_to_matrix(windows, include_sparse=True)
    assert both.shape == (2, 5)
    assert features_to_matrix([]).shape == (0, len(FEATURE_NAMES))


def test_feature_round_trip(tmp_path):
    windows = extract_windows(pair_events(hand_fixture()))
    # Tack on an empty window to exercise NaN serialization.
    windows.append(FeatureWindow(9000.0, 14000.0, math.nan, math.nan,
                                 math.nan, math.nan, 0.0, True))
    path = tmp_path / "w.csv"
    write_features(path, windows)
    back = read_features(path)
    assert len(back) == 3
    for orig, parsed in zip(windows, back):
        assert parsed.window_start_ms == orig.window_start_ms
        assert parsed.sparse == orig.sparse
        for a, b in zip(orig.values(), parsed.values()):
            assert (math.isnan(a) and math.isnan(b)) or a == b
    # Full precision survives, so rewriting is byte-identical.
    again = tmp_path / "w2.csv"
    write_features(again, back)
    assert again.read_bytes() == path.read_bytes()


def test_feature_header_layout(tmp_path):
    path = tmp_path / "w.csv"
    write_features(path, [])
    assert path.read_text(encoding="utf-8").splitlines()[0].split(",") == FEATURE_HEADER


def test_read_features_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("nope\n", encoding="utf-8")
    with pytest.raises(ValueError, match="header"):
        read_features(bad)
    rows = ",".join(FEATURE_HEADER) + "\n0,5000,1,2,3,4,5,maybe\n"
    flag = tmp_path / "flag.csv"
    flag.write_text(rows, encoding="utf-8")
    with pytest.raises(ValueError, match="sparse"):
        read_features(flag)


def test_load_grid_features(tmp_path):
    profiles = instantiate_profiles(seed=6)[:1]
    manifest = generate_grid(profiles, tmp_path / "data", n_chars=150, seed=6)
    from keydyn import read_session
    fdir = tmp_path / "features"
    fdir.mkdir()
    for entry in manifest["sessions"]:
        session = read_session(tmp_path / "data" / entry["path"])
        windows = extract_windows(pair_events(session.events))
        write_features(fdir / feature_filename(
            entry["agent_id"], entry["keyboard"], entry["session"]), windows)
    grid = load_grid_features(manifest, fdir)
    assert set(grid) == {(1, k, s) for k in ("laptop", "mechanical") for s in (1, 2)}
    for arr in grid.values():
        assert arr.ndim == 2 and arr.shape[1] == 5
        assert np.all(np.isfinite(arr))
