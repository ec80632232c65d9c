import json
import math

import numpy as np
import pytest

from su11feedback.experiments import (
    FIELDNAMES,
    PRESETS,
    SweepSpec,
    compare_resources,
    format_value,
    plot_script,
    preset,
    rows_to_csv,
    run_sweep,
)
from su11feedback.gaussian import intensity
from su11feedback.qfi import qfi_pure
from su11feedback.schemes import SchemeConfig, SchemeKind, build, estimate_period


def by(rows, **match):
    return [row for row in rows if all(getattr(row, k) == v for k, v in match.items())]


def test_single_point_matches_library_call():
    spec = SweepSpec(schemes=["sequential"], r=[0.1], phi=[0.7], loops="3..3")
    (row,) = list(run_sweep(spec))
    out = build(SchemeConfig(SchemeKind.SEQUENTIAL, r=0.1, loops=3), 0.7)
    res = qfi_pure(out.state, out.dstate)
    n = intensity(out.state)
    assert row.qfi == res.H
    assert row.delta_phi == res.delta_phi
    assert row.qfi_scaled == res.H / 9
    assert (row.intensity_1, row.intensity_2) == (n[0], n[1])
    assert row.error == ""


def test_grid_order():
    spec = SweepSpec(schemes=["partial", "sequential"], r=[0.2, 0.1], eta=[0.5, 0.0],
                     phi=[1.0, 0.5], loops="1..2")
    rows = list(run_sweep(spec))
    assert len(rows) == 2 * 2 * 2 * 2 * 2
    keys = [(row.r, row.eta, row.N, row.phi) for row in rows[:16]]
    assert keys == sorted(keys)
    assert [row.scheme for row in rows[::16]] == ["partial", "sequential"]


def test_standard_collapses_loop_axis():
    spec = SweepSpec(schemes=["standard"], r=[0.1], phi=[0.5], loops="1..5")
    rows = list(run_sweep(spec))
    assert [row.N for row in rows] == [1]


def test_noisy_formula_auto():
    spec = SweepSpec(schemes=["sequential"], r=[0.1], phi=[0.5], loops="2..2", eta=[0.0, 0.3])
    lossless, lossy = run_sweep(spec)
    assert lossless.error == lossy.error == ""
    assert lossy.qfi < 2 * lossless.qfi
    forced = list(run_sweep(SweepSpec(schemes=["sequential"], r=[0.1], phi=[0.5],
                                      loops="2..2", qfi_formula="noisy")))[0]
    assert forced.qfi == 2 * lossless.qfi
    mixed = list(run_sweep(SweepSpec(schemes=["sequential"], r=[0.1], phi=[0.5],
                                     loops="2..2", eta=[0.3], qfi_formula="pure")))[0]
    assert "NotPureError" in mixed.error
    assert math.isnan(mixed.qfi)


def test_auto_swap_interval():
    spec = SweepSpec(schemes=["swapping"], r=[0.1], phi=[1.0, 0.01], loops="3..3",
                     swap_interval="auto")
    bad, good = run_sweep(spec)  # phases come out sorted
    assert good.k == estimate_period(SchemeConfig(SchemeKind.SEQUENTIAL, r=0.1), 1.0)
    assert bad.k is None and "PeriodNotResolvedError" in bad.error


def test_errors_do_not_stop_the_sweep():
    spec = SweepSpec(schemes=["standard-nr"], r=[0.1], phi=[np.pi / 2], loops="40..41")
    rows = list(run_sweep(spec))
    assert len(rows) == 2
    assert all("IllConditionedError" in row.error for row in rows)


def test_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec(schemes=["nope"])
    with pytest.raises(ValueError):
        SweepSpec(r=[])
    with pytest.raises(ValueError):
        SweepSpec(phi_steps=0)
    with pytest.raises(ValueError):
        SweepSpec(precision=5)
    with pytest.raises(ValueError):
        SweepSpec(precision=18)
    with pytest.raises(ValueError):
        SweepSpec(loops="3..1")
    with pytest.raises(ValueError):
        SweepSpec(eta=[1.2])
    with pytest.raises(ValueError):
        SweepSpec(swap_interval=0)
    with pytest.raises(ValueError):
        SweepSpec.from_dict({"bogus": 1})


def test_spec_json_roundtrip():
    spec = SweepSpec(schemes=["partial"], r=[0.1, 0.2], loops="2..5", swap_interval="auto")
    again = SweepSpec.from_json(json.dumps(spec.to_dict()))
    assert again == spec


def test_phi_grid():
    assert SweepSpec(phi_min=0.0, phi_max=1.0, phi_steps=3).phi_grid() == [0.0, 0.5, 1.0]
    assert SweepSpec(phi_min=0.2, phi_steps=1).phi_grid() == [0.2]
    assert SweepSpec(phi=[0.3, 0.1]).phi_grid() == [0.1, 0.3]


def test_format_value():
    assert format_value(0.1 + 0.2, 12) == "0.3"
    assert format_value(0.1 + 0.2, 17) == "0.30000000000000004"
    assert format_value(1 / 3, 6) == "0.333333"
    assert format_value(math.nan, 8) == "nan"
    assert format_value(math.inf, 8) == "inf"
    assert format_value(None, 8) == ""
    assert format_value(7, 8) == "7"
    for x in (1.234567890123e-7, 98765.4321):
        assert float(format_value(x, 17)) == x


def test_csv_schema():
    spec = SweepSpec(schemes=["sequential"], r=[0.1], phi=[0.5, 1.0], loops="1..2")
    text = rows_to_csv(run_sweep(spec), spec.precision)
    lines = text.split("\n")
    assert lines[0] == ",".join(FIELDNAMES)
    assert "\r" not in text
    assert text.endswith("\n") and lines[-1] == ""
    assert all(len(line.split(",")) == len(FIELDNAMES) for line in lines[:-1])
    text.encode("utf-8")


def test_parallel_output_identical():
    spec = SweepSpec(schemes=["sequential", "partial", "swapping"], r=[0.1, 0.15],
                     phi_steps=7, loops="1..6", swap_interval=2)
    serial = rows_to_csv(run_sweep(spec, jobs=1))
    assert rows_to_csv(run_sweep(spec, jobs=1)) == serial
    assert rows_to_csv(run_sweep(spec, jobs=2)) == serial
    assert rows_to_csv(run_sweep(spec, jobs=3)) == serial


def test_compare_first_loop_coincides():
    rows = compare_resources(0.1, 0.9, 3)
    assert [row.scheme for row in rows[:3]] == ["sequential", "partial", "standard-nr"]
    seq, par = rows[0], rows[1]
    assert seq.delta_phi == par.delta_phi
    assert seq.qfi == par.qfi
    with pytest.raises(ValueError):
        compare_resources(0.1, 0.9, 0)


def test_compare_small_phase_favours_feedback():
    rows = compare_resources(0.1, np.pi / 16, 6)
    for n in range(2, 7):
        std = by(rows, N=n, scheme="standard-nr")[0].delta_phi
        assert by(rows, N=n, scheme="sequential")[0].delta_phi < std
        assert by(rows, N=n, scheme="partial")[0].delta_phi < std


def test_compare_large_phase_favours_partial():
    rows = compare_resources(0.1, np.pi / 2, 20)
    for n in range(10, 21):
        assert by(rows, N=n, scheme="sequential")[0].delta_phi > by(rows, N=n, scheme="partial")[0].delta_phi


def test_presets_load():
    for name in list(PRESETS) + ["fig4", "fig5", "fig6"]:
        spec = preset(name)
        assert spec.precision == 12
    with pytest.raises(KeyError):
        preset("fig1")
    assert preset("fig8").swap_interval == 4
    assert len(preset("fig9").phi_grid()) == 100


def test_fig5_scaled_qfi_non_decreasing():
    rows = list(run_sweep(preset("fig5")))
    for r in (0.05, 0.1, 0.15):
        scaled = [row.qfi_scaled for row in by(rows, r=r)]
        assert len(scaled) == 10
        assert np.all(np.diff(scaled) >= 0)


def test_fig7_sequential_minimum():
    rows = list(run_sweep(preset("fig7")))
    seq = by(rows, scheme="sequential", phi=np.pi / 4)
    dphi = [row.delta_phi for row in seq]
    n_min = seq[int(np.argmin(dphi))].N
    assert abs(n_min - 4) <= 1


def test_plot_script():
    text = plot_script("out.csv", "N", "qfi")
    assert "plot 'out.csv' using 5:11" in text
