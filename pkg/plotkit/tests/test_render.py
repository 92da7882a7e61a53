import numpy as np
import pytest

from plotkit import EmptyInputError, FigureSpec, SchemaError, extract_series, render


RESULT_HEADER = (
    "n,l,k,code_seed,graph_file,error_count,error_prob,error_seed,error_mode,"
    "probe_power,feedback_power,gamma,eta,t_max,event_cap,sim_seed,trajectories,"
    "grid_t_min,grid_t_max,grid_points,check_init,p_decode,t_decode_median,"
    "t_decode_p05,t_decode_p95,decode_rate,decode_energy_rate,n_success,n_total"
)


def result_row(error_count=10, probe=1e5, fb=1.0, gamma=0.01, p=1.0, med=100.0,
               p05=10.0, p95=1000.0, rate=0.01, energy=1e-10, n_success=50):
    return (
        f"1000,5,10,1,,{error_count},,7,per_trajectory,{probe},{fb},{gamma},0.0,"
        f"1e6,1000000,42,50,0.001,1e6,100,syndrome,{p},"
        f"{med if med is not None else ''},{p05 if p05 is not None else ''},"
        f"{p95 if p95 is not None else ''},{rate if rate is not None else ''},"
        f"{energy if energy is not None else ''},{n_success},50"
    )


@pytest.fixture
def timeline_csv(tmp_path):
    path = tmp_path / "timeline.csv"
    t = np.geomspace(1e-2, 1e4, 50)
    errors = 10.0 * np.exp(-t / 500.0)
    path.write_text("t,errors\n" + "\n".join(f"{a},{b}" for a, b in zip(t, errors)) + "\n")
    return path


@pytest.fixture
def sweep_csv(tmp_path):
    rows = [
        result_row(error_count=c, gamma=g, p=1.0 - 0.02 * c * (1 if g == 0.01 else 2),
                   med=50.0 * c / g)
        for g in (0.01, 0.001)
        for c in (2, 6, 10)
    ]
    path = tmp_path / "sweep.csv"
    path.write_text(RESULT_HEADER + "\n" + "\n".join(rows) + "\n")
    return path


@pytest.fixture
def power_csv(tmp_path):
    rows = []
    for probe in (1e2, 1e3, 1e4):
        for fb in (1e2, 1e3, 1e4):
            p = 1.0 if probe * fb >= 1e6 else 0.1
            rows.append(result_row(probe=probe, fb=fb, p=p, rate=fb * 1e-4,
                                   energy=1e-9 / (probe + fb)))
    path = tmp_path / "power.csv"
    path.write_text(RESULT_HEADER + "\n" + "\n".join(rows) + "\n")
    return path


def test_error_decay_renders(tmp_path, timeline_csv):
    out = tmp_path / "decay.png"
    spec = FigureSpec("error-decay", (str(timeline_csv),), str(out))
    assert render(spec) == str(out)
    assert out.stat().st_size > 0


def test_error_decay_with_overlay(tmp_path, timeline_csv):
    out = tmp_path / "decay2.png"
    render(FigureSpec("error-decay", (str(timeline_csv), str(timeline_csv)), str(out)))
    assert out.exists()


def test_pdecode_curves_grouped_by_gamma(tmp_path, sweep_csv):
    spec = FigureSpec("pdecode-vs-errors", (str(sweep_csv),), str(tmp_path / "p.png"))
    series = extract_series(spec)
    assert set(series) == {0.01, 0.001}
    counts, ps = series[0.01]
    assert counts.tolist() == [2.0, 6.0, 10.0]
    assert all(a >= b for a, b in zip(ps, ps[1:]))
    render(spec)
    assert (tmp_path / "p.png").exists()


def test_decode_time_band(tmp_path, sweep_csv):
    spec = FigureSpec("decode-time-vs-errors", (str(sweep_csv),), str(tmp_path / "t.png"))
    series = extract_series(spec)
    _, med_small, *_ = series[0.01]
    _, med_tiny, *_ = series[0.001]
    assert np.all(med_tiny > med_small)  # smaller attenuation decodes slower
    render(spec)
    assert (tmp_path / "t.png").exists()


def test_decode_time_skips_no_success_rows(tmp_path):
    rows = [result_row(error_count=2), result_row(error_count=6, p=0.0, med=None,
                                                  p05=None, p95=None, rate=None,
                                                  energy=None, n_success=0)]
    path = tmp_path / "partial.csv"
    path.write_text(RESULT_HEADER + "\n" + "\n".join(rows) + "\n")
    series = extract_series(
        FigureSpec("decode-time-vs-errors", (str(path),), str(tmp_path / "x.png"))
    )
    counts, *_ = series[0.01]
    assert counts.tolist() == [2.0]


def test_power_heatmap(tmp_path, power_csv):
    out = tmp_path / "heat.png"
    spec = FigureSpec("power-heatmap", (str(power_csv),), str(out))
    series = extract_series(spec)
    assert series["p_decode"].shape == (3, 3)
    assert not np.isnan(series["p_decode"]).any()
    render(spec)
    assert out.exists()


def test_rate_energy_section(tmp_path, power_csv):
    out = tmp_path / "rate.png"
    spec = FigureSpec("rate-energy-vs-power", (str(power_csv),), str(out), power_ratio=1.0)
    series = extract_series(spec)
    assert series["power"].tolist() == [1e2, 1e3, 1e4]  # the diagonal cells
    render(spec)
    assert out.exists()


def test_rate_energy_missing_section(tmp_path, power_csv):
    spec = FigureSpec("rate-energy-vs-power", (str(power_csv),), str(tmp_path / "x.png"),
                      power_ratio=7.0)
    with pytest.raises(EmptyInputError):
        extract_series(spec)


def test_missing_column_names_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,count\n1.0,3\n")
    spec = FigureSpec("error-decay", (str(path),), str(tmp_path / "x.png"))
    with pytest.raises(SchemaError, match="errors"):
        render(spec)
    assert not (tmp_path / "x.png").exists()


def test_empty_csv_writes_nothing(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("t,errors\n")
    out = tmp_path / "x.png"
    with pytest.raises(EmptyInputError):
        render(FigureSpec("error-decay", (str(path),), str(out)))
    assert not out.exists()


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(SchemaError):
        FigureSpec("pie-chart", ("a.csv",), str(tmp_path / "x.png"))


def test_extraction_idempotent(timeline_csv, tmp_path):
    spec = FigureSpec("error-decay", (str(timeline_csv),), str(tmp_path / "a.png"))
    s1 = extract_series(spec)
    s2 = extract_series(spec)
    assert np.array_equal(s1["main"][0], s2["main"][0])
    assert np.array_equal(s1["main"][1], s2["main"][1])


def test_cli_render(tmp_path, timeline_csv, capsys):
    from plotkit.cli import main

    out = tmp_path / "cli.png"
    assert main(["render", "--kind", "error-decay", "--in", str(timeline_csv),
                 "--out", str(out)]) == 0
    assert out.exists()
    assert "wrote" in capsys.readouterr().out
