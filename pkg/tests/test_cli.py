import json

from beamshare.cli import CSV_HEADER, main


def _write_config(path, **overrides):
    cfg = dict(
        n_antennas=2,
        m_beams=2,
        snr_db=[10.0],
        r_p_bpcu=0.1,
        r_s_bpcu=1.0,
        trials=20,
        seed=3,
        schemes=["selection", "scheme1"],
        metric="outage",
    )
    cfg.update(overrides)
    path.write_text(json.dumps(cfg))
    return str(path)


def _rows(text):
    lines = [l for l in text.splitlines() if l and not l.startswith("#")]
    assert lines[0] == CSV_HEADER
    return lines[1:]


def test_sweep_minimal_config(tmp_path):
    cfg = _write_config(tmp_path / "cfg.json")
    out = tmp_path / "out.csv"
    assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
    rows = _rows(out.read_text())
    assert len(rows) == 2  # one SNR point x two schemes
    for row in rows:
        fields = row.split(",")
        assert fields[3] in ("selection", "scheme1")
        assert fields[4] == "outage"
        assert 0.0 <= float(fields[5]) <= 1.0


def test_sweep_byte_identical_reruns(tmp_path):
    cfg = _write_config(tmp_path / "cfg.json")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", "--config", cfg, "--out", str(a)]) == 0
    assert main(["sweep", "--config", cfg, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_rejects_bad_geometry(tmp_path, capsys):
    cfg = _write_config(tmp_path / "cfg.json", n_antennas=1, m_beams=2)
    assert main(["sweep", "--config", cfg, "--out", "-"]) == 2
    err = capsys.readouterr().err
    assert "n_antennas must be >= m_beams" in err


def test_sweep_rejects_unknown_field(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    _write_config(path)
    raw = json.loads(path.read_text())
    raw["snr_dbs"] = raw.pop("snr_db")
    path.write_text(json.dumps(raw))
    assert main(["sweep", "--config", str(path), "--out", "-"]) == 2
    assert "snr_dbs" in capsys.readouterr().err


def test_sweep_rejects_bad_json(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text("{not json")
    assert main(["sweep", "--config", str(path), "--out", "-"]) == 2
    assert "JSON" in capsys.readouterr().err


def test_sweep_unwritable_output(tmp_path):
    cfg = _write_config(tmp_path / "cfg.json")
    target = tmp_path / "missing-dir" / "out.csv"
    assert main(["sweep", "--config", cfg, "--out", str(target)]) == 3


def test_sweep_overrides_and_stdout(tmp_path, capsys):
    cfg = _write_config(tmp_path / "cfg.json")
    code = main(
        [
            "sweep",
            "--config",
            cfg,
            "--trials",
            "5",
            "--snr-db",
            "0:20:10",
            "--metric",
            "ergodic_rate",
            "--out",
            "-",
        ]
    )
    assert code == 0
    rows = _rows(capsys.readouterr().out)
    assert len(rows) == 6  # three SNR points x two schemes
    assert {r.split(",")[0] for r in rows} == {"0.0", "10.0", "20.0"}


def test_bad_snr_spec(tmp_path, capsys):
    cfg = _write_config(tmp_path / "cfg.json")
    assert main(["sweep", "--config", cfg, "--snr-db", "10:0:5", "--out", "-"]) == 2


def test_preset_unknown_name():
    assert main(["preset", "figZZ", "--out", "-"]) == 2


def test_preset_smoke_fig1a(tmp_path):
    out = tmp_path / "fig1a.csv"
    code = main(
        ["preset", "fig1a", "--trials", "10", "--snr-db", "0:20:10", "--out", str(out)]
    )
    assert code == 0
    text = out.read_text()
    assert text.splitlines()[0].startswith("#")
    rows = _rows(text)
    assert len(rows) == 6  # 3 SNR points x {M=2, M=4}
    assert {r.split(",")[2] for r in rows} == {"2", "4"}
    assert all(r.split(",")[3] == "selection" for r in rows)


def test_preset_fig2b_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["preset", "fig2b", "--seed", "7", "--trials", "25", "--snr-db", "10:20:10"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_preset_fig2b_dominance_rows(tmp_path):
    out = tmp_path / "fig2b.csv"
    code = main(
        ["preset", "fig2b", "--trials", "60", "--snr-db", "10:30:10", "--out", str(out)]
    )
    assert code == 0
    rows = [r.split(",") for r in _rows(out.read_text())]
    table = {(r[0], r[2], r[3]): float(r[5]) for r in rows}
    for snr in ("10.0", "20.0", "30.0"):
        for m in ("2", "4"):
            assert table[(snr, m, "scheme2")] >= table[(snr, m, "selection")]


def test_preset_fig1b_fig2a_smoke(tmp_path):
    for name in ("fig1b", "fig2a"):
        out = tmp_path / f"{name}.csv"
        code = main(["preset", name, "--trials", "5", "--snr-db", "10", "--out", str(out)])
        assert code == 0
        rows = _rows(out.read_text())
        assert rows and all(r.split(",")[4] == "ergodic_rate" for r in rows)


def test_preset_fig1a_outage_nonincreasing_high_snr(tmp_path):
    # the no-floor trend shows through at Monte Carlo scale past 20 dB
    out = tmp_path / "fig1a.csv"
    code = main(
        ["preset", "fig1a", "--trials", "10000", "--seed", "2", "--snr-db",
         "20:40:10", "--out", str(out)]
    )
    assert code == 0
    rows = [r.split(",") for r in _rows(out.read_text())]
    for m in ("2", "4"):
        series = [(float(r[0]), float(r[5])) for r in rows if r[2] == m]
        values = [v for _, v in sorted(series)]
        assert all(a >= b for a, b in zip(values, values[1:]))


def test_validate_failure_exit_code(capsys, monkeypatch):
    import beamshare.cli as cli_mod
    from beamshare.validation import CheckResult

    monkeypatch.setitem(
        cli_mod.SUITES, "zf", lambda seed: [CheckResult("zf.forced", False, "boom")]
    )
    assert main(["validate", "zf"]) == 1
    out = capsys.readouterr().out
    assert "[FAIL] zf.forced" in out


def test_validate_zf_passes(capsys):
    assert main(["validate", "zf", "--seed", "0"]) == 0
    out = capsys.readouterr().out
    assert "[PASS]" in out and "[FAIL]" not in out


def test_validate_deterministic_report(capsys):
    assert main(["validate", "zf", "--seed", "7"]) == 0
    first = capsys.readouterr().out
    assert main(["validate", "zf", "--seed", "7"]) == 0
    second = capsys.readouterr().out
    assert first == second


def test_csv_header_schema():
    assert CSV_HEADER == "snr_db,n,m,scheme,metric,value,std_err,trials,seed,resamples"
