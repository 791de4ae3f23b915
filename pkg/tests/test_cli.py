import csv
import json
import math

import numpy as np
import pytest

from _reference import ROBNIK_AREA, ROBNIK_PERIMETER
from ringspec.analytic import annulus_formula
from ringspec.cli import CSV_HEADER, main, read_spectrum_file


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_exact_first_row(tmp_path):
    out = tmp_path / "ex.csv"
    assert main(["exact", "--a", "0.5", "--b", "1", "--count", "10", "--out", str(out)]) == 0
    rows = _rows(out)
    assert list(rows[0]) == CSV_HEADER
    assert len(rows) == 10
    assert float(rows[0]["energy"]) == pytest.approx(39.01328850, rel=1e-8)
    assert (rows[0]["label1"], rows[0]["label2"], rows[0]["multiplicity"]) == ("0", "1", "1")
    manifest = json.loads((tmp_path / "ex.csv.manifest.json").read_text())
    assert manifest["command"] == "exact" and manifest["parameters"]["count"] == 10


def test_exact_count_zero_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["exact", "--a", "0.5", "--count", "0"])
    assert exc.value.code == 2


def test_exact_bad_radii(capsys):
    assert main(["exact", "--a", "1.5", "--b", "1"]) == 2
    assert "0 < a < b" in capsys.readouterr().err


def test_exact_json_matches_csv(tmp_path):
    c, j = tmp_path / "s.csv", tmp_path / "s.json"
    main(["exact", "--a", "0.3", "--count", "25", "--out", str(c)])
    main(["exact", "--a", "0.3", "--count", "25", "--out", str(j)])
    data = json.loads(j.read_text())
    assert "manifest" in data
    assert [r["energy"] for r in data["levels"]] == [float(r["energy"]) for r in _rows(c)]
    np.testing.assert_array_equal(read_spectrum_file(c), read_spectrum_file(j))


def test_exact_stdout(capsys):
    assert main(["exact", "--a", "0.9", "--count", "3"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == ",".join(CSV_HEADER) and len(lines) == 4


def test_ccm_small_grid_and_cache(tmp_path):
    out = tmp_path / "c.csv"
    args = ["ccm", "--a", "0.5", "--nx", "24", "--ny", "60", "--count", "10", "--out", str(out),
            "--cache-dir", str(tmp_path / "cache")]
    assert main(args) == 0
    e = read_spectrum_file(out)
    assert e[0] == pytest.approx(39.01328850, rel=0.005)
    m1 = json.loads((tmp_path / "c.csv.manifest.json").read_text())
    assert m1["cache_hits"] == [False, False] and m1["grid"] == [24, 60]
    assert main(args) == 0
    m2 = json.loads((tmp_path / "c.csv.manifest.json").read_text())
    assert m2["cache_hits"] == [True, True]
    np.testing.assert_array_equal(read_spectrum_file(out), e)
    assert _rows(out)[0]["engine"] == "ccm" and _rows(out)[0]["label1"] == ""


def test_ccm_bundled_robnik_map(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["ccm", "--map", "robnik", "--nx", "10", "--ny", "60", "--count", "5",
                 "--out", str(out), "--no-cache"]) == 0
    assert read_spectrum_file(out)[0] == pytest.approx(219.7333, rel=0.01)


def test_ccm_map_file(tmp_path):
    mp = tmp_path / "m.json"
    mp.write_text(json.dumps({"lx": 0.1, "c": 1.0, "eta": [1.0, 0.1]}))
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["ccm", "--map", str(mp), "--nx", "8", "--ny", "30", "--count", "5", "--out", str(out1),
          "--no-cache"])
    main(["ccm", "--map", "robnik", "--nx", "8", "--ny", "30", "--count", "5", "--out", str(out2),
          "--no-cache"])
    assert out1.read_text() == out2.read_text()


def test_ccm_dimension_guard(capsys):
    assert main(["ccm", "--a", "0.5", "--nx", "40", "--ny", "400", "--no-cache"]) == 4
    assert "exceeds" in capsys.readouterr().err


def test_ccm_degenerate_map(tmp_path):
    mp = tmp_path / "bad.json"
    mp.write_text(json.dumps({"lx": 0.2, "c": 1.0, "eta": [1.0, 0.6]}))
    assert main(["ccm", "--map", str(mp), "--nx", "8", "--ny", "10", "--no-cache"]) == 3


def test_ccm_missing_map():
    assert main(["ccm", "--map", "nowhere.json", "--ny", "10"]) == 2


def test_ccm_vectors(tmp_path):
    vec = tmp_path / "v.csv"
    assert main(["ccm", "--a", "0.6", "--nx", "10", "--ny", "20", "--count", "3", "--no-cache",
                 "--out", str(tmp_path / "e.csv"), "--vectors", str(vec), "--state", "0"]) == 0
    rows = _rows(vec)
    assert list(rows[0]) == ["u", "v", "psi"] and len(rows) == 9 * 21
    r = np.array([math.hypot(float(x["u"]), float(x["v"])) for x in rows])
    assert np.all((r > 0.6) & (r < 1.0))
    assert all(float(x["psi"]) > 0 for x in rows)


def test_ccm_bad_state(tmp_path):
    assert main(["ccm", "--a", "0.6", "--nx", "4", "--ny", "4", "--count", "2", "--no-cache",
                 "--out", str(tmp_path / "e.csv"), "--vectors", str(tmp_path / "v.csv"),
                 "--state", "50"]) == 2


def test_analytic_alpha_zero(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["analytic", "--a", "0.9", "--count", "50", "--out", str(a)])
    main(["analytic", "--a", "0.9", "--alpha", "0", "--count", "50", "--out", str(b)])
    assert a.read_text() == b.read_text()
    rows = _rows(a)
    assert float(rows[0]["energy"]) == pytest.approx(987.1575032, rel=1e-9)
    assert rows[0]["engine"] == "analytic"


def test_analytic_alpha(tmp_path):
    out = tmp_path / "r.csv"
    main(["analytic", "--a", str(math.exp(-0.2)), "--alpha", "0.1", "--count", "5",
          "--out", str(out)])
    r = tmp_path / "r2.csv"
    main(["analytic", "--map", "robnik", "--count", "5", "--out", str(r)])
    np.testing.assert_allclose(read_spectrum_file(out), read_spectrum_file(r), rtol=1e-12)


def test_variational_radial(tmp_path):
    out = tmp_path / "v.csv"
    assert main(["variational", "--a", "0.001", "--basis", "radial", "--n", "5",
                 "--out", str(out)]) == 0
    rows = _rows(out)
    assert [int(r["n"]) for r in rows] == [1, 2, 3, 4, 5]
    assert float(rows[-1]["energy"]) == pytest.approx(7.367206060, rel=1e-6)
    assert float(rows[0]["energy"]) == pytest.approx(annulus_formula(0.001, 1, 0), rel=1e-12)


def test_variational_robnik_monotone(tmp_path):
    out = tmp_path / "v.json"
    assert main(["variational", "--map", "robnik", "--basis", "angular", "--n", "6",
                 "--out", str(out)]) == 0
    e = [r["energy"] for r in json.loads(out.read_text())["rows"]]
    assert len(e) == 6 and all(y < x for x, y in zip(e, e[1:]))


def test_variational_needs_shape(capsys):
    assert main(["variational", "--n", "2"]) == 2


def test_berry_on_oracle_file(tmp_path):
    spec = tmp_path / "ex.csv"
    main(["exact", "--a", "0.5", "--count", "1500", "--out", str(spec)])
    out, curves = tmp_path / "g.json", tmp_path / "curves.csv"
    area = math.pi * 0.75
    assert main(["berry", str(spec), "--area-exact", str(area), "--out", str(out),
                 "--curves", str(curves)]) == 0
    g = json.loads(out.read_text())
    assert g["levels"] == 1500
    assert g["area"] == pytest.approx(area, rel=0.005)
    assert abs(g["area_relative_error"]) < 0.005
    assert g["perimeter"] == pytest.approx(3 * math.pi, rel=0.01)
    rows = _rows(curves)
    assert list(rows[0]) == ["t", "A0", "A1", "A2", "A3", "t_star"]
    marked = [r for r in rows if r["t_star"] == "1"]
    assert len(marked) == 1 and float(marked[0]["t"]) == pytest.approx(g["t_star"], rel=0.05)


def test_berry_on_ccm_robnik_file(tmp_path, robnik_ccm_2000):
    spec = tmp_path / "robnik.txt"
    spec.write_text("\n".join(repr(float(e)) for e in robnik_ccm_2000))
    out = tmp_path / "g.json"
    assert main(["berry", str(spec), "--out", str(out)]) == 0
    g = json.loads(out.read_text())
    assert g["area"] == pytest.approx(ROBNIK_AREA, rel=0.005)
    assert g["perimeter"] == pytest.approx(ROBNIK_PERIMETER, rel=0.01)
    assert abs(g["constant"]) <= 0.05


def test_berry_bad_file(tmp_path):
    assert main(["berry", str(tmp_path / "missing.csv")]) == 2
    bad = tmp_path / "neg.txt"
    bad.write_text("1.0\n-3.0\n")
    assert main(["berry", str(bad)]) == 2


def test_geometry_robnik(capsys):
    assert main(["geometry", "--map", "robnik"]) == 0
    g = json.loads(capsys.readouterr().out)
    assert f"{g['area']:.6g}" == "1.07032"
    assert f"{g['perimeter_total']:.6g}" == "11.525"


def test_geometry_annulus_and_convergence(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["geometry", "--a", "0.5", "--out", str(a)])
    main(["geometry", "--map", "robnik", "--quad-n", "512", "--out", str(b)])
    assert json.loads(a.read_text())["area"] == pytest.approx(math.pi * 0.75, rel=1e-10)
    g2 = json.loads(b.read_text())
    main(["geometry", "--map", "robnik", "--out", str(b)])
    g1 = json.loads(b.read_text())
    for k in ("area", "perimeter_total"):
        assert g1[k] == pytest.approx(g2[k], rel=1e-8)


def test_deterministic_outputs(tmp_path):
    for cmd in (["exact", "--a", "0.4", "--count", "30"],
                ["analytic", "--map", "robnik", "--count", "30"],
                ["ccm", "--a", "0.4", "--nx", "8", "--ny", "20", "--count", "30", "--no-cache"]):
        a, b = tmp_path / "1.csv", tmp_path / "2.csv"
        main(cmd + ["--out", str(a)])
        main(cmd + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "ringspec" in capsys.readouterr().out
