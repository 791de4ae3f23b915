"""Command-line front end.

Every command writes plain data (CSV or JSON, chosen by the output file
extension; CSV on stdout when no file is given) together with a run
manifest.  Exit codes: 0 success, 2 usage or domain error, 3 numerical
degeneracy, 4 resource guard.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import platform
import sys
import tempfile
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .analytic import enumerate_analytic
from .ccm import BlockCache, CcmConfig, balanced_nx, sample_wavefunction, solve
from .conformal import PowerSeriesMap, annulus_map, geometry, load_map
from .errors import AccuracyError, DegeneracyError, DomainError, StateError
from .exact import annulus_spectrum
from .spectral_geometry import (HeatSumSeries, approximant_curves, estimate_geometry)
from .spectrum import Spectrum
from .variational import TrialBasis, variational_ground_annulus, variational_ground_general

__all__ = ["main", "build_parser", "read_spectrum_file", "MAX_DIM"]

MAX_DIM = 12000
EXIT_USAGE, EXIT_DEGENERATE, EXIT_RESOURCE = 2, 3, 4
CSV_HEADER = ["index", "energy", "label1", "label2", "s", "multiplicity", "engine"]


class ResourceGuard(Exception):
    pass


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _manifest(args: argparse.Namespace, extra: dict | None = None) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    m = {
        "command": args.command,
        "parameters": params,
        "versions": {"ringspec": __version__, "numpy": np.__version__,
                     "scipy": scipy.__version__, "python": platform.python_version()},
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    if extra:
        m.update(extra)
    return m


def _spectrum_rows(spec: Spectrum) -> list[list]:
    rows = []
    for i, lv in enumerate(spec):
        labels = list(lv.labels) + [""] * (2 - len(lv.labels))
        rows.append([i + 1, float(lv.energy), labels[0], labels[1],
                     "" if lv.s is None else lv.s, lv.multiplicity, lv.engine])
    return rows


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit_table(out: str | None, header, rows, manifest: dict, key: str = "rows") -> None:
    """CSV (or JSON for *.json) to ``out``; CSV to stdout without ``out``."""
    if out is None:
        sys.stdout.write(_csv_text(header, rows))
        return
    path = Path(out)
    manifest = dict(manifest, outputs=[str(path)])
    if path.suffix.lower() == ".json":
        records = [dict(zip(header, r)) for r in rows]
        _atomic_write(path, json.dumps({"manifest": manifest, key: records}, indent=1) + "\n")
    else:
        _atomic_write(path, _csv_text(header, rows))
        _atomic_write(path.with_name(path.name + ".manifest.json"),
                      json.dumps(manifest, indent=1) + "\n")


def _emit_spectrum(out, spec: Spectrum, manifest: dict) -> None:
    _emit_table(out, CSV_HEADER, _spectrum_rows(spec), manifest, key="levels")


def _emit_json(out: str | None, payload: dict, manifest: dict) -> None:
    text = json.dumps(dict(payload, manifest=manifest), indent=1) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        _atomic_write(Path(out), text)


def _resolve_map(spec: str) -> PowerSeriesMap:
    p = Path(spec)
    if p.exists():
        return load_map(p)
    name = p.name if p.suffix else p.name + ".json"
    bundled = resources.files("ringspec") / "data" / name
    if bundled.is_file():
        return PowerSeriesMap.from_dict(json.loads(bundled.read_text()))
    raise DomainError(f"map file not found: {spec}")


def _map_from_args(args) -> PowerSeriesMap:
    if getattr(args, "map", None):
        return _resolve_map(args.map)
    if args.a is None:
        raise DomainError("give --a or --map")
    alpha = getattr(args, "alpha", None)
    base = annulus_map(args.a)
    if alpha:
        return PowerSeriesMap(lx=base.lx, c=1.0, eta=(1.0, alpha))
    return base


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def cmd_exact(args) -> int:
    spec = annulus_spectrum(args.a, args.b, args.count)
    _emit_spectrum(args.out, spec, _manifest(args))
    return 0


def cmd_ccm(args) -> int:
    m = _map_from_args(args)
    nx = args.nx if args.nx is not None else balanced_nx(m.lx, args.ny)
    config = CcmConfig(nx, args.ny, m)
    if config.dim > MAX_DIM:
        raise ResourceGuard(f"matrix dimension {config.dim} exceeds {MAX_DIM}")
    count = min(args.count, config.dim)
    cache = None if args.no_cache else BlockCache(args.cache_dir)
    res = solve(config, count, want_vectors=args.vectors is not None, cache=cache)
    spec = Spectrum.from_energies(res.energies, engine="ccm")
    manifest = _manifest(args, {"grid": [nx, args.ny], "dimension": config.dim,
                                "cache_hits": list(res.cache_hits)})
    _emit_spectrum(args.out, spec, manifest)
    if args.vectors is not None:
        rows = sample_wavefunction(res, args.state)
        _atomic_write(Path(args.vectors),
                      _csv_text(["u", "v", "psi"], rows.tolist()))
    return 0


def cmd_analytic(args) -> int:
    m = _map_from_args(args)
    spec = enumerate_analytic(m, args.count)
    _emit_spectrum(args.out, spec, _manifest(args))
    return 0


def cmd_variational(args) -> int:
    m = _map_from_args(args)
    rows = []
    for n in range(1, args.n + 1):
        basis = TrialBasis(args.basis, n)
        if m.is_annulus and m.c == 1.0:
            e = variational_ground_annulus(math.exp(-2 * m.lx), basis)
        else:
            e = variational_ground_general(m, basis, quad_n=args.quad_n)
        rows.append([n, e])
    _emit_table(args.out, ["n", "energy"], rows, _manifest(args))
    return 0


def read_spectrum_file(path) -> np.ndarray:
    """Energies from a CSV (``energy`` column), a JSON spectrum, or plain text."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        data = json.loads(text)
        recs = data.get("levels", data.get("rows", [])) if isinstance(data, dict) else data
        return np.array([r["energy"] if isinstance(r, dict) else r for r in recs], dtype=float)
    first = text.lstrip().split("\n", 1)[0]
    if "energy" in first:
        reader = csv.DictReader(io.StringIO(text))
        return np.array([float(r["energy"]) for r in reader])
    return np.array([float(tok) for tok in text.replace(",", " ").split()])


def cmd_berry(args) -> int:
    energies = read_spectrum_file(args.spectrum)
    series = HeatSumSeries(energies)
    est = estimate_geometry(series)
    payload = {"levels": len(series), "t_star": est.t_star, "area": est.area,
               "perimeter": est.perimeter, "constant": est.constant,
               "area_spread": est.area_spread,
               "area_approximants": list(est.approximants)}
    if args.area_exact is not None:
        payload["area_relative_error"] = (est.area - args.area_exact) / args.area_exact
    manifest = _manifest(args, {"inputs": [str(args.spectrum)]})
    _emit_json(args.out, payload, manifest)
    if args.curves:
        t = np.geomspace(est.t_star / 20, est.t_star * 20, 200)
        c = approximant_curves(series, t)
        mark = int(np.argmin(np.abs(np.log(t / est.t_star))))
        rows = [[float(t[i])] + [float(c[f"A{m}"][i]) for m in range(4)] + [int(i == mark)]
                for i in range(len(t))]
        _atomic_write(Path(args.curves),
                      _csv_text(["t", "A0", "A1", "A2", "A3", "t_star"], rows))
    return 0


def cmd_geometry(args) -> int:
    m = _map_from_args(args)
    g = geometry(m, quad_n=args.quad_n)
    payload = {"area": g.area, "perimeter_outer": g.perimeter_outer,
               "perimeter_inner": g.perimeter_inner, "perimeter_total": g.perimeter_total,
               "euler_constant": g.euler_constant}
    _emit_json(args.out, payload, _manifest(args))
    return 0


def _add_shape(p, alpha: bool = False):
    p.add_argument("--a", type=float, help="inner radius of the annulus a < r < 1")
    p.add_argument("--map", help="map JSON file (or the name of a bundled map, e.g. robnik)")
    if alpha:
        p.add_argument("--alpha", type=float, default=None,
                       help="second coefficient: ring e^(z-Lx) + alpha e^(2(z-Lx)), a = e^(-2Lx)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ringspec", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"ringspec {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="exact annulus spectrum")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--count", type=_positive, default=10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("ccm", help="conformal collocation spectrum")
    _add_shape(p, alpha=True)
    p.add_argument("--nx", type=int, help="even; default from the balance rule")
    p.add_argument("--ny", type=int, required=True)
    p.add_argument("--count", type=_positive, default=10)
    p.add_argument("--out")
    p.add_argument("--cache-dir", help="derivative-block cache (default $RINGSPEC_CACHE_DIR)")
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("--vectors", metavar="CSV", help="write (u, v, psi) of --state here")
    p.add_argument("--state", type=int, default=0)
    p.set_defaults(func=cmd_ccm)

    p = sub.add_parser("analytic", help="resummed analytic spectrum")
    _add_shape(p, alpha=True)
    p.add_argument("--count", type=_positive, default=10)
    p.add_argument("--out")
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("variational", help="variational ground energies for N = 1..n")
    _add_shape(p, alpha=True)
    p.add_argument("--basis", choices=["radial", "angular"], default="radial")
    p.add_argument("--n", type=_positive, default=5)
    p.add_argument("--quad-n", type=int, default=128)
    p.add_argument("--out")
    p.set_defaults(func=cmd_variational)

    p = sub.add_parser("berry", help="area, perimeter and constant from a spectrum file")
    p.add_argument("spectrum")
    p.add_argument("--area-exact", type=float)
    p.add_argument("--curves", metavar="CSV", help="write A_0..A_3 on a t grid here")
    p.add_argument("--out")
    p.set_defaults(func=cmd_berry)

    p = sub.add_parser("geometry", help="area and perimeter of a ring by quadrature")
    _add_shape(p, alpha=True)
    p.add_argument("--quad-n", type=int, default=256)
    p.add_argument("--out")
    p.set_defaults(func=cmd_geometry)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, ValueError, FileNotFoundError, StateError, IndexError) as exc:
        print(f"ringspec {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DegeneracyError, AccuracyError, np.linalg.LinAlgError) as exc:
        print(f"ringspec {args.command}: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ResourceGuard, MemoryError) as exc:
        print(f"ringspec {args.command}: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
