"""Configuration-driven command line interface.

Reads a JSON run configuration describing a domain, a construction, a list
of named check suites, and output files; builds the map, runs the checks,
and writes CSV fields, OBJ meshes, and plain-text reports.  Re-running the
same configuration produces byte-identical outputs: all sweeps iterate in
fixed order and floats are formatted with round-trip precision.

Subcommands: check, curvature, mesh, factor, degree, polefit.  The
QUATCONF_THREADS environment variable is accepted as an upper bound on
worker parallelism; the current sweeps are serial, which trivially
respects any bound and keeps outputs deterministic.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Optional

from .cfun import CPolynomial, Divisor, INFINITY, RationalMap
from .errors import QuatconfError
from .jets import Jet2, const2, coordinate_jets2
from .minimal import MinimalPair, build_minimal_pair, branch_zero_report, minimal_diagnostics
from .quat import I, J, Quaternion
from .schwarz import bound_constants, pick_check
from .sphere import SphereMap, from_lambda_pair, sphere_degree
from .superconf import (
    FactoredMap,
    build_psi,
    build_superconformal,
    build_twistor,
    divisor_of_factored,
    superconformal_from_divisor,
)
from .surface import (
    CSV_COLUMNS,
    PlanarDomain,
    SurfaceMap,
    conformal_residual_at,
    curvature_at,
    field_rows,
    inverse_stereo_surface,
    jet_at,
    vanish_order_fit,
    wintgen_slack_at,
)

__all__ = ["main", "run_config", "export_mesh", "export_csv", "load_config"]


# ---------------------------------------------------------------------------
# config parsing


class ConfigError(QuatconfError):
    pass


def _cx(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise ConfigError(f"expected a number or [re, im] pair, got {v!r}")


def _poly(v) -> CPolynomial:
    if not isinstance(v, list):
        raise ConfigError(f"polynomial must be a list of [re, im] pairs, got {v!r}")
    return CPolynomial([_cx(c) for c in v])


def _rational(v) -> RationalMap:
    if isinstance(v, dict):
        if "num" not in v or "den" not in v:
            raise ConfigError("rational spec needs 'num' and 'den'")
        return RationalMap(_poly(v["num"]), _poly(v["den"]))
    return RationalMap(_poly(v))


def _sign(v) -> int:
    if v in ("+", "+1", 1):
        return 1
    if v in ("-", "−", "-1", -1):
        return -1
    raise ConfigError(f"sign must be '+' or '-', got {v!r}")


def _sphere_map(spec) -> SphereMap:
    if not isinstance(spec, dict):
        raise ConfigError("sphere map spec must be an object")
    if "constant" in spec:
        x, y, z = (float(c) for c in spec["constant"])
        return SphereMap.constant(Quaternion(0.0, x, y, z))
    if "lambda0" in spec and "lambda1" in spec:
        return from_lambda_pair(
            _rational(spec["lambda0"]),
            _rational(spec["lambda1"]),
            _sign(spec.get("sign", "+")),
        )
    raise ConfigError("sphere map spec needs 'constant' or 'lambda0'/'lambda1'")


def _quaternion(v) -> Quaternion:
    if isinstance(v, (list, tuple)) and len(v) == 4:
        return Quaternion(*(float(c) for c in v))
    raise ConfigError(f"quaternion must be [w, x, y, z], got {v!r}")


def _domain(spec, h_override: Optional[float] = None) -> PlanarDomain:
    if not isinstance(spec, dict):
        raise ConfigError("domain spec must be an object")
    kind = spec.get("kind", "disk")
    center = _cx(spec.get("center", [0.0, 0.0]))
    res = int(spec.get("resolution", 16))
    h = float(h_override if h_override is not None else spec.get("h", 1e-3))
    if kind == "rectangle":
        hw = spec.get("half_widths", [1.0, 1.0])
        return PlanarDomain.rectangle(center, (float(hw[0]), float(hw[1])), res, h)
    if kind == "disk":
        return PlanarDomain.disk(center, float(spec.get("radius", 1.0)), res, h)
    raise ConfigError(f"unknown domain kind {kind!r}")


def _divisor(spec) -> Divisor:
    entries = []
    for e in spec:
        p = e["point"]
        point = INFINITY if p == "inf" else _cx(p)
        entries.append((point, int(e["order"])))
    return Divisor(entries)


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# constructions


@dataclass
class Built:
    kind: str
    domain: PlanarDomain
    surface: SurfaceMap
    factored: Optional[FactoredMap] = None
    minimal: Optional[MinimalPair] = None
    n_map: Optional[SphereMap] = None
    divisor: Optional[Divisor] = None


def _named_custom(name: str, h: float) -> SurfaceMap:
    if name == "inverse_stereo_sphere":
        return inverse_stereo_surface(h=h)
    if name == "plane":
        def plane_jet2(z: complex):
            x, y = coordinate_jets2(z)
            return x + y * const2(I)

        return SurfaceMap.from_jet2(plane_jet2, h=h)
    if name == "conjugate_graph":
        # z + conj(z)^2 j; conformal with constant right normal -i, so its
        # curvature ellipse is a circle everywhere
        def graph_jet2(z: complex):
            x, y = coordinate_jets2(z)
            zbar = x - y * const2(I)
            return x + y * const2(I) + (zbar * zbar) * const2(J)

        return SurfaceMap.from_jet2(graph_jet2, h=h)
    if name == "cylinder":
        # x i + cos y j + sin y k: conformal, |H| = 1/2, K = Kperp = 0, so the
        # circular-ellipse equality fails by 1/4 everywhere
        import math as _math

        def cyl_jet2(z: complex):
            x, y = z.real, z.imag
            c, s = _math.cos(y), _math.sin(y)
            zero = Quaternion()
            return Jet2(
                Quaternion(0, x, c, s), Quaternion(0, 1, 0, 0),
                Quaternion(0, 0, -s, c), zero, zero, Quaternion(0, 0, -c, -s),
            )

        return SurfaceMap.from_jet2(cyl_jet2, h=h)
    raise ConfigError(f"unknown custom map {name!r}")


def build_construction(config: dict, h_override: Optional[float] = None) -> Built:
    dom = _domain(config.get("domain", {}), h_override)
    spec = config.get("construction")
    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigError("config needs a 'construction' object with a 'type'")
    ctype = spec["type"]
    if ctype == "superconformal":
        n_map = _sphere_map(spec.get("N", {"constant": [1.0, 0.0, 0.0]}))
        a = _quaternion(spec["a"]) if "a" in spec else None
        psi = build_psi(n_map, dom, a=a)
        fm = build_superconformal(psi, _rational(spec["lambda0"]), _rational(spec["lambda1"]))
        return Built("superconformal", dom, fm.surface(dom.h), factored=fm, n_map=n_map)
    if ctype == "twistor":
        lams = spec.get("lambda")
        if not isinstance(lams, list) or len(lams) != 4:
            raise ConfigError("twistor construction needs 'lambda': [l0, l1, l2, l3]")
        surf = build_twistor(*(_rational(l) for l in lams), domain=dom, h=dom.h)
        return Built("twistor", dom, surf, n_map=surf.meta["left_normal"])
    if ctype == "minimal":
        n_map = _sphere_map(spec["N"])
        a = _quaternion(spec["a"]) if "a" in spec else None
        pair = build_minimal_pair(n_map, _rational(spec["lambda0"]),
                                  _rational(spec["lambda1"]), dom, a=a)
        return Built("minimal", dom, pair.f_surface(dom.h), minimal=pair, n_map=n_map)
    if ctype == "wft":
        n_map = _sphere_map(spec["N"])
        div = _divisor(spec.get("divisor", []))
        a = _quaternion(spec["a"]) if "a" in spec else None
        fm = superconformal_from_divisor(div, n_map, dom, a=a)
        return Built("wft", dom, fm.surface(dom.h), factored=fm, n_map=n_map,
                     divisor=div)
    if ctype == "custom":
        surf = _named_custom(spec.get("map", ""), dom.h)
        return Built("custom", dom, surf)
    raise ConfigError(f"unknown construction type {ctype!r}")


# ---------------------------------------------------------------------------
# check suites


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_slack: float
    tol: float
    details: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        out = f"check {self.name}: {status} max_slack={self.max_slack:.6e} tol={self.tol:.2e}"
        return out + (f" ({self.details})" if self.details else "")


def _sweep_points(built: Built, cap: int = 900) -> list[complex]:
    pts = built.domain.grid()
    if built.minimal is not None:
        pts = built.minimal.clear_points(pts)
    if built.factored is not None:
        r = 2.0 * built.domain.h
        poles = built.factored.poles()
        pts = [z for z in pts if all(abs(z - p) > r for p in poles)]
    step = max(1, len(pts) // cap)
    return pts[::step]


def _check_conformality(built: Built, opts: dict) -> CheckResult:
    tol = float(opts.get("tol", 1e-8))
    sup = 0.0
    for z in _sweep_points(built):
        res, _ = conformal_residual_at(built.surface, z)
        sup = max(sup, res)
    return CheckResult("conformality", sup <= tol, sup, tol)


def _check_normals(built: Built, opts: dict) -> CheckResult:
    tol = float(opts.get("tol", 1e-4))
    expected = built.n_map if built.kind != "minimal" else built.minimal.n_map
    if expected is None:
        return CheckResult("normals", False, math.inf, tol, "no expected normal")
    fd = built.surface.finite_difference_view(built.domain.h)
    sup = 0.0
    for z in _sweep_points(built, cap=400):
        jet = jet_at(fd, z)
        if jet.N is None:
            continue
        sup = max(sup, (jet.N - expected(z)).norm())
    return CheckResult("normals", sup <= tol, sup, tol)


def _check_curvature(built: Built, opts: dict) -> CheckResult:
    tol = float(opts.get("tol", 1e-4))
    kmin, kmax = math.inf, -math.inf
    sup_h = 0.0
    count = 0
    for z in _sweep_points(built, cap=200):
        c = curvature_at(built.surface, z)
        kmin, kmax = min(kmin, c.K), max(kmax, c.K)
        sup_h = max(sup_h, c.H.norm())
        count += 1
    details = f"K in [{kmin:.4g}, {kmax:.4g}], sup|H|={sup_h:.4g}, {count} pts"
    if built.kind == "minimal":
        return CheckResult("curvature", sup_h <= tol, sup_h, tol, details)
    return CheckResult("curvature", True, 0.0, tol, details)


def _check_wintgen(built: Built, opts: dict) -> CheckResult:
    tol = float(opts.get("tol", 1e-4))
    mode = opts.get("mode", "equality")
    worst_eq = 0.0
    worst_neg = 0.0
    for z in _sweep_points(built, cap=300):
        slack = wintgen_slack_at(built.surface, z)
        worst_eq = max(worst_eq, abs(slack))
        worst_neg = max(worst_neg, -slack)
    if mode == "equality":
        return CheckResult("wintgen", worst_eq <= tol, worst_eq, tol, "equality mode")
    return CheckResult("wintgen", worst_neg <= tol, worst_neg, tol, "inequality mode")


def _check_schwarz(built: Built, opts: dict) -> CheckResult:
    tol = float(opts.get("tol", 1e-9))
    if built.factored is None:
        return CheckResult("schwarz", False, math.inf, tol, "needs a factored map")
    rep = bound_constants(built.factored)
    slack = max(rep.max_violation, rep.derivative_slack)
    details = f"c={rep.c:.4g} C0={rep.C0:.4g} C1={rep.C1:.4g}"
    return CheckResult("schwarz", slack <= tol, slack, tol, details)


def _check_pick(built: Built, opts: dict) -> CheckResult:
    tol = float(opts.get("tol", 1e-9))
    if built.factored is None:
        return CheckResult("pick", False, math.inf, tol, "needs a factored map")
    z1s = opts.get("z1", [[0.0, 0.0]])
    if z1s and not isinstance(z1s[0], list):
        z1s = [z1s]
    worst = -math.inf
    for raw in z1s:
        rep = pick_check(built.factored, _cx(raw))
        worst = max(worst, rep.quotient_violation, rep.derivative_violation,
                    rep.recentered_violation)
    return CheckResult("pick", worst <= tol, worst, tol, f"{len(z1s)} base points")


def _check_minimal(built: Built, opts: dict) -> CheckResult:
    tol = float(opts.get("tol", 1e-6))
    curvature_tol = float(opts.get("curvature_tol", 1e-4))
    if built.minimal is None:
        return CheckResult("minimal-diagnostics", False, math.inf, tol, "needs a minimal pair")
    rep = minimal_diagnostics(built.minimal)
    slack = max(rep.conjugate_residual, rep.null_residual, rep.identity_residual)
    curv = max(rep.sup_mean_curvature_f, rep.sup_mean_curvature_g)
    ok = slack <= tol and curv <= curvature_tol
    details = (f"conj={rep.conjugate_residual:.2e} null={rep.null_residual:.2e} "
               f"|H|={curv:.2e}")
    return CheckResult("minimal-diagnostics", ok, max(slack, curv), tol, details)


def _check_divisor_roundtrip(built: Built, opts: dict) -> CheckResult:
    tol = float(opts.get("tol", 1e-6))
    if built.factored is None or built.divisor is None:
        return CheckResult("divisor-roundtrip", False, math.inf, tol,
                           "needs a divisor construction")
    got = divisor_of_factored(built.factored)
    want = built.divisor
    if len(got) != len(want):
        return CheckResult("divisor-roundtrip", False, math.inf, tol,
                           f"{len(want)} entries in, {len(got)} out")
    worst = 0.0
    for (p, o), (q, m) in zip(want.entries, got.entries):
        if o != m:
            return CheckResult("divisor-roundtrip", False, math.inf, tol,
                               f"order mismatch at {p}")
        worst = max(worst, abs(complex(p) - complex(q)))
    return CheckResult("divisor-roundtrip", worst <= tol, worst, tol)


def _check_degree(built: Built, opts: dict) -> CheckResult:
    if built.n_map is None or built.n_map.kind != "lambda_pair":
        return CheckResult("degree", False, math.inf, 0.0, "needs a lambda-pair normal")
    deg = sphere_degree(built.n_map)
    if "expect" in opts:
        want = int(opts["expect"])
        return CheckResult("degree", deg == want, float(abs(deg - want)), 0.0,
                           f"degree={deg}, expected {want}")
    return CheckResult("degree", True, 0.0, 0.0, f"degree={deg}")


def _check_polefit(built: Built, opts: dict) -> CheckResult:
    tol = float(opts.get("tol", 0.1))
    point = _cx(opts.get("point", [0.0, 0.0]))
    radii = [float(r) for r in opts.get("radii", [0.3, 0.2, 0.15, 0.1, 0.07])]
    fit = vanish_order_fit(built.surface, point, radii)
    if "expect" in opts:
        want = int(opts["expect"])
        slack = abs(fit.slope - want)
        return CheckResult("polefit", slack <= tol, slack, tol,
                           f"order={fit.order} slope={fit.slope:.3f}")
    return CheckResult("polefit", True, abs(fit.slope - fit.order), tol,
                       f"order={fit.order} slope={fit.slope:.3f}")


_CHECKS: dict[str, Callable[[Built, dict], CheckResult]] = {
    "conformality": _check_conformality,
    "normals": _check_normals,
    "curvature": _check_curvature,
    "wintgen": _check_wintgen,
    "schwarz": _check_schwarz,
    "pick": _check_pick,
    "minimal-diagnostics": _check_minimal,
    "divisor-roundtrip": _check_divisor_roundtrip,
    "degree": _check_degree,
    "polefit": _check_polefit,
}


# ---------------------------------------------------------------------------
# outputs


def _fmt(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def export_csv(surface: SurfaceMap, points: list[complex], path: Path) -> None:
    rows = field_rows(surface, points)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _project(q: Quaternion, projection: str, drop_index: int) -> tuple[float, float, float]:
    comps = list(q.components())
    if projection == "drop":
        del comps[drop_index]
        return tuple(comps)  # type: ignore[return-value]
    if projection == "stereographic":
        d = 1.0 - q.w
        if abs(d) < 1e-12:
            raise QuatconfError("stereographic mesh projection hit the pole 1")
        return (q.x / d, q.y / d, q.z / d)
    raise ConfigError(f"unknown projection {projection!r}")


def export_mesh(surface: SurfaceMap, domain: PlanarDomain, path: Path,
                projection: str = "drop", drop_index: int = 0,
                resolution: Optional[int] = None) -> tuple[int, int]:
    """Write an OBJ mesh of the image surface; returns (vertices, triangles).

    Vertices are the projected values on the structured grid in row-major
    order; each grid quad splits into two triangles.
    """
    pts, rows, cols = domain.structured_grid(resolution)
    verts = []
    for z in pts:
        v = surface(z)
        if not isinstance(v, Quaternion):
            raise QuatconfError(f"map has a pole at mesh vertex {z}")
        verts.append(_project(v, projection, drop_index))
    faces = []
    for r in range(rows - 1):
        for c in range(cols - 1):
            v00 = r * cols + c + 1  # OBJ indices are 1-based
            v01 = v00 + 1
            v10 = v00 + cols
            v11 = v10 + 1
            faces.append((v00, v01, v11))
            faces.append((v00, v11, v10))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for v in verts:
            fh.write(f"v {_fmt(v[0])} {_fmt(v[1])} {_fmt(v[2])}\n")
        for f in faces:
            fh.write(f"f {f[0]} {f[1]} {f[2]}\n")
    return len(verts), len(faces)


# ---------------------------------------------------------------------------
# runner


def _thread_cap() -> int:
    raw = os.environ.get("QUATCONF_THREADS", "")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1


def run_config(config: dict, out_dir: Path = Path("."), h_override: Optional[float] = None,
               tol_override: Optional[float] = None) -> tuple[int, str]:
    """Build, check, and export per the configuration; returns (exit, report)."""
    _thread_cap()  # accepted and clamped; sweeps are serial
    built = build_construction(config, h_override)
    lines = [f"construction: {built.kind}  domain: {built.domain.kind} "
             f"res={built.domain.resolution} h={built.domain.h:g}"]
    results: list[CheckResult] = []
    for spec in config.get("checks", []):
        if isinstance(spec, str):
            spec = {"name": spec}
        name = spec.get("name")
        if name not in _CHECKS:
            raise ConfigError(f"unknown check {name!r} (known: {sorted(_CHECKS)})")
        opts = dict(spec)
        if tol_override is not None and "tol" not in opts:
            opts["tol"] = tol_override
        try:
            result = _CHECKS[name](built, opts)
        except QuatconfError as exc:
            result = CheckResult(name, False, math.inf, float(opts.get("tol", 0.0)), str(exc))
        results.append(result)
        lines.append(result.line())

    out_dir.mkdir(parents=True, exist_ok=True)
    for out in config.get("outputs", []):
        fmt = out.get("format")
        path = out_dir / out.get("path", f"output.{fmt}")
        if fmt == "csv":
            export_csv(built.surface, _sweep_points(built, cap=10_000), path)
            lines.append(f"wrote csv {out.get('path', 'output.csv')}")
        elif fmt == "obj":
            nv, nf = export_mesh(built.surface, built.domain, path,
                                 out.get("projection", "drop"),
                                 int(out.get("drop_index", 0)),
                                 out.get("resolution"))
            lines.append(f"wrote obj {out.get('path', 'output.obj')} ({nv} vertices, {nf} triangles)")
        elif fmt == "report":
            pass  # written below, once the report is complete
        else:
            raise ConfigError(f"unknown output format {fmt!r}")

    ok = all(r.passed for r in results)
    lines.append("result: " + ("OK" if ok else "CHECKS FAILED"))
    report = "\n".join(lines) + "\n"
    for out in config.get("outputs", []):
        if out.get("format") == "report":
            with open(out_dir / out.get("path", "report.txt"), "w",
                      encoding="utf-8", newline="\n") as fh:
                fh.write(report)
    return (0 if ok else 1), report


# ---------------------------------------------------------------------------
# entry point


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="path to a JSON run configuration")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--h", type=float, default=None, help="override finite-difference step")
    p.add_argument("--tol", type=float, default=None, help="default tolerance for checks")


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="quatconf",
        description="build quaternionic conformal maps and verify their identities",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("check", "curvature", "mesh", "factor", "degree", "polefit"):
        _add_common(sub.add_parser(name))
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config)
        out_dir = Path(args.out)
        if args.command == "check":
            code, report = run_config(config, out_dir, args.h, args.tol)
            sys.stdout.write(report)
            return code
        built = build_construction(config, args.h)
        if args.command == "curvature":
            out_dir.mkdir(parents=True, exist_ok=True)
            path = out_dir / "fields.csv"
            export_csv(built.surface, _sweep_points(built, cap=10_000), path)
            print(f"wrote {path}")
            return 0
        if args.command == "mesh":
            out_dir.mkdir(parents=True, exist_ok=True)
            path = out_dir / "mesh.obj"
            nv, nf = export_mesh(built.surface, built.domain, path)
            print(f"wrote {path} ({nv} vertices, {nf} triangles)")
            return 0
        if args.command == "factor":
            if built.factored is not None:
                fm = built.factored
                print(f"a = {fm.psi.a.components()}")
                gap = fm.psi.gap
                print(f"gap = {gap:.6f}" if gap is not None else "gap = (forced a)")
                print(f"min|psi| = {fm.psi.min_abs:.6g}")
                div = divisor_of_factored(fm)
                print(f"divisor = {[(str(p), o) for p, o in div.entries]}")
            elif built.minimal is not None:
                pair = built.minimal
                print(f"a = {pair.a.components()}")
                print(f"singular points = {[str(q) for q in pair.singular_points]}")
                rep = branch_zero_report(pair)
                print(f"branch points of psi*l = {[str(b) for b in rep.branch_points]}")
                print(f"zeros of f = {[str(b) for b in rep.zero_points]}")
                print(f"matched = {rep.matched}")
            else:
                print("construction has no factored form")
                return 1
            return 0
        if args.command == "degree":
            n_spec = config.get("N") or config.get("construction", {}).get("N")
            if n_spec is None:
                raise ConfigError("degree needs an 'N' spec in the config")
            print(sphere_degree(_sphere_map(n_spec)))
            return 0
        if args.command == "polefit":
            opts = config.get("polefit", {})
            result = _check_polefit(built, opts)
            print(result.line())
            return 0 if result.passed else 1
        raise ConfigError(f"unhandled command {args.command}")
    except QuatconfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
