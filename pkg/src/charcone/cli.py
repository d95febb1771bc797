"""``charcone`` command-line interface.

Settings come from built-in defaults, then the ``--config`` JSON file, then
command-line flags (later sources win). Every command that writes files puts
a ``manifest.json`` next to them.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from . import evolution as ev
from . import grids as gr
from . import kinematics as kin
from . import massshell as ms
from . import pauli_jordan as pj
from . import seminorms as sn
from . import suites
from . import testfn as tf
from . import transform as tr

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

_GRID = {
    "type": "object",
    "properties": {
        "step": {"type": "number", "exclusiveMinimum": 0},
        "count": {"type": "integer", "minimum": 2},
    },
    "required": ["step", "count"],
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "m": {"type": "number", "exclusiveMinimum": 0},
        "n": {"type": "integer", "minimum": 1, "maximum": 3},
        "grid": _GRID,
        "lc_grid": _GRID,
        "cauchy": {
            "type": "object",
            "properties": {"u0_hat": tf.SPEC_SCHEMA, "u1_hat": tf.SPEC_SCHEMA},
            "required": ["u0_hat", "u1_hat"],
            "additionalProperties": False,
        },
        "characteristic": {
            "type": "object",
            "properties": {"u0_lc_hat": tf.SPEC_SCHEMA},
            "required": ["u0_lc_hat"],
            "additionalProperties": False,
        },
        "function": tf.SPEC_SCHEMA,
        "probe": tf.SPEC_SCHEMA,
        "times": {"type": "array", "items": {"type": "number"}},
        "xplus": {"type": "number"},
        "level": {"type": "integer", "minimum": 1, "maximum": 12},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "ks": {"type": "array", "items": {"type": "integer"}},
    },
    "additionalProperties": False,
}

DEFAULTS = {
    "m": 1.0,
    "n": 1,
    "grid": {"step": 0.0625, "count": 256},
    "lc_grid": {"step": 0.0625, "count": 256},
    "times": [],
    "xplus": 0.0,
}


class UsageError(Exception):
    pass


def _json_path(path) -> str:
    out = "$"
    for p in path:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"config error at $: malformed JSON ({exc.msg}, line {exc.lineno} column {exc.colno})")
    validate_config(doc)
    return doc


def validate_config(doc) -> None:
    try:
        jsonschema.validate(doc, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise UsageError(f"config error at {_json_path(exc.absolute_path)}: {exc.message}") from exc


def resolve(args) -> dict:
    """Defaults, then config file, then flags."""
    cfg = json.loads(json.dumps(DEFAULTS))
    cfg.update(load_config(args.config))
    for key in ("m", "n", "level", "tol", "xplus"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if getattr(args, "times", None) is not None:
        cfg["times"] = parse_times(args.times)
    validate_config(cfg)
    return cfg


def parse_times(text: str) -> list:
    text = text.strip()
    if not text:
        return []
    try:
        return [float(t) for t in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"--times expects a comma-separated list of numbers, got {text!r}") from exc


def params_of(cfg) -> kin.ModelParams:
    return kin.ModelParams(float(cfg["m"]), int(cfg["n"]))


def minkowski_grid(cfg) -> gr.MomentumGrid:
    g = cfg["grid"]
    return gr.MomentumGrid.uniform(params_of(cfg), "minkowski-momentum", g["step"], g["count"])


def lc_grid(cfg) -> gr.MomentumGrid:
    g = cfg["lc_grid"]
    return gr.MomentumGrid.uniform(params_of(cfg), "lc-momentum", g["step"], g["count"])


def _spec(doc, n: int, what: str) -> tf.Spec:
    spec = tf.from_json(doc)
    if spec.dim != n:
        raise UsageError(f"config error at $.{what}: spec dimension {spec.dim} does not match n={n}")
    return spec


def cauchy_specs(cfg) -> ms.CauchyData:
    if "cauchy" not in cfg:
        raise UsageError("config error at $: 'cauchy' is required for this command")
    n = int(cfg["n"])
    c = cfg["cauchy"]
    return ms.CauchyData(_spec(c["u0_hat"], n, "cauchy.u0_hat"), _spec(c["u1_hat"], n, "cauchy.u1_hat"),
                         params_of(cfg))


class Output:
    """Collects written files and writes the manifest."""

    def __init__(self, out_dir: str, command: str, cfg: dict, tolerances: dict | None = None):
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.command = command
        self.cfg = cfg
        self.tolerances = tolerances or {}
        self.files = []
        self.summary = {}

    def path(self, name: str) -> Path:
        self.files.append(name)
        return self.dir / name

    def grid_function(self, stem: str, gf: gr.GridFunction, representation: str, extra: dict | None = None):
        gr.write_gfn(gf, self.path(stem + ".gfn"))
        gr.to_csv(gf, self.path(stem + ".csv"))
        gr.write_sidecar(self.path(stem + ".json"), representation, extra)

    def manifest(self) -> None:
        doc = {
            "tool": "charcone",
            "version": __version__,
            "command": self.command,
            "config": self.cfg,
            "tolerances": self.tolerances,
            "outputs": sorted(self.files),
            "summary": self.summary,
        }
        (self.dir / "manifest.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


# --------------------------------------------------------------------------
# commands

def cmd_evolve(args) -> int:
    cfg = resolve(args)
    params = params_of(cfg)
    data = cauchy_specs(cfg)
    grid = minkowski_grid(cfg)
    pos = tr.target_grid(grid, "euclid_inverse")
    msd = ms.from_cauchy(data, grid)
    times = list(cfg["times"])
    out = Output(args.out, "evolve", cfg)
    for i, t in enumerate(times):
        prof = ev.evolve_profile(msd, t).profile
        out.grid_function(f"profile_{i:03d}", prof, "minkowski-profile", {"time": t, "m": params.m, "n": params.n})
        gr.to_csv(tr.dft(prof, "euclid_inverse", target=pos), out.path(f"slice_{i:03d}.csv"))
    if len(times) >= 5 and np.allclose(np.diff(times), times[1] - times[0], rtol=1e-9, atol=0) \
            and times[1] > times[0]:
        res = ev.kg_residual(msd, pos, times)
        out.summary["kg_residual"] = {"value": res.value, "zero_solution": res.zero_solution}
    else:
        out.summary["kg_residual"] = None
    out.summary["slices"] = len(times)
    out.manifest()
    print(f"wrote {len(times)} slices to {out.dir}")
    return EXIT_OK


def _lc_density(cfg) -> ms.MassShellDensityLC:
    params = params_of(cfg)
    if "characteristic" in cfg:
        spec = _spec(cfg["characteristic"]["u0_lc_hat"], params.n, "characteristic.u0_lc_hat")
        return ev.solve_characteristic(ms.CharacteristicData(spec, params))
    return ms.lc_from_m(ms.from_cauchy(cauchy_specs(cfg)))


def cmd_restrict(args) -> int:
    cfg = resolve(args)
    params = params_of(cfg)
    grid = lc_grid(cfg)
    msd = _lc_density(cfg)
    xplus = float(cfg["xplus"])
    prof = ms.on_grid(ev.tame_profile(msd, xplus).profile, grid)
    out = Output(args.out, "restrict", cfg)
    out.grid_function("tame_profile", prof, "lightcone-profile", {"xplus": xplus, "m": params.m, "n": params.n})
    out.summary["max_abs"] = float(np.max(np.abs(prof.values)))
    out.manifest()
    print(f"tame profile at x+={xplus} written to {out.dir}")
    return EXIT_OK


def cmd_convert(args) -> int:
    if args.direction is None:
        raise UsageError("convert needs --direction {m2lc,lc2m}")
    cfg = resolve(args)
    params = params_of(cfg)
    out = Output(args.out, f"convert {args.direction}", cfg)
    if args.direction == "m2lc":
        data = cauchy_specs(cfg)
        mg, lg = minkowski_grid(cfg), lc_grid(cfg)
        char = tr.convert_m_to_lc(data, lg)
        source = {"cauchy": cfg["cauchy"], "grid": cfg["grid"], "m": params.m, "n": params.n}
        out.grid_function("u0_lc_hat", char.u0_lc_hat, "characteristic", {"source": source})
        gr.to_csv(ms.on_grid(data.u0_hat, mg), out.path("u0_hat.csv"))
        gr.to_csv(ms.on_grid(data.u1_hat, mg), out.path("u1_hat.csv"))
    else:
        char, source = _read_characteristic(args, cfg)
        grid_cfg = dict(cfg)
        if source and "grid" in source and args.config is None:
            grid_cfg["grid"] = source["grid"]
        mg = minkowski_grid(grid_cfg)
        cd = tr.convert_lc_to_m(char, mg)
        gr.to_csv(cd.u0_hat, out.path("u0_hat.csv"))
        gr.to_csv(cd.u1_hat, out.path("u1_hat.csv"))
        out.summary["evaluation"] = "closed form" if source else "cubic interpolation"
    out.manifest()
    print(f"converted ({args.direction}) into {out.dir}")
    return EXIT_OK


def _read_characteristic(args, cfg):
    params = params_of(cfg)
    if args.input is None:
        if "characteristic" not in cfg:
            raise UsageError("lc2m needs --input FILE.gfn or a 'characteristic' section in the config")
        spec = _spec(cfg["characteristic"]["u0_lc_hat"], params.n, "characteristic.u0_lc_hat")
        return ms.CharacteristicData(spec, params), {}
    gf = gr.read_gfn(args.input)
    params = gf.grid.params
    sidecar = Path(args.input).with_suffix(".json")
    source = {}
    if sidecar.exists():
        doc = json.loads(sidecar.read_text())
        source = doc.get("source") or {}
    if "cauchy" in source:
        data = ms.CauchyData(tf.from_json(source["cauchy"]["u0_hat"]), tf.from_json(source["cauchy"]["u1_hat"]),
                             params)
        return tr.convert_m_to_lc(data), source
    return ms.CharacteristicData(gf, params), {}


def cmd_pauli_jordan(args) -> int:
    n = args.n or 1
    m = args.m or 1.0
    params = kin.ModelParams(m, n)
    tol = args.tol or (1e-8 if n == 1 else 1e-6)
    probe = pj.default_probe(n)
    quad = pj.pj_pairing_quadrature(probe, params, level=args.level).value
    closed = pj.pj_pairing_closed_form(probe, params).value
    print(f"quadrature route:  {quad.real:.15g} {quad.imag:+.3g}i")
    print(f"closed-form route: {closed.real:.15g} {closed.imag:+.3g}i")
    delta = abs(quad - closed)
    status = EXIT_OK
    if args.compare:
        ok = delta <= tol
        print(f"{'PASS' if ok else 'FAIL'} |delta| = {delta:.3e} (tol {tol:.1e})")
        status = EXIT_OK if ok else EXIT_FAIL
    if args.out:
        out = Output(args.out, "pauli-jordan", {"n": n, "m": m, "level": args.level}, {"route_delta": tol})
        out.summary.update({"quadrature": [quad.real, quad.imag], "closed_form": [closed.real, closed.imag],
                            "delta": delta})
        out.manifest()
    return status


def _print_checks(checks) -> bool:
    ok = True
    for c in checks:
        print(c.line())
        ok = ok and c.passed
    return ok


def cmd_verify(args) -> int:
    names = suites.SUITES if args.suite == "all" else (args.suite,)
    n = args.n or 1
    m = args.m or 1.0
    checks = []
    for name in names:
        checks.extend(suites.run(name, n, m, args.tol, args.level))
    ok = _print_checks(checks)
    if args.out:
        out = Output(args.out, f"verify {args.suite}", {"n": n, "m": m, "suite": args.suite},
                     {c.name: c.tol for c in checks})
        with open(out.path("checks.csv"), "w") as fh:
            fh.write("check,measured,relation,tolerance,status\n")
            for c in checks:
                fh.write(f"\"{c.name}\",{c.value!r},{c.relation},{c.tol!r},{'PASS' if c.passed else 'FAIL'}\n")
        out.summary["passed"] = ok
        out.manifest()
    return EXIT_OK if ok else EXIT_FAIL


def cmd_seminorm(args) -> int:
    cfg = resolve(args)
    params = params_of(cfg)
    n = params.n
    if "function" in cfg:
        f = _spec(cfg["function"], n, "function")
    else:
        f = tf.Pullback(tf.gaussian(n), "+", params.m)
    g = cfg["lc_grid"]
    axes = [gr.AxisSpec.half_step(g["step"], g["count"])] + [gr.AxisSpec.centered(0.25, 33)] * (n - 1)
    grids = sn.ladder(gr.MomentumGrid(params, tuple(axes), "lc-momentum"))
    ks = cfg.get("ks", list(range(-8, 9)))
    certs = sn.squeezed_certificates(f, grids, ks=ks)
    out = Output(args.out, "seminorm", cfg, {"stable_growth": sn.STABLE_GROWTH, "ladder_ratio": sn.LADDER_RATIO})
    with open(out.path("certificates.csv"), "w") as fh:
        fh.write("label,rung0,rung1,rung2,growth01,growth12,status\n")
        for c in certs:
            vals = ",".join(repr(v) for v in c.values)
            growth = ",".join(repr(v) for v in c.growth)
            fh.write(f"\"{c.label}\",{vals},{growth},{'PASS' if c.passed else 'FAIL'}\n")
    passed = sum(c.passed for c in certs)
    out.summary.update({"certificates": len(certs), "passed": passed})
    out.manifest()
    print(f"{passed}/{len(certs)} seminorm certificates pass up to |alpha| <= 2 on a 3-rung ladder")
    return EXIT_OK if passed == len(certs) else EXIT_FAIL


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="charcone", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"charcone {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_required=True):
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--out", required=out_required, help="output directory")
        p.add_argument("--n", type=int, choices=(1, 2, 3), help="spatial dimension")
        p.add_argument("--m", type=float, help="mass (> 0)")
        p.add_argument("--level", type=int, help="quadrature level (1..12)")
        p.add_argument("--tol", type=float, help="tolerance override")
        p.add_argument("--threads", type=int, help="quadrature worker threads (fallback: CHARCONE_THREADS)")

    p = sub.add_parser("evolve", help="evolve Cauchy data and write profiles and slices")
    common(p)
    p.add_argument("--times", help="comma-separated x^0 values")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("restrict", help="tame profile on {x^+ = const}")
    common(p)
    p.add_argument("--xplus", type=float, help="light-cone time")
    p.set_defaults(func=cmd_restrict)

    p = sub.add_parser("convert", help="convert between Cauchy and characteristic data")
    common(p)
    p.add_argument("--direction", choices=("m2lc", "lc2m"))
    p.add_argument("--input", help="GFN1 characteristic data for lc2m")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("pauli-jordan", help="Pauli-Jordan restriction by two routes")
    common(p, out_required=False)
    p.add_argument("--compare", action="store_true", help="check the routes agree")
    p.set_defaults(func=cmd_pauli_jordan)

    p = sub.add_parser("verify", help="run invariant suites")
    common(p, out_required=False)
    p.add_argument("--suite", default="all", choices=suites.SUITES + ("all",))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("seminorm", help="squeezed seminorm certificate table")
    common(p)
    p.set_defaults(func=cmd_seminorm)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.threads is not None:
        if args.threads < 1:
            print("error: --threads must be >= 1", file=sys.stderr)
            return EXIT_USAGE
        os.environ["CHARCONE_THREADS"] = str(args.threads)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except gr.GFNFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
