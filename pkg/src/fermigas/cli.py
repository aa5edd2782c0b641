"""Command-line front end: ``fermigas <subcommand> ...``.

Every artifact starts with a provenance header carrying the package version,
a hash of the effective configuration, the seed and the emitted quantities.
Exit codes: 1 invalid configuration, 2 violated precondition, 3 cap or
budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import scipy.fft

from . import __version__
from .errors import FermiGasError, InvalidConfig, PreconditionError

THREADS_ENV = "FERMIGAS_THREADS"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(InvalidConfig.exit_code)


def parse_sweep(text: str, integer: bool = False) -> list:
    """``start:end:count`` (geometric spacing) or a comma-separated list."""
    try:
        if ":" in text:
            start, end, count = text.split(":")
            start, end, count = float(start), float(end), int(count)
            if start <= 0 or end <= 0 or count < 1:
                raise ValueError
            vals = list(np.geomspace(start, end, count)) if count > 1 else [start]
        else:
            vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InvalidConfig(f"bad sweep {text!r}; use start:end:count or a comma list") from None
    if integer:
        out = []
        for v in vals:
            iv = int(round(v))
            if iv not in out:
                out.append(iv)
        return out
    return [float(v) for v in vals]


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x)) if not math.isfinite(x) else f"{float(x):.17g}"
    return str(x)


class Artifact:
    """Collects the provenance header and writes CSV or JSON output."""

    def __init__(self, args, quantities: list[str]):
        cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "timestamp", "threads")}
        blob = json.dumps(cfg, sort_keys=True, default=str).encode()
        self.header = {
            "package": f"fermigas {__version__}",
            "config_sha256": hashlib.sha256(blob).hexdigest()[:16],
            "seed": getattr(args, "seed", 0),
            "quantities": quantities,
        }
        if getattr(args, "timestamp", False):
            self.header["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S")
        self.out = getattr(args, "out", None)
        self.fmt = getattr(args, "format", "csv")

    def _sink(self, text: str) -> None:
        if self.out:
            Path(self.out).parent.mkdir(parents=True, exist_ok=True)
            Path(self.out).write_text(text)
        else:
            sys.stdout.write(text)

    def rows(self, rows: list[dict]) -> None:
        if self.fmt == "json":
            self.document({"rows": rows})
            return
        buf = io.StringIO()
        for k, v in self.header.items():
            buf.write(f"# {k}: {', '.join(v) if isinstance(v, list) else v}\n")
        if rows:
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(list(rows[0]))
            for r in rows:
                w.writerow([_fmt(v) for v in r.values()])
        self._sink(buf.getvalue())

    def document(self, payload: dict) -> None:
        doc = {"provenance": self.header, **payload}
        self._sink(json.dumps(doc, indent=2, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    return str(o)


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InvalidConfig(f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"config file {path} is not valid JSON: {exc}") from None


# --- subcommands --------------------------------------------------------------------------

def cmd_scattering(args) -> int:
    from .scattering import (RadialPotential, calibrate_soft_core, definition_length, derived_lengths,
                             solve_p_wave)
    if args.calibrate is not None:
        V0 = calibrate_soft_core(args.calibrate, args.radius_factor, d=args.dim)
        Artifact(args, ["V0 calibrated to target scattering length"]).document(
            {"V0": V0, "target": args.calibrate, "radius": args.radius_factor * args.calibrate})
        return 0
    if args.config:
        v = RadialPotential.from_config(_load_json(args.config), base_dir=Path(args.config).parent)
    else:
        if args.R0 is None:
            raise InvalidConfig("give --config or --R0")
        v = (RadialPotential.hardcore(args.R0, args.dim) if args.kind == "hardcore"
             else RadialPotential.softcore(args.R0, args.V0, args.dim))
    sol = solve_p_wave(v, r_max=args.r_max if args.r_max else 20 * v.R0)
    dl = derived_lengths(sol)
    summary = {"a": sol.a, "a0": dl.a0, "Reff": dl.Reff, "a0_inv": dl.a0_inv,
               "definition_length": definition_length(sol), "residual": sol.residual,
               "potential": v.to_config()}
    if args.csv:
        sol.to_csv(args.csv)
    Artifact(args, ["scattering length a", "a0", "effective range"]).document(summary)
    return 0


def _poly_spec(args):
    from .fermi_surface import PolyhedronSpec
    if args.spec:
        cfg = _load_json(args.spec)
        try:
            return PolyhedronSpec(**cfg)
        except TypeError as exc:
            raise InvalidConfig(f"bad polyhedron spec: {exc}") from None
    return PolyhedronSpec(d=args.dim, s=args.s, Q=args.Q, mode=args.mode, rng_seed=args.seed)


def cmd_polyhedron(args) -> int:
    from .fermi_surface import FermiPolyhedron, build_polyhedron
    if args.import_path:
        poly = FermiPolyhedron.from_json(Path(args.import_path).read_text())
    else:
        poly = build_polyhedron(_poly_spec(args))
    text = poly.to_json()
    if args.out:
        Path(args.out).write_text(text)
    summary = {"s": poly.s, "primes": list(poly.primes), "sigma": poly.sigma_string(40),
               "volume": float(poly.volume), "faces": len(poly.faces), "constants": poly.constants}
    args.out = None
    Artifact(args, ["Fermi polyhedron corners", "normalization sigma"]).document(summary)
    return 0


def _region(args):
    from .fermi_surface import FermiPolyhedron
    if args.region == "ball":
        return "ball"
    return FermiPolyhedron.from_json(Path(args.region).read_text())


def cmd_momenta(args) -> int:
    from .fermi_surface import enumerate_momenta, kinetic_sums
    ms = enumerate_momenta(_region(args), Fraction(args.ratio), L=args.L, d=args.dim)
    ks = kinetic_sums(ms)
    rows = [{"k1": int(r[0]), **({"k2": int(r[1])} if ms.d > 1 else {}),
             **({"k3": int(r[2])} if ms.d > 2 else {})} for r in ms.points]
    if args.summary:
        Artifact(args, ["lattice momenta", "kinetic sums"]).document(
            {"N": ms.N, "S2": ks.S2, "S4": ks.S4, "S4_1": ks.S4_1, "dev2": ks.dev2, "dev4": ks.dev4,
             "dev4_1": ks.dev4_1})
    else:
        Artifact(args, ["lattice momenta (integer units 2 pi / L)"]).rows(rows)
    return 0


def cmd_lebesgue(args) -> int:
    from .lebesgue import one_d_power_kernel_l1, scaling_study
    if args.power is not None:
        rows = []
        for M in parse_sweep(args.M, integer=True):
            val = one_d_power_kernel_l1(M, args.power)
            rows.append({"M": M, "p": args.power, "value": val,
                         "ratio": val / (M ** max(args.power, 1) * math.log(M)) if M > 1 else float("nan")})
        Artifact(args, ["one-dimensional power kernel integrals"]).rows(rows)
        return 0
    weights = tuple(int(w) for w in args.weights.split(",")) if args.weights else ()
    out = scaling_study(_region(args), parse_sweep(args.R, integer=True), weights, d=args.dim)
    Artifact(args, ["Lebesgue constants", f"log-log slope {out['slope']:.6g}"]).rows(out["rows"])
    return 0


def cmd_densities(args) -> int:
    from .fermi_surface import enumerate_momenta
    from .slater import OneBodyKernel, rho2_small_separation_fit, rho3_quartic_bound_check
    ms = enumerate_momenta(_region(args), Fraction(args.ratio), L=args.L, d=3)
    K = OneBodyKernel(ms)
    out = {"N": ms.N, "fit": rho2_small_separation_fit(K)}
    if args.rho3:
        out["rho3"] = rho3_quartic_bound_check(K, args.rho3, seed=args.seed)
    Artifact(args, ["two-point small-separation coefficients c2, c4"]).document(out)
    return 0


def cmd_ggr(args) -> int:
    from .fermi_surface import MomentumSet
    from .ggr import (GProfile, catalog_json, direct_oracle, normalization_series, rho_jas_series)
    from .slater import DiscreteTorus, OneBodyKernel
    if args.catalog:
        sys.stdout.write(catalog_json() + "\n")
        return 0
    if not args.verify:
        raise InvalidConfig("ggr needs --verify or --catalog")
    d, n, M = args.dim, args.n, args.grid
    L = 1.0
    # n lowest momenta in a symmetric-as-possible order: 0, 1, -1, 2, -2, ...
    pts = []
    j = 0
    while len(pts) < n:
        for cand in ([0] if j == 0 else [j, -j]):
            if len(pts) < n:
                pts.append([cand] + [0] * (d - 1))
        j += 1
    ms = MomentumSet.from_points(pts, L=L)
    torus = DiscreteTorus(d, L, M)
    torus.check(ms)
    K = OneBodyKernel(ms)
    width = args.width * L
    gp = GProfile(torus, g=lambda r: -args.depth * np.exp(-(r / width) ** 2))
    rng = np.random.default_rng(args.seed)
    series = normalization_series(K, gp)
    oracle = direct_oracle(K, gp)
    res = {"normalization": abs(series - oracle["norm"])}
    worst = 0.0
    for _ in range(args.pairs):
        ext = rng.uniform(0, L, (2, d))
        worst = max(worst, abs(rho_jas_series(K, gp, ext)["rho_jas"] - direct_oracle(K, gp, 2, ext)["rho_jas"]))
    res["rho2_jas"] = worst
    ok = all(v <= args.tol for v in res.values())
    for k, v in res.items():
        print(f"{k} residual {v:.3e}")
    print("identity " + ("holds" if ok else "VIOLATED") + f" (tol {args.tol:g})")
    return 0 if ok else PreconditionError.exit_code


def cmd_energy(args) -> int:
    from .energy import ding_zhang_curve, interaction_routes, optimize_exponents
    if args.budget:
        r = optimize_exponents(args.dim)
        Artifact(args, ["optimal error exponents"]).document(r)
        return 0
    if args.routes is not None:
        Artifact(args, ["leading interaction coefficient, two routes"]).document(interaction_routes(args.routes))
        return 0
    if args.curve not in ("hc", "sc"):
        raise InvalidConfig("--curve must be hc (hard core) or sc (with --reff)")
    reff = 5 / 18 if args.curve == "hc" else args.reff
    if reff is None or reff <= 0:
        raise InvalidConfig("--curve sc needs a positive --reff (in units of a)")
    rows = [{"kFa": r["kFa"], "e_total": r["value"], "e_k2": r["free"], "e_k3": r["e2"], "e_k5": r["e3"],
             "e_k6": r["e4"]} for r in ding_zhang_curve(parse_sweep(args.kfa), reff)]
    Artifact(args, ["energy per particle over kF^2 (low-density expansion)"]).rows(rows)
    return 0


def cmd_compare(args) -> int:
    from .energy import closed_form_bound, ding_zhang_curve
    qmc = []
    if args.qmc:
        try:
            with open(args.qmc) as fh:
                for row in csv.DictReader(line for line in fh if not line.startswith("#")):
                    qmc.append((float(row["kFa"]), float(row["e"])))
        except (KeyError, ValueError, FileNotFoundError) as exc:
            raise InvalidConfig(f"QMC overlay must be a CSV with columns kFa,e: {exc}") from None
    rows = []
    for r in ding_zhang_curve(parse_sweep(args.kfa), 5 / 18):
        kFa = r["kFa"]
        rho = kFa ** 3 / (6 * math.pi ** 2)
        cf = closed_form_bound(rho, 1.0, 1.0)
        kF2rho = kFa ** 2 * rho
        row = {"kFa": kFa, "e_expansion": r["value"], "e_bound": cf["total"] / kF2rho}
        if qmc:
            nearest = min(qmc, key=lambda t: abs(t[0] - kFa))
            row["e_qmc"] = nearest[1]
        rows.append(row)
    Artifact(args, ["low-density expansion vs upper bound (hard core, a = 1)"]).rows(rows)
    return 0


# --- parser --------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fermigas", description="Dilute spin-polarized Fermi gas toolkit.")
    p.add_argument("--version", action="version", version=f"fermigas {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=int(os.environ.get(THREADS_ENV, os.cpu_count() or 1)),
                        help=f"FFT worker threads (default ${THREADS_ENV} or the CPU count)")
    common.add_argument("--timestamp", action="store_true", help="add a timestamp to headers")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("scattering", parents=[common], help="solve the p-wave scattering problem")
    s.add_argument("--config")
    s.add_argument("--kind", choices=("hardcore", "softcore"), default="hardcore")
    s.add_argument("--R0", type=float)
    s.add_argument("--V0", type=float, default=0.0)
    s.add_argument("--dim", type=int, default=3, choices=(1, 2, 3))
    s.add_argument("--r-max", type=float)
    s.add_argument("--csv", help="write r, f0, f0_prime columns here")
    s.add_argument("--calibrate", type=float, help="target scattering length for a soft core")
    s.add_argument("--radius-factor", type=float, default=2.0)
    s.set_defaults(func=cmd_scattering)

    s = sub.add_parser("polyhedron", parents=[common], help="build or import a Fermi polyhedron")
    s.add_argument("--spec")
    s.add_argument("--import", dest="import_path")
    s.add_argument("--dim", type=int, default=3, choices=(2, 3))
    s.add_argument("--s", type=int, default=48)
    s.add_argument("--Q", type=int, default=10 ** 6)
    s.add_argument("--mode", choices=("rational", "simple"), default="rational")
    s.set_defaults(func=cmd_polyhedron)

    for name, func, hlp in (("momenta", cmd_momenta, "enumerate lattice momenta"),
                            ("lebesgue", cmd_lebesgue, "Lebesgue constants"),
                            ("densities", cmd_densities, "Slater reduced densities")):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("--region", default="ball", help="'ball' or a polyhedron JSON file")
        s.add_argument("--dim", type=int, default=3)
        s.add_argument("--L", type=float, default=2 * math.pi)
        s.set_defaults(func=func)
        if name == "momenta":
            s.add_argument("--ratio", required=True, help="kF L / (2 pi), exact fraction allowed")
            s.add_argument("--summary", action="store_true")
        elif name == "lebesgue":
            s.add_argument("--R", default="4,8,16")
            s.add_argument("--weights", default="")
            s.add_argument("--power", type=int, choices=(0, 1, 2))
            s.add_argument("--M", default="8:4096:10")
        else:
            s.add_argument("--ratio", default="12")
            s.add_argument("--rho3", type=int, default=0, help="number of triples for the quartic bound")

    s = sub.add_parser("ggr", parents=[common], help="cluster-expansion identities")
    s.add_argument("--verify", action="store_true")
    s.add_argument("--catalog", action="store_true")
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--grid", type=int, default=16)
    s.add_argument("--dim", type=int, default=1)
    s.add_argument("--pairs", type=int, default=5)
    s.add_argument("--depth", type=float, default=0.9)
    s.add_argument("--width", type=float, default=0.12)
    s.add_argument("--tol", type=float, default=1e-10)
    s.set_defaults(func=cmd_ggr)

    s = sub.add_parser("energy", parents=[common], help="energy curves, routes and budgets")
    s.add_argument("--curve", default="hc")
    s.add_argument("--reff", type=float)
    s.add_argument("--kfa", default="0.01:0.5:40")
    s.add_argument("--budget", action="store_true")
    s.add_argument("--routes", type=float, help="kFa for the two-route interaction check")
    s.add_argument("--dim", type=int, default=3, choices=(1, 2, 3))
    s.set_defaults(func=cmd_energy)

    s = sub.add_parser("compare", parents=[common], help="expansion vs bound, optional QMC overlay")
    s.add_argument("--kfa", default="0.01:0.5:40")
    s.add_argument("--qmc")
    s.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with scipy.fft.set_workers(max(1, args.threads)):
            return int(args.func(args) or 0)
    except FermiGasError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
