"""Command-line front end: ``tvlab <command> [--config PATH] [flags]``.

Every command writes ``<command>.json`` (machine report, byte-stable for a
fixed config, seed and version), ``<command>.txt`` (aligned tables) and
``<command>.timings.json`` (wall times, kept out of the report so that
reports stay reproducible) into the output directory.

Exit codes: 0 ok, 2 assumption failed, 3 sampling failure, 4 parameter
error, 5 conditioning failure.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from tvlab import __version__
from tvlab.ball_space import ParameterError, TruncatedSpace, monomial_norm2
from tvlab.cache import SampleCache, sample_key
from tvlab.kernels import BACKEND
from tvlab.linalg import ConditioningError, max_principal_angle
from tvlab.polyring import Ideal, graded_monomials

EXIT_OK = 0
EXIT_ASSUMPTION = 2
EXIT_SAMPLING = 3
EXIT_PARAMETER = 4
EXIT_CONDITIONING = 5

COMMANDS = ("check-assumption", "norms", "spectra", "kernel", "extend", "proxy", "report-merge")


# --------------------------------------------------------------------------
# configuration


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.replace(";", ",").split(",") if t.strip()]


@dataclass
class ExperimentConfig:
    """All knobs of one experiment.  ``ideal`` holds generator strings."""

    m: int = 3
    s: float = 0.0
    d: int = 8
    ideal: list[str] = field(default_factory=list)
    radius: float = 1.0
    n: int = 16000
    seed: int = 0
    method: str = "slice"
    tol_solve: float = 1e-10
    tol_rank: float = 1e-10
    tol_kernel: float = 1e-6
    band: list[int] | None = None  # spectra band [d0, d1]
    decay_degrees: list[int] | None = None
    trend_degrees: list[int] | None = None
    ps: list[float] = field(default_factory=lambda: [1.0, 2.0, 3.0, 4.0])
    extend_degrees: list[int] | None = None
    jet_var: int | None = None  # 1-based; enables the jet demo in ``kernel``
    jet_order: int = 2
    proxy_range: list[int] = field(default_factory=lambda: [0, 6])
    mc_samples: int = 0
    mc_degree: int = 3
    boundary_samples: int = 64
    out: str = "out"

    # fields that do not change any number in a report
    _NON_SEMANTIC = ("out",)

    @classmethod
    def from_file(cls, path) -> ExperimentConfig:
        cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
        with open(path) as fh:
            cp.read_file(fh)
        return cls.from_parser(cp)

    @classmethod
    def from_parser(cls, cp: configparser.ConfigParser) -> ExperimentConfig:
        c = cls()

        def get(sec, key, conv, attr=None):
            if cp.has_option(sec, key):
                setattr(c, attr or key, conv(cp.get(sec, key)))

        get("experiment", "m", int)
        get("experiment", "s", float)
        get("experiment", "weight", float, "s")
        get("experiment", "d", int)
        get("experiment", "degree", int, "d")
        get("experiment", "ideal", lambda t: [g.strip() for g in t.split(";") if g.strip()])
        get("experiment", "radius", float)
        get("experiment", "samples", int, "n")
        get("experiment", "seed", int)
        get("experiment", "method", str.strip)
        get("experiment", "out", str.strip)
        get("tolerances", "solve", float, "tol_solve")
        get("tolerances", "rank", float, "tol_rank")
        get("tolerances", "kernel", float, "tol_kernel")
        get("bands", "spectra", _ints, "band")
        get("bands", "decay", _ints, "decay_degrees")
        get("spectra", "trend_degrees", _ints)
        get("spectra", "ps", lambda t: [float(x) for x in t.split(",")])
        get("extend", "degrees", _ints, "extend_degrees")
        get("kernel", "jet_var", int)
        get("kernel", "jet_order", int)
        get("proxy", "range", _ints, "proxy_range")
        get("norms", "mc_samples", int)
        get("norms", "mc_degree", int)
        get("assumption", "boundary_samples", int)
        return c

    def override(self, args) -> ExperimentConfig:
        for flag, attr in (("seed", "seed"), ("degree", "d"), ("weight", "s"), ("samples", "n"), ("out", "out")):
            v = getattr(args, flag, None)
            if v is not None:
                setattr(self, attr, v)
        if getattr(args, "ideal", None):
            self.ideal = list(args.ideal)
        return self

    def ideal_obj(self) -> Ideal | None:
        if not self.ideal:
            return None
        I = Ideal.parse(self.ideal, self.m)
        if I.m != self.m:
            raise ParameterError(f"ideal lives in C^{I.m} but m = {self.m}")
        return I

    def validate(self) -> None:
        for name in ("tol_solve", "tol_rank", "tol_kernel"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"tolerance {name} must be positive")
        if self.m < 1 or self.d < 0 or self.n < 0:
            raise ParameterError("m, d and samples must be non-negative (m >= 1)")
        if self.s <= -1:
            raise ParameterError("weight s must exceed -1")
        if not self.radius > 0:
            raise ParameterError("radius must be positive")
        I = self.ideal_obj()
        if I is not None and self.d < max(I.degrees):
            raise ParameterError(f"d = {self.d} below the generator degree {max(I.degrees)}")

    def echo(self) -> dict:
        """Every field that can change a reported number (the output path cannot)."""
        return {k: v for k, v in asdict(self).items() if k not in self._NON_SEMANTIC}

    def hash(self) -> str:
        return hashlib.sha256(json.dumps(self.echo(), sort_keys=True).encode()).hexdigest()[:16]


# --------------------------------------------------------------------------
# report helpers


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, complex):
        return [_clean(obj.real), _clean(obj.imag)]
    return obj


def dumps(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=1) + "\n"


def format_table(headers, rows) -> str:
    def fmt(x):
        if isinstance(x, float):
            return f"{x:.6g}"
        return str(x)

    cells = [[fmt(h) for h in headers]] + [[fmt(x) for x in r] for r in rows]
    widths = [max(len(r[c]) for r in cells) for c in range(len(headers))]
    lines = ["  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


class Run:
    """Collects results, side files and timings for one command."""

    def __init__(self, command: str, cfg: ExperimentConfig, cache: SampleCache):
        self.command = command
        self.cfg = cfg
        self.cache = cache
        self.results: dict = {}
        self.files: dict[str, str] = {}
        self.text: list[str] = []
        self.cache_keys: list[str] = []
        self.timings: dict[str, float] = {}
        self._t0 = time.perf_counter()

    def timed(self, label, fn, *a, **kw):
        t = time.perf_counter()
        out = fn(*a, **kw)
        self.timings[label] = self.timings.get(label, 0.0) + time.perf_counter() - t
        return out

    def samples(self, I: Ideal, s: float, jobs: int):
        from tvlab.variety import VarietyConfig, sample_variety

        cfg = self.cfg
        key = sample_key(I.key(), cfg.radius, s, cfg.n, cfg.seed, cfg.method)
        self.cache_keys.append(key)
        vc = VarietyConfig(I, cfg.radius, cfg.seed)
        compute = lambda: sample_variety(vc, cfg.n, s, method=cfg.method, tol=cfg.tol_solve, jobs=jobs)  # noqa: E731
        return key, self.timed("sampling", self.cache.get_or_compute, key, compute)

    def report(self, status: str, exit_code: int, error: str | None = None) -> dict:
        rep = {
            "command": self.command,
            "version": __version__,
            "backend": BACKEND,
            "config": self.cfg.echo(),
            "config_hash": self.cfg.hash(),
            "cache_keys": sorted(set(self.cache_keys)),
            "status": status,
            "exit_code": exit_code,
            "results": self.results,
        }
        if error is not None:
            rep["error"] = error
        return rep


# --------------------------------------------------------------------------
# commands


def cmd_check_assumption(run: Run, jobs: int) -> int:
    from tvlab.variety import VarietyConfig, check_assumption

    cfg = run.cfg
    I = _require_ideal(cfg)
    rep = run.timed(
        "check", check_assumption, VarietyConfig(I, cfg.radius, cfg.seed), cfg.boundary_samples, cfg.tol_solve
    )
    run.results["assumption"] = rep.to_dict()
    run.results["ideal"] = str(I)
    run.text.append(
        format_table(
            ["verdict", "codim_ok", "min_jac_sv", "margin", "n_boundary"],
            [[rep.verdict, rep.codim_ok, rep.min_jacobian_sv, rep.transversality_margin, rep.n_boundary]],
        )
    )
    for r in rep.reasons:
        run.text.append(f"reason: {r}\n")
    if rep.verdict == "empty":
        return EXIT_SAMPLING
    return EXIT_OK if rep.passed else EXIT_ASSUMPTION


def cmd_norms(run: Run, jobs: int) -> int:
    from tvlab.variety import uniform_complex_ball

    cfg = run.cfg
    rows = []
    for a in graded_monomials(cfg.m, cfg.d):
        rows.append({"alpha": list(a), "norm2": monomial_norm2(a, cfg.m, cfg.s)})
    run.results["closed_form"] = {"m": cfg.m, "s": cfg.s, "d": cfg.d, "norms": rows}
    table = [[str(r["alpha"]), r["norm2"]] for r in rows]
    head = ["alpha", "norm2"]
    if cfg.mc_samples > 0:
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0x11]))
        z = uniform_complex_ball(rng, cfg.m, cfg.mc_samples, 1.0)
        w = (1 - np.sum(np.abs(z) ** 2, axis=1)) ** cfg.s
        checks = []
        for r in rows:
            a = tuple(r["alpha"])
            if sum(a) > cfg.mc_degree:
                continue
            v = np.prod(np.abs(z) ** (2 * np.array(a)), axis=1)
            est = float(np.sum(v * w) / np.sum(w))
            checks.append({"alpha": list(a), "closed_form": r["norm2"], "monte_carlo": est,
                           "rel_error": abs(est / r["norm2"] - 1)})
        run.results["monte_carlo"] = {"samples": cfg.mc_samples, "max_degree": cfg.mc_degree, "checks": checks,
                                      "max_rel_error": max((c["rel_error"] for c in checks), default=0.0)}
        head = ["alpha", "norm2", "monte_carlo", "rel_error"]
        mc = {tuple(c["alpha"]): c for c in checks}
        table = [[str(r["alpha"]), r["norm2"], mc[tuple(r["alpha"])]["monte_carlo"], mc[tuple(r["alpha"])]["rel_error"]]
                 for r in rows if tuple(r["alpha"]) in mc]
    run.text.append(format_table(head, table))
    return EXIT_OK


def _module_for(cfg: ExperimentConfig, d: int):
    from tvlab.modules import full_module, quotient_module

    space = TruncatedSpace.make(cfg.m, d, cfg.s)
    I = cfg.ideal_obj()
    return full_module(space) if I is None else quotient_module(I, space, cfg.tol_rank)


def cmd_spectra(run: Run, jobs: int, gnuplot: bool = False) -> int:
    from tvlab.modules import CSV_HEADER, all_spectra, band_decay, schatten_tail

    cfg = run.cfg
    d = cfg.d
    band = tuple(cfg.band) if cfg.band else (0, d - 2)
    if len(band) != 2 or band[1] > d - 2 or band[0] < 0 or band[0] > band[1]:
        raise ParameterError(f"band {list(band)} must lie inside [0, d-2] = [0, {d - 2}]")
    module = run.timed("module", _module_for, cfg, d)
    reps = run.timed("spectra", all_spectra, module, band, tuple(cfg.ps), jobs)
    by_pair = {r.pair: r for r in reps}
    sym = 0.0
    for (i, j), r in by_pair.items():
        o = by_pair[(j, i)].singular_values
        n = min(o.size, r.singular_values.size)
        sym = max(sym, float(np.max(np.abs(o[:n] - r.singular_values[:n]), initial=0.0)))
    lo_dec = [x for x in (cfg.decay_degrees or [min(5, d - 2), d - 2]) if x <= d - 2]
    degrees = list(range(lo_dec[0], lo_dec[-1] + 1)) if len(lo_dec) == 2 else lo_dec
    decays = []
    if len(degrees) >= 2:
        for i in range(1, cfg.m + 1):
            for j in range(1, cfg.m + 1):
                decays.append(run.timed("decay", band_decay, module, i, j, degrees).to_dict())
    run.results.update(
        {
            "module": {"kind": module.kind, "tag": module.tag, "dim": module.dim, "d": d,
                       "graded_dims": module.graded_dims() if module.graded else None,
                       "warnings": module.warnings},
            "band": list(band),
            "spectra": [r.summary() for r in reps],
            "adjoint_symmetry_defect": sym,
            "decay": {"degrees": degrees, "abscissa": "n + m + s + 1", "fits": decays},
        }
    )
    if cfg.trend_degrees:
        trend_reps: dict = {}
        for dd in cfg.trend_degrees:
            mod = run.timed("module", _module_for, cfg, dd)
            tb = (band[0], dd - 2)
            trend_reps[dd] = run.timed("trend", all_spectra, mod, tb, tuple(cfg.ps), jobs)
        tails = []
        for idx, (i, j) in enumerate(r.pair for r in reps):
            series = [trend_reps[dd][idx] for dd in cfg.trend_degrees]
            for p in cfg.ps:
                tr = schatten_tail(series, p).to_dict()
                tr["pair"] = [i, j]
                tr["bands"] = [[band[0], dd - 2] for dd in cfg.trend_degrees]
                tails.append(tr)
        run.results["schatten_trend"] = tails
    lines = [CSV_HEADER]
    for r in reps:
        lines.extend(r.csv_rows())
    run.files["spectra.csv"] = "\n".join(lines) + "\n"
    if decays:
        dl = ["i,j,n,sigma_max"]
        for f in decays:
            for n, s in zip(f["degrees"], f["sigma_max"]):
                dl.append(f"{f['pair'][0]},{f['pair'][1]},{n},{s:.17g}")
        run.files["decay.csv"] = "\n".join(dl) + "\n"
    if gnuplot:
        run.files["spectra.gp"] = _gnuplot_script(cfg.m, bool(decays))
    run.text.append(f"module {module.kind} ({module.tag}) dim {module.dim}, band {list(band)}\n")
    run.text.append(
        format_table(["i", "j", "count", "sigma_max"] + [f"S_{p:g}" for p in cfg.ps],
                     [[r.pair[0], r.pair[1], r.singular_values.size, r.top] + [r.schatten_sums[p] for p in cfg.ps]
                      for r in reps])
    )
    if decays:
        run.text.append(format_table(["i", "j", "slope", "raw_slope"],
                                     [[f["pair"][0], f["pair"][1], f["slope"], f["raw_slope"]] for f in decays]))
    return EXIT_OK


def _gnuplot_script(m: int, with_decay: bool) -> str:
    out = [
        "set datafile separator ','",
        "set logscale y",
        "set xlabel 'k'",
        "set ylabel 'sigma_k'",
        "set terminal pngcairo size 900,600",
        "set output 'spectra.png'",
    ]
    plots = [f"'spectra.csv' using ($3=={i} && $4=={j} ? $5 : 1/0):6 with linespoints title '[S_{i},S_{j}*]'"
             for i in range(1, m + 1) for j in range(1, m + 1)]
    out.append("plot " + ", \\\n     ".join(plots))
    if with_decay:
        out += ["set output 'decay.png'", "set logscale xy", "set xlabel 'n'", "set ylabel 'sigma_max on degree n'"]
        plots = [f"'decay.csv' using ($1=={i} && $2=={j} ? $3 : 1/0):4 with linespoints title '({i},{j})'"
                 for i in range(1, m + 1) for j in range(1, m + 1)]
        out.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(out) + "\n"


def cmd_kernel(run: Run, jobs: int) -> int:
    from tvlab.modules import ideal_truncation
    from tvlab.restrict_extend import jet_kernel, kernel_of_R, restriction_matrix

    cfg = run.cfg
    I = _require_ideal(cfg)
    if cfg.jet_var is not None:
        space = TruncatedSpace.make(cfg.m, cfg.d, cfg.s)
        K = run.timed("jet", jet_kernel, space, cfg.jet_var - 1, cfg.jet_order, cfg.tol_kernel)
        J = ideal_truncation(I, space, cfg.tol_rank)
        ang = max_principal_angle(K.frame, J.frame)
        match = K.dim == J.dim and ang <= 1e-8
        run.results["jet"] = {"var": cfg.jet_var, "order": cfg.jet_order, "d": cfg.d, "kernel_dim": K.dim,
                              "ideal_dim": J.dim, "dimension_gap": K.dim - J.dim, "max_angle": ang,
                              "match": bool(match), "statement": f"kernel = multiples of {I}" if match else None,
                              "tolerance": cfg.tol_kernel}
        run.text.append(format_table(["d", "dim ker", "dim ideal", "max_angle", "match"],
                                     [[cfg.d, K.dim, J.dim, ang, match]]))
        return EXIT_OK
    key, samples = run.samples(I, float(I.M), jobs)
    space = TruncatedSpace.make(cfg.m, cfg.d, cfg.s)
    Rm = run.timed("restriction", restriction_matrix, space, samples, cfg.tol_rank)
    K = kernel_of_R(Rm, cfg.tol_kernel)
    J = ideal_truncation(I, space, cfg.tol_rank)
    ang = max_principal_angle(K.frame, J.frame)
    leak = float(np.linalg.norm(Rm.R.matrix @ J.frame, 2) / Rm.norm) if J.dim else 0.0
    run.results["kernel"] = {
        "d": cfg.d, "s": float(I.M), "kernel_dim": K.dim, "ideal_dim": J.dim, "dimension_gap": K.dim - J.dim,
        "max_angle": ang, "ideal_leak": leak, "rank_R": Rm.rank, "R_norm": Rm.norm, "n_points": len(samples),
        "tolerance": cfg.tol_kernel, "rank_tolerance": cfg.tol_rank, "warnings": K.warnings, "cache_key": key,
    }
    run.text.append(format_table(["d", "dim ker R", "dim ideal", "gap", "max_angle", "leak", "points"],
                                 [[cfg.d, K.dim, J.dim, K.dim - J.dim, ang, leak, len(samples)]]))
    return EXIT_OK


def cmd_extend(run: Run, jobs: int) -> int:
    from tvlab.restrict_extend import extension_defects, extension_pinv, restriction_matrix

    cfg = run.cfg
    I = _require_ideal(cfg)
    key, samples = run.samples(I, float(I.M), jobs)
    rows = []
    for d in cfg.extend_degrees or [cfg.d]:
        if d < max(I.degrees):
            raise ParameterError(f"extension degree {d} below the generator degree")
        Rm = run.timed("restriction", restriction_matrix, TruncatedSpace.make(cfg.m, d, cfg.s), samples, cfg.tol_rank)
        Em = run.timed("extension", extension_pinv, Rm)
        row = {"d": d, "rank": Rm.rank, "condition": Em.condition, "cache_key": key}
        row.update(extension_defects(Rm, Em))
        rows.append(row)
    norms = [r["E_norm"] for r in rows]
    spread = (max(norms) - min(norms)) / min(norms)
    run.results["extension"] = {"rows": rows, "E_norm_spread": spread, "rank_tolerance": cfg.tol_rank}
    run.text.append(format_table(["d", "rank", "|RE-I|", "ER herm", "ER idem", "|E|", "|R|"],
                                 [[r["d"], r["rank"], r["RE_minus_I"], r["ER_hermitian"], r["ER_idempotent"],
                                   r["E_norm"], r["R_norm"]] for r in rows]))
    run.text.append(f"|E| spread (max-min)/min = {spread:.4g}\n")
    return EXIT_OK


def cmd_proxy(run: Run, jobs: int) -> int:
    from tvlab.ciring import euler_proxy_check

    cfg = run.cfg
    I = _require_ideal(cfg)
    lo, hi = cfg.proxy_range
    rep = run.timed("proxy", euler_proxy_check, I, None, range(lo, hi + 1), cfg.d)
    run.results["proxy"] = rep.to_dict()
    run.files["proxy.csv"] = rep.csv()
    run.text.append(format_table(["n", "dim Q_I(n)", "series", "polynomial"], [r.as_tuple() for r in rep.rows]))
    run.text.append(f"regularity {rep.regularity}, passed {rep.passed}\n")
    return EXIT_OK


def _require_ideal(cfg: ExperimentConfig) -> Ideal:
    I = cfg.ideal_obj()
    if I is None:
        raise ParameterError("this command needs an ideal")
    return I


_HANDLERS = {
    "check-assumption": cmd_check_assumption,
    "norms": cmd_norms,
    "spectra": cmd_spectra,
    "kernel": cmd_kernel,
    "extend": cmd_extend,
    "proxy": cmd_proxy,
}


def exit_code_for(exc: BaseException) -> int:
    from tvlab.variety import AssumptionError, SamplingError

    if isinstance(exc, ConditioningError):
        return EXIT_CONDITIONING
    if isinstance(exc, AssumptionError):
        return EXIT_ASSUMPTION
    if isinstance(exc, SamplingError):
        return EXIT_SAMPLING
    if isinstance(exc, (ValueError, configparser.Error, KeyError)):
        return EXIT_PARAMETER
    raise exc


def run_command(command: str, cfg: ExperimentConfig, *, jobs: int = 1, cache_dir=None, gnuplot: bool = False,
                write: bool = True) -> tuple[int, dict]:
    run = Run(command, cfg, SampleCache(cache_dir))
    try:
        cfg.validate()
        handler = _HANDLERS[command]
        code = handler(run, jobs, gnuplot) if command == "spectra" else handler(run, jobs)
        status, err = ("ok" if code == EXIT_OK else "fail"), None
    except Exception as exc:  # mapped onto the exit-code contract
        code = exit_code_for(exc)
        status, err = "error", f"{type(exc).__name__}: {exc}"
        run.text.append(err + "\n")
    report = run.report(status, code, err)
    if write:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{command}.json").write_text(dumps(report))
        (out / f"{command}.txt").write_text("".join(run.text))
        for name, text in run.files.items():
            (out / name).write_text(text)
        timings = dict(run.timings, total=time.perf_counter() - run._t0)
        (out / f"{command}.timings.json").write_text(
            json.dumps({"command": command, "config_hash": cfg.hash(), "seconds": timings,
                        "cache_hits": run.cache.hits, "cache_misses": run.cache.misses}, sort_keys=True, indent=1)
        )
    return code, report


def merge_reports(paths) -> dict:
    reps = []
    for p in paths:
        with open(p) as fh:
            reps.append(json.load(fh))
    reps.sort(key=lambda r: (r.get("command", ""), r.get("config_hash", "")))
    return {"version": __version__, "count": len(reps),
            "exit_codes": {f"{r['command']}:{r['config_hash']}": r["exit_code"] for r in reps}, "reports": reps}


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tvlab", description="Truncated Hilbert-module experiments on the ball and on varieties.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("reports", nargs="*", help="report files (report-merge only)")
    p.add_argument("--config", help="INI file with [experiment], [tolerances], [bands], ... sections")
    p.add_argument("--seed", type=int)
    p.add_argument("--degree", type=int, help="truncation degree d")
    p.add_argument("--weight", type=float, help="weight exponent s")
    p.add_argument("--samples", type=int, help="variety sample count")
    p.add_argument("--ideal", action="append", help="generator (repeat for several); overrides the config")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--cache", help="sample cache directory")
    p.add_argument("--out", help="output directory")
    p.add_argument("--emit-gnuplot", action="store_true", help="write gnuplot scripts next to CSV files")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "report-merge":
        if not args.reports:
            print("report-merge needs report files", file=sys.stderr)
            return EXIT_PARAMETER
        try:
            merged = merge_reports(args.reports)
        except (OSError, ValueError, KeyError) as exc:
            print(f"report-merge: {exc}", file=sys.stderr)
            return EXIT_PARAMETER
        out = Path(args.out or "out")
        out.mkdir(parents=True, exist_ok=True)
        (out / "merged.json").write_text(dumps(merged))
        return EXIT_OK
    try:
        cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
        cfg.override(args)
    except (OSError, ValueError, configparser.Error) as exc:
        print(f"config: {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    code, report = run_command(args.command, cfg, jobs=max(1, args.jobs), cache_dir=args.cache,
                               gnuplot=args.emit_gnuplot)
    sys.stdout.write((Path(cfg.out) / f"{args.command}.txt").read_text())
    if "error" in report:
        print(report["error"], file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
