"""File-driven command line interface.

Every subcommand reads one JSON config (physical parameters are mandatory,
numerical knobs optional with the package defaults), writes CSV data plus a
JSON sidecar holding the fully resolved config into --out, and is
deterministic for a fixed config + seed.

Exit codes: 0 success, 1 validation/config/resonance error, 2 numerical
failure.  Errors are emitted as one JSON object on stderr.
"""

import argparse
import dataclasses
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import arrays as ar
from . import factorization as fz
from . import field_oracle as fo
from . import wedge as wg
from .errors import (ApproximationFailureError, ConfigError, DivergenceError,
                     DomainError, IterationFailureError, QuadratureFailureError,
                     ResonanceError, SingularMatrixError, WedgeError)
from .kernel import KernelMethod, ProblemConfig, kernel

SUBCOMMANDS = ("kernel", "factor", "lambda", "semi", "rho", "wedge",
               "field", "oracle", "compare", "repro")
RESONANCE_GATED = ("semi", "wedge", "field")


@dataclass
class RunConfig:
    """Physical parameters plus every numerical knob of the pipeline."""

    k: float
    s: float
    a: float
    alpha: float
    theta_inc: float
    kernel_variant: str = "fast"
    kernel_corrections: int = 2
    kernel_L: int = 500
    kernel_ts: list = field(default_factory=lambda: [-3.0, 3.0, 241])
    aaa_n_samples: int = 2048
    aaa_tol: float = 1e-13
    aaa_max_degree: int = 150
    n_quad: int = 4096
    M: int = 1000
    j_max: int = 50
    tol_iter: float = 0.0
    lambda_M: int = 1000
    lambda_sources: list = field(default_factory=lambda: ["rational", "integral"])
    semi_branch: str = "top"
    rho_alphas: list = field(default_factory=lambda: list(np.linspace(0.3, np.pi - 0.3, 25)))
    rho_M: int = 200
    oracle_n_per_face: int = 30
    grid: dict = field(default_factory=lambda: {
        "x0": -1.0, "x1": 1.0, "y0": -1.0, "y1": 1.0, "nx": 201, "ny": 201,
        "include_incident": False})
    field_source: str = "iterative"   # iterative | isolated | oracle
    compare_a: str = ""
    compare_b: str = ""
    seed: int = 0

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        for name in ("k", "s", "a", "alpha", "theta_inc"):
            if name not in d:
                raise ConfigError(f"config is missing the physical parameter {name!r}"
                                  " (no defaults for physics)")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self):
        out = dataclasses.asdict(self)
        out["rho_alphas"] = [float(v) for v in out["rho_alphas"]]
        out["version"] = __version__
        return out

    def problem(self):
        return ProblemConfig(k=self.k, s=self.s, a=self.a,
                             alpha=self.alpha, theta_inc=self.theta_inc)

    def method(self):
        return KernelMethod(self.kernel_variant, self.kernel_corrections, self.kernel_L)


def _fmt(x):
    return f"{x:.17g}"


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def write_json(path, obj):
    with open(path, "w", newline="") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _sidecar(rc, out_dir, name, extra=None):
    obj = {"config": rc.to_dict()}
    if extra:
        obj.update(extra)
    write_json(os.path.join(out_dir, name), obj)


def _lambda_setup(rc, cfg):
    rk = fz.aaa_fit(cfg, rc.aaa_n_samples, rc.aaa_tol, rc.aaa_max_degree, seed=rc.seed)
    lam = fz.lambda_from_rational(rk, max(rc.M, rc.lambda_M))
    return rk, lam


def cmd_kernel(rc, out_dir):
    cfg = rc.problem()
    t0, t1, n = rc.kernel_ts
    ts = np.linspace(float(t0), float(t1), int(n))
    method = rc.method()
    rows = []
    for t in ts:
        try:
            val = kernel(cfg, complex(np.exp(1j * t)), method)
        except DomainError:
            continue
        rows.append((float(t), val.real, val.imag, method.variant, method.L))
    write_csv(os.path.join(out_dir, "kernel.csv"),
              ["t", "re_k", "im_k", "method", "L"], rows)
    _sidecar(rc, out_dir, "kernel.json")
    return 0


def cmd_factor(rc, out_dir):
    cfg = rc.problem()
    rk, _ = _lambda_setup(rc, cfg)
    obj = {
        "K1": rk.K1,
        "K1_plus": rk.K1_plus,
        "K1_minus": rk.K1_minus,
        "zeros_in": rk.zeros_in,
        "zeros_out": rk.zeros_out,
        "poles_in": rk.poles_in,
        "poles_out": rk.poles_out,
        "fit_error": rk.fit_error,
        "reciprocal_defect": rk.reciprocal_defect,
        "degree": rk.degree,
        "anchor": rk.anchor,
    }
    write_json(os.path.join(out_dir, "factor.json"), obj)
    _sidecar(rc, out_dir, "factor_sidecar.json")
    return 0


def cmd_lambda(rc, out_dir):
    cfg = rc.problem()
    rows = []
    if "rational" in rc.lambda_sources:
        _, lam = _lambda_setup(rc, cfg)
        rows += [(int(n), v.real, v.imag, "rational")
                 for n, v in enumerate(lam.values[: rc.lambda_M + 1])]
    if "integral" in rc.lambda_sources:
        li = fz.lambda_from_integral(cfg, rc.lambda_M, rc.n_quad)
        rows += [(int(n), v.real, v.imag, "integral") for n, v in enumerate(li.values)]
    write_csv(os.path.join(out_dir, "lambda.csv"), ["n", "re", "im", "source"], rows)
    _sidecar(rc, out_dir, "lambda.json")
    return 0


def cmd_semi(rc, out_dir):
    cfg = rc.problem()
    _, lam = _lambda_setup(rc, cfg)
    coeffs = ar.semi_coeffs(cfg, lam, rc.M, rc.semi_branch)
    start = 0 if rc.semi_branch == "top" else 1
    rows = [(int(i + start), v.real, v.imag) for i, v in enumerate(coeffs.values)]
    write_csv(os.path.join(out_dir, "semi.csv"), ["m", "re", "im"], rows)
    _sidecar(rc, out_dir, "semi.json", {"beta": coeffs.beta, "kind": coeffs.kind})
    return 0


def cmd_rho(rc, out_dir):
    base = rc.problem()
    rk, lam = None, None
    rows = []
    for alpha in rc.rho_alphas:
        cfg = ProblemConfig(k=base.k, s=base.s, a=base.a, alpha=float(alpha),
                            theta_inc=base.theta_inc)
        if rk is None:
            rk = fz.aaa_fit(cfg, rc.aaa_n_samples, rc.aaa_tol, rc.aaa_max_degree, seed=rc.seed)
            lam = fz.lambda_from_rational(rk, rc.rho_M)
        mats = wg.build_matrices(cfg, lam, rc.rho_M)
        rho_ab, rho_ba, diff = wg.scheme_spectral_radius(mats)
        rows.append((float(alpha), rho_ab, rho_ba, diff))
    write_csv(os.path.join(out_dir, "rho.csv"), ["alpha", "rho", "rho_ba", "diff"], rows)
    _sidecar(rc, out_dir, "rho.json")
    return 0


def cmd_wedge(rc, out_dir):
    cfg = rc.problem()
    _, lam = _lambda_setup(rc, cfg)
    mats = wg.build_matrices(cfg, lam, rc.M)
    state = wg.iterate(cfg, lam, rc.M, mats, rc.j_max, rc.tol_iter, check_rho=False)
    if rc.M <= 400:
        rho_ab, rho_ba, _ = wg.scheme_spectral_radius(mats)
    else:
        # full spectra are O(M^3); a power estimate is enough for the summary
        # (the two products share their nonzero spectrum)
        rho_ab = rho_ba = wg._power_rho_estimate(mats, iters=300)
    rows = [(int(m), v.real, v.imag, "top") for m, v in enumerate(state.A)]
    rows += [(-(int(m) + 1), v.real, v.imag, "bottom") for m, v in enumerate(state.B)]
    write_csv(os.path.join(out_dir, "wedge_coeffs.csv"), ["index", "re", "im", "face"], rows)
    write_csv(os.path.join(out_dir, "wedge_history.csv"), ["j", "delta_a", "delta_b"],
              [(int(j), float(a), float(b)) for j, a, b in state.history])
    summary = {
        "iterations": state.iteration,
        "final_delta_a": state.history[-1][1],
        "final_delta_b": state.history[-1][2],
        "rho_ab": rho_ab,
        "rho_ba": rho_ba,
        "P": mats.P,
    }
    write_json(os.path.join(out_dir, "wedge.json"), summary)
    _sidecar(rc, out_dir, "wedge_sidecar.json")
    return 0


def _field_grid(rc, cfg):
    g = rc.grid
    if rc.field_source == "oracle":
        ss = fo.direct_oracle(cfg, rc.oracle_n_per_face)
    else:
        _, lam = _lambda_setup(rc, cfg)
        if rc.field_source == "isolated":
            top, bottom = ar.isolated_guess(cfg, lam, rc.M)
            ss = fo.wedge_scatterers(cfg, top.values, bottom.values)
        else:
            mats = wg.build_matrices(cfg, lam, rc.M)
            state = wg.iterate(cfg, lam, rc.M, mats, rc.j_max, rc.tol_iter, check_rho=False)
            ss = fo.wedge_scatterers(cfg, state.A, state.B)
    return fo.evaluate_grid(
        cfg, ss, (g["x0"], g["x1"], g["y0"], g["y1"]), int(g["nx"]), int(g["ny"]),
        include_incident=bool(g.get("include_incident", False)))


def _write_field(path, grid):
    xs, ys = grid.axes()
    rows = []
    for iy, y in enumerate(ys):
        for ix, x in enumerate(xs):
            v = grid.values[iy, ix]
            masked = bool(grid.mask[iy, ix])
            rows.append((float(x), float(y),
                         0.0 if masked else v.real, 0.0 if masked else v.imag,
                         int(masked)))
    write_csv(path, ["x", "y", "re", "im", "masked"], rows)


def read_field_csv(path):
    """Rebuild a FieldGrid from the field CSV schema."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    xs = np.unique(data["x"])
    ys = np.unique(data["y"])
    nx, ny = len(xs), len(ys)
    vals = (data["re"] + 1j * data["im"]).reshape(ny, nx)
    mask = data["masked"].astype(bool).reshape(ny, nx)
    vals = np.where(mask, np.nan, vals)
    return fo.FieldGrid(x0=float(xs[0]), x1=float(xs[-1]), y0=float(ys[0]),
                        y1=float(ys[-1]), nx=nx, ny=ny, values=vals, mask=mask)


def cmd_field(rc, out_dir):
    cfg = rc.problem()
    grid = _field_grid(rc, cfg)
    _write_field(os.path.join(out_dir, "field.csv"), grid)
    _sidecar(rc, out_dir, "field.json", {"source": rc.field_source})
    return 0


def cmd_oracle(rc, out_dir):
    cfg = rc.problem()
    ss = fo.direct_oracle(cfg, rc.oracle_n_per_face)
    rows = [(int(i), float(c[0]), float(c[1]), v.real, v.imag)
            for i, (c, v) in enumerate(zip(ss.centers, ss.coeffs))]
    write_csv(os.path.join(out_dir, "oracle_coeffs.csv"),
              ["index", "x", "y", "re", "im"], rows)
    _sidecar(rc, out_dir, "oracle.json", {"n_per_face": rc.oracle_n_per_face})
    return 0


def cmd_compare(rc, out_dir):
    cfg = rc.problem()
    if not rc.compare_a or not rc.compare_b:
        raise ConfigError("compare needs compare_a and compare_b CSV paths in the config")
    ga = read_field_csv(rc.compare_a)
    gb = read_field_csv(rc.compare_b)
    rel_l2, max_abs = fo.compare(cfg, ga, gb)
    write_json(os.path.join(out_dir, "compare.json"),
               {"rel_l2": rel_l2, "max_abs": max_abs})
    _sidecar(rc, out_dir, "compare_sidecar.json")
    return 0


def _resonance_gate(rc, allow):
    cfg = rc.problem()
    report = wg.resonance_check(cfg)
    if report.hits:
        if allow:
            print(f"warning: resonant configuration {report.hits}, continuing "
                  "(--allow-resonant)", file=sys.stderr)
        else:
            raise ResonanceError(f"resonant configuration: {report.hits}", report)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="wedgewh",
        description="Wedge-of-point-scatterers Wiener-Hopf pipeline")
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("figure", nargs="?", default=None,
                        help="figure name for `repro` (fig3 fig4 fig5 fig6 fig7 fig8 fig10)")
    parser.add_argument("--config", default=None, help="JSON config path")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="retry-jitter seed")
    parser.add_argument("--allow-resonant", action="store_true")
    parser.add_argument("--threads", type=int, default=None)
    args = parser.parse_args(argv)

    if args.threads is not None:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(args.threads)
        try:
            # BLAS pools are already initialized by the numpy import; resize them
            import threadpoolctl
            threadpoolctl.threadpool_limits(args.threads)
        except ImportError:
            print("warning: threadpoolctl unavailable; --threads only affects "
                  "pools created after this point", file=sys.stderr)

    try:
        if args.subcommand == "repro":
            from . import repro
            if args.figure is None:
                raise ConfigError("repro needs a figure name, e.g. `wedgewh repro fig8`")
            os.makedirs(args.out, exist_ok=True)
            overrides = {}
            if args.config:
                with open(args.config) as fh:
                    overrides = json.load(fh)
            repro.run_figure(args.figure, args.out, overrides, seed=args.seed or 0)
            return 0
        if args.config is None:
            raise ConfigError("--config is required")
        with open(args.config) as fh:
            raw = json.load(fh)
        if args.seed is not None:
            raw["seed"] = args.seed
        rc = RunConfig.from_dict(raw)
        rc.problem()  # validate physics early
        os.makedirs(args.out, exist_ok=True)
        if args.subcommand in RESONANCE_GATED:
            _resonance_gate(rc, args.allow_resonant)
        handler = {
            "kernel": cmd_kernel, "factor": cmd_factor, "lambda": cmd_lambda,
            "semi": cmd_semi, "rho": cmd_rho, "wedge": cmd_wedge,
            "field": cmd_field, "oracle": cmd_oracle, "compare": cmd_compare,
        }[args.subcommand]
        return handler(rc, args.out)
    except (ConfigError, ResonanceError, DomainError, FileNotFoundError,
            json.JSONDecodeError) as exc:
        _emit_error(exc)
        return 1
    except (ApproximationFailureError, DivergenceError, IterationFailureError,
            QuadratureFailureError, SingularMatrixError, WedgeError) as exc:
        _emit_error(exc)
        return 2


def _emit_error(exc):
    payload = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ApproximationFailureError):
        payload["details"] = exc.details
    if isinstance(exc, DivergenceError):
        payload["history"] = exc.history
    if isinstance(exc, ResonanceError) and exc.report is not None:
        payload["hits"] = exc.report.hits
        payload["margin"] = exc.report.margin
    print(json.dumps(payload, default=_json_default), file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
