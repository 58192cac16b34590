"""Render wedgewh CSV/JSON outputs into the study's figure types.

Every renderer takes parsed inputs, draws onto a fresh Figure, writes a PNG
and returns (figure, metadata).  Rendering never mutates its inputs, so
re-rendering a job is idempotent pixel-for-pixel.
"""

import json

import numpy as np
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.colors import hsv_to_rgb

KINDS = ("field", "convergence", "rho_sweep", "lambda_plane",
         "phase_portrait", "reciprocal_defect")


def load_table(path):
    data = np.genfromtxt(path, delimiter=",", names=True, dtype=None, encoding="utf-8")
    return data


def load_sidecar(path):
    if path is None:
        return {}
    with open(path) as fh:
        obj = json.load(fh)
    return obj.get("config", obj)


def _grid_from_field(data):
    xs = np.unique(data["x"])
    ys = np.unique(data["y"])
    vals = (data["re"] + 1j * data["im"]).reshape(len(ys), len(xs))
    mask = data["masked"].astype(bool).reshape(len(ys), len(xs)) \
        if "masked" in data.dtype.names else np.zeros(vals.shape, bool)
    return xs, ys, vals, mask


def render_field(data, sidecar, out_path, dpi=150):
    xs, ys, vals, mask = _grid_from_field(data)
    re = np.where(mask, np.nan, vals.real)
    fig, ax = plt.subplots(figsize=(6, 5))
    lim = np.nanmax(np.abs(re)) or 1.0
    im = ax.pcolormesh(xs, ys, re, cmap="RdBu_r", vmin=-lim, vmax=lim, shading="auto")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal")
    fig.colorbar(im, ax=ax, label="Re field")
    fig.savefig(out_path, dpi=dpi)
    return fig, {"kind": "field", "masked_points": int(mask.sum())}


def fit_decay_rate(j, err):
    """Least-squares slope of log(err) vs j (positive err entries only)."""
    keep = err > 0
    return float(np.polyfit(j[keep], np.log(err[keep]), 1)[0])


def render_convergence(data, sidecar, out_path, dpi=150):
    names = data.dtype.names
    fig, ax = plt.subplots(figsize=(6, 4.5))
    slope = None
    if "method" in names:
        # truncation study: error vs L, one log-log curve per method variant
        labels = sorted({(str(m), int(n)) for m, n in zip(data["method"],
                                                          data["corrections"])})
        for method, n in labels:
            sel = (data["method"] == method) & (data["corrections"] == n)
            L = data["L"][sel].astype(float)
            err = data["abs_err"][sel].astype(float)
            ax.loglog(L, err, "o-", ms=3, label=f"{method} N={n}")
            if slope is None:
                slope = float(np.polyfit(np.log(L), np.log(err), 1)[0])
        ax.set_xlabel("truncation L")
    else:
        # iteration history: error vs j, optional rho^j reference line
        j = data[names[0]].astype(float)
        for name in names[1:]:
            col = data[name].astype(float)
            if name.startswith("rho"):
                ax.semilogy(j, col, "m-", label="rho^j")
            else:
                pos = col > 0
                ax.semilogy(j[pos], col[pos], "o-", ms=3, label=name)
                if slope is None:
                    slope = fit_decay_rate(j, col)
        ax.set_xlabel("iteration j")
    ax.set_ylabel("error")
    ax.legend(fontsize=7)
    ax.grid(alpha=0.3)
    if slope is not None:
        ax.set_title(f"fitted decay rate {slope:.4f}")
    fig.savefig(out_path, dpi=dpi)
    return fig, {"kind": "convergence", "fitted_slope": slope}


def render_rho_sweep(data, sidecar, out_path, dpi=150):
    alpha = data["alpha"].astype(float)
    rho = data["rho"].astype(float)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(alpha, rho, "o-", ms=3)
    ax.axhline(1.0, color="k", ls="--", lw=1, label="critical radius")
    edges = []
    if {"a", "s"} <= set(sidecar):
        edge = float(np.arcsin(sidecar["a"] / sidecar["s"]))
        edges = [edge, np.pi - edge]
        for e in edges:
            ax.axvline(e, color="gray", ls="--", lw=1)
    ax.set_xlabel("wedge angle alpha")
    ax.set_ylabel("spectral radius")
    ax.legend()
    fig.savefig(out_path, dpi=dpi)
    return fig, {"kind": "rho_sweep", "geometry_edges": edges}


def render_lambda_plane(data, sidecar, out_path, dpi=150):
    fig, ax = plt.subplots(figsize=(5.5, 5))
    sources = np.unique(data["source"]) if "source" in data.dtype.names else [""]
    for src, color in zip(sources, ("tab:blue", "tab:red", "tab:green")):
        sel = data["source"] == src if "source" in data.dtype.names else slice(None)
        ax.plot(data["re"][sel], data["im"][sel], ".", ms=2.5, color=color, label=str(src))
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.set_aspect("equal")
    ax.legend()
    fig.savefig(out_path, dpi=dpi)
    return fig, {"kind": "lambda_plane", "sources": [str(s) for s in sources]}


def _phase_image(vals):
    """HSV phase portrait: hue = arg/2pi, full saturation/value."""
    hue = (np.angle(vals) / (2 * np.pi)) % 1.0
    hsv = np.stack([hue, np.ones_like(hue), np.where(np.isnan(hue), 0.0, 1.0)], axis=-1)
    hsv[..., 0] = np.nan_to_num(hsv[..., 0])
    return hsv_to_rgb(hsv)


def render_phase_portrait(data, sidecar, out_path, dpi=150, factor_json=None):
    if factor_json is not None:
        vals, extent = _rational_model_grid(factor_json)
    else:
        xs, ys, vals, mask = _grid_from_field(data)
        vals = np.where(mask, np.nan, vals)
        extent = (xs[0], xs[-1], ys[0], ys[-1])
    fig, ax = plt.subplots(figsize=(5.5, 5))
    ax.imshow(_phase_image(vals), origin="lower", extent=extent)
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    fig.savefig(out_path, dpi=dpi)
    return fig, {"kind": "phase_portrait"}


def _rational_model_grid(path, n=301, half_width=1.6):
    """Evaluate the factorized rational kernel model from factor.json."""
    with open(path) as fh:
        model = json.load(fh)

    def carr(key):
        return np.array([complex(v["re"], v["im"]) for v in model[key]])

    k1 = complex(model["K1"]["re"], model["K1"]["im"])
    zeros = np.concatenate([carr("zeros_in"), carr("zeros_out")])
    poles = np.concatenate([carr("poles_in"), carr("poles_out")])
    xs = np.linspace(-half_width, half_width, n)
    Z = xs[None, :] + 1j * xs[:, None]
    vals = np.full(Z.shape, k1, dtype=complex)
    for z0 in zeros:
        vals *= Z - z0
    for p0 in poles:
        vals /= Z - p0
    return vals, (-half_width, half_width, -half_width, half_width)


def render_reciprocal_defect(data, sidecar, out_path, dpi=150, factor_json=None):
    with open(factor_json) as fh:
        model = json.load(fh)

    def carr(key):
        return np.array([complex(v["re"], v["im"]) for v in model[key]])

    zd = np.abs(carr("zeros_out") * carr("zeros_in") - 1.0)
    pd = np.abs(carr("poles_out") * carr("poles_in") - 1.0)
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.semilogy(np.arange(1, len(zd) + 1), np.maximum(zd, 1e-18), "o-", ms=3,
                label="|z+ z- - 1|")
    ax.semilogy(np.arange(1, len(pd) + 1), np.maximum(pd, 1e-18), "s-", ms=3,
                label="|p+ p- - 1|")
    ax.set_xlabel("pair index")
    ax.set_ylabel("reciprocal-pair defect")
    ax.legend()
    fig.savefig(out_path, dpi=dpi)
    return fig, {"kind": "reciprocal_defect",
                 "max_defect": float(max(zd.max(initial=0), pd.max(initial=0)))}


RENDERERS = {
    "field": render_field,
    "convergence": render_convergence,
    "rho_sweep": render_rho_sweep,
    "lambda_plane": render_lambda_plane,
    "phase_portrait": render_phase_portrait,
    "reciprocal_defect": render_reciprocal_defect,
}


def render(kind, in_path, out_path, sidecar_path=None, dpi=150):
    """Dispatch a plot job; returns the renderer metadata."""
    if kind not in RENDERERS:
        raise ValueError(f"unknown plot kind {kind!r}; choose from {KINDS}")
    sidecar = load_sidecar(sidecar_path)
    if kind in ("phase_portrait", "reciprocal_defect") and in_path.endswith(".json"):
        fig, meta = RENDERERS[kind](None, sidecar, out_path, dpi=dpi,
                                    factor_json=in_path)
    else:
        data = load_table(in_path)
        fig, meta = RENDERERS[kind](data, sidecar, out_path, dpi=dpi)
    plt.close(fig)
    return meta
