"""Finite-size scaling: data collapse, crossings, exponent fits.

Input is the flat record list produced by :mod:`mincutmc.ensemble` (or
any equivalent source).  Curve extraction helpers regroup records into
``{L: (x, y, err)}`` dictionaries; the fitting routines are pure
numerics and know nothing about circuits.

The collapse objective is interpolation-based: after rescaling, every
point of every curve is compared with the linear interpolation of the
*other* curves at the same rescaled abscissa, weighted by the combined
variance of point and interpolant; points outside the others' range are
excluded.  The reported quality is the mean weighted squared deviation,
comparable to a reduced chi-square when error bars are honest.
Optimization is a coarse grid scan followed by Nelder-Mead refinement;
parameter errors come from refitting Gaussian-perturbed copies of the
curves (parametric bootstrap), which is deterministic under the given
seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

__all__ = [
    "ScalingError",
    "CollapseFit",
    "ExponentFit",
    "CrossingReport",
    "slice_curves",
    "time_curves",
    "size_curve",
    "master_curve_quality",
    "collapse_two_param",
    "collapse_dynamic",
    "fit_beta",
    "fit_log_growth",
    "fit_powerlaw",
    "crossing_points",
    "lmin_sweep",
]


class ScalingError(ValueError):
    """Raised when input data cannot support the requested analysis."""


@dataclass
class CollapseFit:
    """Result of a scaling collapse."""

    x_c: float
    nu: float
    quality: float
    x_c_err: float = math.nan
    nu_err: float = math.nan
    n_points: int = 0
    details: dict = field(default_factory=dict)


@dataclass
class ExponentFit:
    """Result of a single-exponent fit."""

    name: str
    value: float
    error: float
    quality: float = math.nan
    details: dict = field(default_factory=dict)


@dataclass
class CrossingReport:
    """Pairwise curve crossings and their infinite-size extrapolation."""

    pairs: list            # (L_small, L_large, x_cross)
    x_c: float             # intercept of x_cross vs 1/L_mean
    drift: float           # slope of x_cross vs 1/L_mean
    x_c_err: float = math.nan


# -- record regrouping -------------------------------------------------------


def _match(value, wanted):
    return wanted is None or value == wanted


def slice_curves(records, observable, x="q", t=None, p=None, q=None):
    """Curves of an observable against ``p`` or ``q``, one per system size.

    ``t`` picks the checkpoint: an int, a callable ``L -> t``, or None
    for the latest time available per cell.  Returns ``{L: (x, y, err)}``
    with x ascending.
    """
    if x not in ("p", "q"):
        raise ScalingError("x must be 'p' or 'q'")
    sel = [r for r in records if r.observable == observable
           and _match(r.p, p) and _match(r.q, q)]
    if not sel:
        raise ScalingError(f"no records for observable {observable!r}")
    curves = {}
    for L in sorted({r.L for r in sel}):
        rows = [r for r in sel if r.L == L]
        if t is None:
            t_pick = max(r.t for r in rows)
        elif callable(t):
            t_pick = t(L)
        else:
            t_pick = int(t)
        rows = [r for r in rows if r.t == t_pick]
        pts = sorted({(getattr(r, x), r.mean, r.stderr) for r in rows})
        if not pts:
            raise ScalingError(f"no records at t={t_pick} for L={L}")
        arr = np.array(pts, dtype=float)
        curves[L] = (arr[:, 0], arr[:, 1], arr[:, 2])
    return curves


def time_curves(records, observable, p=None, q=None):
    """Time series of an observable, one curve per system size."""
    sel = [r for r in records if r.observable == observable
           and _match(r.p, p) and _match(r.q, q)]
    if not sel:
        raise ScalingError(f"no records for observable {observable!r}")
    curves = {}
    for L in sorted({r.L for r in sel}):
        pts = sorted({(r.t, r.mean, r.stderr) for r in sel if r.L == L})
        arr = np.array(pts, dtype=float)
        curves[L] = (arr[:, 0], arr[:, 1], arr[:, 2])
    return curves


def size_curve(records, observable, t=None, p=None, q=None):
    """Observable against system size at one parameter point.

    Returns ``(L, y, err)`` arrays sorted by size; ``t`` as in
    :func:`slice_curves`.
    """
    curves = slice_curves(records, observable, x="q" if q is None else "p",
                          t=t, p=p, q=q)
    L_vals, ys, es = [], [], []
    for L, (xv, yv, ev) in curves.items():
        if len(yv) != 1:
            raise ScalingError(
                f"size curve needs a single parameter point per L; L={L} has {len(yv)}"
            )
        L_vals.append(L)
        ys.append(yv[0])
        es.append(ev[0])
    return np.array(L_vals, float), np.array(ys), np.array(es)


# -- collapse machinery ------------------------------------------------------


def master_curve_quality(rescaled):
    """Mean weighted squared deviation of each curve from the others.

    ``rescaled`` is a list of ``(u, y, var)`` triples.  Each point is
    compared against the linear interpolation of the union of the other
    curves; points outside the others' abscissa range do not contribute.
    Raises :class:`ScalingError` if no point overlaps.
    """
    total = 0.0
    count = 0
    for k in range(len(rescaled)):
        u, y, var = rescaled[k]
        ou = np.concatenate([rescaled[j][0] for j in range(len(rescaled)) if j != k])
        oy = np.concatenate([rescaled[j][1] for j in range(len(rescaled)) if j != k])
        ov = np.concatenate([rescaled[j][2] for j in range(len(rescaled)) if j != k])
        if ou.size < 2:
            continue
        order = np.argsort(ou, kind="stable")
        ou, oy, ov = ou[order], oy[order], ov[order]
        inside = (u >= ou[0]) & (u <= ou[-1])
        if not inside.any():
            continue
        ui, yi, vi = u[inside], y[inside], var[inside]
        hi = np.clip(np.searchsorted(ou, ui), 1, ou.size - 1)
        lo = hi - 1
        du = ou[hi] - ou[lo]
        lam = np.where(du > 0, (ui - ou[lo]) / np.where(du > 0, du, 1.0), 0.0)
        y_hat = (1 - lam) * oy[lo] + lam * oy[hi]
        v_hat = (1 - lam) ** 2 * ov[lo] + lam ** 2 * ov[hi]
        w = 1.0 / (vi + v_hat + 1e-300)
        total += float(((yi - y_hat) ** 2 * w).sum())
        count += int(inside.sum())
    if count == 0:
        raise ScalingError("rescaled curves do not overlap; widen the parameter box")
    return total / count, count


def _check_curves(curves, minimum=2):
    if len(curves) < minimum:
        raise ScalingError(f"need at least {minimum} system sizes, got {len(curves)}")
    for L, (x, y, e) in curves.items():
        if len(x) != len(y) or len(y) != len(e):
            raise ScalingError(f"ragged curve for L={L}")


def _grid_then_simplex(objective, box_a, box_b, n_grid):
    """Coarse grid scan over a 2-D box, then Nelder-Mead from the best node."""
    avals = np.linspace(box_a[0], box_a[1], n_grid)
    bvals = np.linspace(box_b[0], box_b[1], n_grid)
    best = (math.inf, avals[0], bvals[0])
    for a in avals:
        for b in bvals:
            f = objective(a, b)
            if f < best[0]:
                best = (f, a, b)

    def penalized(theta):
        a, b = theta
        if not (box_a[0] <= a <= box_a[1] and box_b[0] <= b <= box_b[1]):
            return best[0] + 1e6 * (1 + abs(a) + abs(b))
        return objective(a, b)

    res = minimize(
        penalized, [best[1], best[2]], method="Nelder-Mead",
        options={"xatol": 1e-5, "fatol": 1e-12, "maxiter": 600},
    )
    if res.fun <= best[0]:
        return float(res.x[0]), float(res.x[1]), float(res.fun)
    return float(best[1]), float(best[2]), float(best[0])


def _perturbed(curves, rng):
    return {
        L: (x, y + e * rng.standard_normal(len(y)), e)
        for L, (x, y, e) in curves.items()
    }


def collapse_two_param(
    curves,
    x_c_range,
    nu_range,
    n_grid: int = 41,
    bootstrap: int = 100,
    seed: int = 0,
):
    """Fit ``(x_c, nu)`` so curves collapse against ``(x - x_c) L^(1/nu)``.

    ``curves`` maps system size to ``(x, y, err)``.  The search box is
    scanned on an ``n_grid`` x ``n_grid`` grid and refined with
    Nelder-Mead; ``bootstrap`` Gaussian-perturbed refits (on a coarser
    grid) give the parameter errors.
    """
    _check_curves(curves)
    if nu_range[0] <= 0:
        raise ScalingError("nu search range must be positive")
    prep = {L: (x, y, e ** 2) for L, (x, y, e) in curves.items()}

    def objective_for(data):
        def objective(x_c, nu):
            resc = [((x - x_c) * L ** (1.0 / nu), y, v) for L, (x, y, v) in data.items()]
            try:
                chi2, _ = master_curve_quality(resc)
            except ScalingError:
                return math.inf
            return chi2

        return objective

    obj = objective_for(prep)
    x_c, nu, quality = _grid_then_simplex(obj, x_c_range, nu_range, n_grid)
    _, n_points = master_curve_quality(
        [((x - x_c) * L ** (1.0 / nu), y, v) for L, (x, y, v) in prep.items()]
    )

    boots = []
    if bootstrap:
        rng = np.random.default_rng(seed)
        coarse = max(9, n_grid // 2)
        for _ in range(bootstrap):
            pert = _perturbed(curves, rng)
            pdata = {L: (x, y, e ** 2) for L, (x, y, e) in pert.items()}
            boots.append(
                _grid_then_simplex(objective_for(pdata), x_c_range, nu_range, coarse)[:2]
            )
    if boots:
        barr = np.array(boots)
        x_c_err = float(barr[:, 0].std(ddof=1))
        nu_err = float(barr[:, 1].std(ddof=1))
    else:
        x_c_err = nu_err = math.nan
    return CollapseFit(
        x_c=x_c, nu=nu, quality=quality, x_c_err=x_c_err, nu_err=nu_err,
        n_points=n_points,
        details={"bootstrap": bootstrap, "n_grid": n_grid, "seed": seed},
    )


def collapse_dynamic(
    curves,
    z_range,
    n_grid: int = 81,
    bootstrap: int = 100,
    seed: int = 0,
    t_min: float = 1.0,
):
    """Fit the dynamical exponent collapsing time curves vs ``t / L^z``.

    Works in logarithmic time: point abscissas are ``ln t - z ln L``.
    The observable itself is left unscaled, which suits bounded
    quantities such as the mean ancilla bit.  Times below ``t_min`` are
    dropped.
    """
    _check_curves(curves)
    prep = {}
    for L, (t, y, e) in curves.items():
        keep = np.asarray(t, float) >= t_min
        if keep.sum() < 2:
            raise ScalingError(f"curve for L={L} has fewer than 2 usable times")
        prep[L] = (np.log(np.asarray(t, float)[keep]), np.asarray(y)[keep],
                   np.asarray(e)[keep] ** 2)

    def objective_for(data):
        def objective(z):
            resc = [(lt - z * math.log(L), y, v) for L, (lt, y, v) in data.items()]
            try:
                chi2, _ = master_curve_quality(resc)
            except ScalingError:
                return math.inf
            return chi2

        return objective

    obj = objective_for(prep)
    zs = np.linspace(z_range[0], z_range[1], n_grid)
    vals = [obj(z) for z in zs]
    z0 = float(zs[int(np.argmin(vals))])

    def penalized(theta):
        z = theta[0]
        if not z_range[0] <= z <= z_range[1]:
            return min(vals) + 1e6 * (1 + abs(z))
        return obj(z)

    res = minimize(penalized, [z0], method="Nelder-Mead",
                   options={"xatol": 1e-5, "fatol": 1e-12, "maxiter": 300})
    z_fit, quality = (float(res.x[0]), float(res.fun)) if res.fun <= min(vals) else (z0, float(min(vals)))

    boots = []
    if bootstrap:
        rng = np.random.default_rng(seed)
        coarse = np.linspace(z_range[0], z_range[1], max(17, n_grid // 3))
        for _ in range(bootstrap):
            pert = {}
            for L, (lt, y, v) in prep.items():
                pert[L] = (lt, y + np.sqrt(v) * rng.standard_normal(len(y)), v)
            pobj = objective_for(pert)
            pvals = [pobj(z) for z in coarse]
            zb = float(coarse[int(np.argmin(pvals))])
            pres = minimize(lambda th: pobj(th[0]) if z_range[0] <= th[0] <= z_range[1]
                            else min(pvals) + 1e6, [zb], method="Nelder-Mead",
                            options={"xatol": 1e-4, "maxiter": 120})
            boots.append(float(pres.x[0]) if pres.fun <= min(pvals) else zb)
    z_err = float(np.std(boots, ddof=1)) if boots else math.nan
    return ExponentFit(name="z", value=z_fit, error=z_err, quality=quality,
                       details={"t_min": t_min, "bootstrap": bootstrap})


def fit_beta(
    curves,
    beta_range,
    n_grid: int = 41,
    bootstrap: int = 100,
    seed: int = 0,
):
    """Order-parameter exponent from collapsing ``y / L^beta``.

    The abscissa is left as is; only the vertical scale varies, so the
    fit finds the power of L that stacks the curves on one master curve.
    Curves must carry some positive signal.
    """
    _check_curves(curves)
    if all((np.asarray(y) <= 0).all() for _, (x, y, e) in curves.items()):
        raise ScalingError("observable vanishes everywhere; nothing to rescale")

    def rescale(data, beta):
        out = []
        for L, (x, y, e) in data.items():
            scale = L ** (-beta)
            out.append((np.asarray(x, float), np.asarray(y) * scale,
                        (np.asarray(e) * scale) ** 2))
        return out

    def objective_for(data):
        def objective(beta):
            try:
                return master_curve_quality(rescale(data, beta))[0]
            except ScalingError:
                return math.inf

        return objective

    obj = objective_for(curves)
    bs = np.linspace(beta_range[0], beta_range[1], n_grid)
    vals = [obj(b) for b in bs]
    b0 = float(bs[int(np.argmin(vals))])
    res = minimize(lambda th: obj(th[0]) if beta_range[0] <= th[0] <= beta_range[1]
                   else min(vals) + 1e6, [b0], method="Nelder-Mead",
                   options={"xatol": 1e-5, "maxiter": 300})
    beta, quality = (float(res.x[0]), float(res.fun)) if res.fun <= min(vals) else (b0, float(min(vals)))
    boots = []
    if bootstrap:
        rng = np.random.default_rng(seed)
        coarse = np.linspace(beta_range[0], beta_range[1], max(17, n_grid // 2))
        for _ in range(bootstrap):
            pobj = objective_for(_perturbed(curves, rng))
            pvals = [pobj(b) for b in coarse]
            boots.append(float(coarse[int(np.argmin(pvals))]))
    err = float(np.std(boots, ddof=1)) if boots else math.nan
    return ExponentFit(name="beta", value=beta, error=err, quality=quality,
                       details={"bootstrap": bootstrap})


# -- direct exponent fits ----------------------------------------------------


def _wls_line(x, y, err):
    """Weighted least squares for y = a x + b; returns a, b, sig_a, chi2_red."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if err is None:
        w = np.ones_like(y)
    else:
        err = np.asarray(err, float)
        floor = err[err > 0].min() * 1e-3 if (err > 0).any() else 1.0
        w = 1.0 / np.maximum(err, floor) ** 2
    sw = w.sum()
    mx = (w * x).sum() / sw
    my = (w * y).sum() / sw
    sxx = (w * (x - mx) ** 2).sum()
    if sxx == 0:
        raise ScalingError("degenerate abscissa in line fit")
    a = (w * (x - mx) * (y - my)).sum() / sxx
    b = my - a * mx
    resid = y - (a * x + b)
    dof = max(len(x) - 2, 1)
    chi2_red = float((w * resid ** 2).sum() / dof)
    sig_a = math.sqrt(1.0 / sxx)
    if err is None:
        # scale by residual scatter when no errors are supplied
        sig_a *= math.sqrt(chi2_red)
    return float(a), float(b), float(sig_a), chi2_red


def fit_log_growth(x, y, err=None, window=None):
    """Slope of ``y`` against ``ln x`` (logarithmic growth coefficient).

    ``window=(lo, hi)`` restricts the abscissa range before fitting.
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    err = None if err is None else np.asarray(err, float)
    keep = x > 0
    if window is not None:
        keep &= (x >= window[0]) & (x <= window[1])
    if keep.sum() < 3:
        raise ScalingError("need at least 3 points inside the window")
    a, b, sig, chi2 = _wls_line(np.log(x[keep]), y[keep],
                                None if err is None else err[keep])
    return ExponentFit(name="alpha", value=a, error=sig, quality=chi2,
                       details={"intercept": b, "n_points": int(keep.sum())})


def fit_powerlaw(x, y, err=None, name: str = "eta"):
    """Exponent of a decaying power law ``y ~ x^(-value)`` by log-log fit.

    Non-positive ``y`` values are dropped (their count is reported in
    ``details``); at least 3 positive points are required.  ``quality``
    is the reduced chi-square of the line fit in log-log space; clearly
    curved (e.g. exponential) data shows up as a large value.
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    err = None if err is None else np.asarray(err, float)
    keep = (x > 0) & (y > 0)
    dropped = int(len(y) - keep.sum())
    if keep.sum() < 3:
        raise ScalingError("need at least 3 positive points for a power-law fit")
    ly = np.log(y[keep])
    lerr = None if err is None else err[keep] / y[keep]
    a, b, sig, chi2 = _wls_line(np.log(x[keep]), ly, lerr)
    return ExponentFit(name=name, value=-a, error=sig, quality=chi2,
                       details={"amplitude": math.exp(b), "dropped": dropped,
                                "n_points": int(keep.sum())})


def crossing_points(curves):
    """Pairwise crossings of size curves and their large-size extrapolation.

    For each size pair the difference of the two curves is linearly
    interpolated on the overlap of their abscissas; a sign change locates
    the crossing.  Crossing positions are then regressed against
    ``1 / L_mean`` to give a drift slope and an extrapolated ``x_c``.
    """
    _check_curves(curves)
    sizes = sorted(curves)
    pairs = []
    for i in range(len(sizes)):
        for j in range(i + 1, len(sizes)):
            L1, L2 = sizes[i], sizes[j]
            x1, y1, _ = curves[L1]
            x2, y2, _ = curves[L2]
            lo = max(x1[0], x2[0])
            hi = min(x1[-1], x2[-1])
            if hi <= lo:
                continue
            grid = np.linspace(lo, hi, 512)
            diff = np.interp(grid, x1, y1) - np.interp(grid, x2, y2)
            sign = np.sign(diff)
            flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
            if flips.size == 0:
                if (sign == 0).any():
                    x_cross = float(grid[np.nonzero(sign == 0)[0][0]])
                else:
                    continue
            else:
                k = flips[0]
                f0, f1 = diff[k], diff[k + 1]
                x_cross = float(grid[k] + (grid[k + 1] - grid[k]) * f0 / (f0 - f1))
            pairs.append((L1, L2, x_cross))
    if not pairs:
        raise ScalingError("no curve pair crosses inside the common range")
    inv_l = np.array([2.0 / (a + b) for a, b, _ in pairs])
    xc = np.array([c for _, _, c in pairs])
    if len(pairs) >= 2 and np.ptp(inv_l) > 0:
        drift, intercept, sig, _ = _wls_line(inv_l, xc, None)
        return CrossingReport(pairs=pairs, x_c=float(intercept),
                              drift=float(drift), x_c_err=float(sig * np.ptp(inv_l)))
    return CrossingReport(pairs=pairs, x_c=float(xc.mean()), drift=math.nan)


def lmin_sweep(curves, l_min_values, x_c_range, nu_range, **kwargs):
    """Repeat :func:`collapse_two_param` dropping sizes below each cutoff.

    Returns a list of ``(l_min, CollapseFit)``.  A fit is attempted only
    when at least two sizes survive the cutoff; the sweep is the standard
    check that estimates have stopped drifting with the smallest size
    included.
    """
    out = []
    for l_min in sorted(l_min_values):
        kept = {L: c for L, c in curves.items() if L >= l_min}
        if len(kept) < 2:
            break
        out.append((l_min, collapse_two_param(kept, x_c_range, nu_range, **kwargs)))
    if not out:
        raise ScalingError("no cutoff leaves at least two sizes")
    return out
