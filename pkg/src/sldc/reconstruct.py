"""Reconstruction kernels for the conservative semi-Lagrangian update.

Two reconstruction roles appear in the scheme:

* the foot integral ``F_i = int_{x_i*}^{x_i} f`` assembled from whole-cell
  sums plus a fractional sub-cell piece (``r1_foot_integral``), and
* interface values of a flux function from its cell averages
  (``r2_interface_from_averages``), which is also the building block of the
  flux-difference source terms in the correction sweeps.

Three kinds are supported: ``linear3`` and ``linear5`` (fixed-stencil, used
for the accuracy studies so the design order is not polluted by nonlinear
weights) and ``weno5`` (Jiang-Shu smoothness weights, eps = 1e-6, power 2).

All stencil coefficients come from exact rational Lagrange integration in
:mod:`sldc.lagrange`; nothing here is hand-typed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lagrange as lag

KINDS = ("linear3", "linear5", "weno5")

WENO_EPS = 1e-6
WENO_POWER = 2

# classic optimal weights for the interface value at the downwind cell edge
WENO_INTERFACE_D = (0.1, 0.6, 0.3)


def check_kind(kind):
    if kind not in KINDS:
        raise ValueError(f"unknown reconstruction kind {kind!r}")
    return kind


def stencil_points(kind) -> int:
    return 3 if kind == "linear3" else 5


@dataclass(frozen=True)
class FootPoint:
    """Departure point split into whole cells and a fraction of one cell."""

    integer_shift: np.ndarray
    fraction: np.ndarray


def decompose_shift(displacement, spacing) -> FootPoint:
    """Split displacement/spacing into floor integer part and [0,1) fraction."""
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    z = np.asarray(displacement, dtype=float) / spacing
    s = np.floor(z)
    frac = z - s
    # guard against frac == 1.0 from roundoff at negative near-integer z
    bump = frac >= 1.0
    if np.any(bump):
        s = np.where(bump, s + 1.0, s)
        frac = np.where(bump, frac - 1.0, frac)
    with np.errstate(invalid="ignore"):  # non-finite inputs surface downstream
        return FootPoint(s.astype(np.int64), frac)


# ---------------------------------------------------------------------------
# coefficient tables (derived once, exact)
# ---------------------------------------------------------------------------

def _poly_map_to_float(polys: dict) -> dict:
    return {o: lag.poly_to_float(p) for o, p in polys.items()}


# sub-cell flux integral Q_j(theta) = int over the trailing theta of cell j,
# from cell averages; offsets are relative to the target cell j
_SUBCELL_CELLS_EXACT = {
    "linear3": lag.subcell_flux_polys((-1, 0, 1)),
    "linear5": lag.subcell_flux_polys((-2, -1, 0, 1, 2)),
}
_SUBCELL_CELLS = {k: _poly_map_to_float(v) for k, v in _SUBCELL_CELLS_EXACT.items()}
_SUBCELL_WENO_SUB_EXACT = [
    lag.subcell_flux_polys(offs) for offs in ((-2, -1, 0), (-1, 0, 1), (0, 1, 2))
]
_SUBCELL_WENO_SUB = [_poly_map_to_float(t) for t in _SUBCELL_WENO_SUB_EXACT]

# node-value machinery for the variable-coefficient path: exact integral of a
# point interpolant over one whole node cell [x_r, x_{r+1}] and over the
# trailing fraction [x_j - theta*dx, x_j]
_NODECELL_W = {
    "linear3": ((-1, 0, 1, 2), lag.point_cell_integral_weights((-1, 0, 1, 2))),
    "linear5": ((-2, -1, 0, 1, 2, 3), lag.point_cell_integral_weights((-2, -1, 0, 1, 2, 3))),
    "weno5": ((-2, -1, 0, 1, 2, 3), lag.point_cell_integral_weights((-2, -1, 0, 1, 2, 3))),
}
_FRACTION_POINTS_EXACT = {
    "linear3": lag.point_fraction_polys((-2, -1, 0, 1)),
    "linear5": lag.point_fraction_polys((-3, -2, -1, 0, 1, 2)),
}
_FRACTION_POINTS = {k: _poly_map_to_float(v) for k, v in _FRACTION_POINTS_EXACT.items()}
# sub-stencil families for the nonlinear fraction integral over
# [x_j - theta, x_j]: the foot cell flips sides with the wind, so positive
# displacements take the left-leaning family and negative ones its mirror
# (one downwind point each; a centred family is downwind-biased for
# positive winds and destabilizes marginal flows)
_FRACTION_WENO_SUB_EXACT = {
    1: [lag.point_fraction_polys(o) for o in ((-3, -2, -1), (-2, -1, 0), (-1, 0, 1))],
    -1: [lag.point_fraction_polys(o) for o in ((-2, -1, 0), (-1, 0, 1), (0, 1, 2))],
}
_FRACTION_WENO_SUB = {
    s: [_poly_map_to_float(t) for t in tables]
    for s, tables in _FRACTION_WENO_SUB_EXACT.items()
}
_FRACTION_WENO_FULL_EXACT = {
    1: lag.point_fraction_polys((-3, -2, -1, 0, 1)),
    -1: lag.point_fraction_polys((-2, -1, 0, 1, 2)),
}

# interface value of h at the right edge of cell 0 from cell averages
_INTERFACE_W = {
    "linear3": ((-1, 0, 1), lag.interface_value_weights((-1, 0, 1))),
    "linear5": ((-2, -1, 0, 1, 2), lag.interface_value_weights((-2, -1, 0, 1, 2))),
}
_INTERFACE_WENO_SUB = [
    (offs, lag.interface_value_weights(offs))
    for offs in ((-2, -1, 0), (-1, 0, 1), (0, 1, 2))
]


def _moment_polys(sub_tables_exact, full_table_exact, values_fn):
    """Per-sub-stencil polynomials of the blend targets on monomial data."""
    out = []
    for power in (3, 4):
        row = []
        for table in list(sub_tables_exact) + [full_table_exact]:
            offs = sorted(table)
            data = values_fn(power, offs)
            acc = lag.ZERO
            for o, v in zip(offs, data):
                acc = lag.poly_add(acc, lag.poly_scale(table[o], v))
            row.append(lag.poly_to_float(acc))
        out.append(row)
    return out


_SUBCELL_MOMENTS = _moment_polys(
    _SUBCELL_WENO_SUB_EXACT,
    lag.subcell_flux_polys((-2, -1, 0, 1, 2)),
    lag.monomial_cell_averages,
)
_FRACTION_MOMENTS = {
    s: _moment_polys(_FRACTION_WENO_SUB_EXACT[s], _FRACTION_WENO_FULL_EXACT[s],
                     lag.monomial_point_values)
    for s in (1, -1)
}


def _blend_weights(theta, moments, guard_lo, guard_hi):
    """Theta-dependent linear blend weights for three sub-stencils.

    Solves the two moment-matching conditions plus normalization.  The system
    degenerates at one end of the theta range (all sub-integrals agree
    there), so theta is clamped away from it; the induced weight error is
    multiplied by sub-integral differences that vanish at the same rate, so
    the clamp is harmless.
    """
    th = np.clip(theta, guard_lo, guard_hi)
    q3 = [np.polynomial.polynomial.polyval(th, p) for p in moments[0]]
    q4 = [np.polynomial.polynomial.polyval(th, p) for p in moments[1]]
    a11 = q3[0] - q3[2]
    a12 = q3[1] - q3[2]
    a21 = q4[0] - q4[2]
    a22 = q4[1] - q4[2]
    b1 = q3[3] - q3[2]
    b2 = q4[3] - q4[2]
    det = a11 * a22 - a12 * a21
    det = np.where(det == 0.0, 1e-300, det)
    d0 = (b1 * a22 - b2 * a12) / det
    d1 = (a11 * b2 - a21 * b1) / det
    d2 = 1.0 - d0 - d1
    d = np.stack([d0, d1, d2])
    d = np.clip(d, 0.0, None)
    d /= np.sum(d, axis=0)
    return d


def subcell_blend_weights(theta):
    """Blend weights for the cell-average sub-cell integral (degenerate at 1)."""
    return _blend_weights(theta, _SUBCELL_MOMENTS, 0.0, 1.0 - 1e-3)


def fraction_blend_weights(theta, wind=1):
    """Blend weights for the point-interpolation fraction of the given wind
    family (each family degenerates at theta -> 0, where any normalized
    weights reproduce the same integral)."""
    return _blend_weights(theta, _FRACTION_MOMENTS[wind], 1e-2, 1.0)


# ---------------------------------------------------------------------------
# WENO smoothness machinery
# ---------------------------------------------------------------------------

def smoothness_indicators(v0, v1, v2, v3, v4):
    """Jiang-Shu indicators of the three 3-point sub-stencils."""
    b0 = 13.0 / 12.0 * (v0 - 2.0 * v1 + v2) ** 2 + 0.25 * (v0 - 4.0 * v1 + 3.0 * v2) ** 2
    b1 = 13.0 / 12.0 * (v1 - 2.0 * v2 + v3) ** 2 + 0.25 * (v1 - v3) ** 2
    b2 = 13.0 / 12.0 * (v2 - 2.0 * v3 + v4) ** 2 + 0.25 * (3.0 * v2 - 4.0 * v3 + v4) ** 2
    return b0, b1, b2


def _nonlinear_weights(betas, d):
    alphas = [dd / (WENO_EPS + bb) ** WENO_POWER for dd, bb in zip(d, betas)]
    total = alphas[0] + alphas[1] + alphas[2]
    return [a / total for a in alphas]


def weno5_weights(window):
    """Nonlinear weights for the interface value from a 5-value window."""
    v0, v1, v2, v3, v4 = (float(v) for v in np.asarray(window, dtype=float))
    betas = smoothness_indicators(v0, v1, v2, v3, v4)
    w = _nonlinear_weights(betas, WENO_INTERFACE_D)
    return np.array(w)


# ---------------------------------------------------------------------------
# periodic tap helpers
# ---------------------------------------------------------------------------

def _tap(values, offset):
    """values shifted so that tap[i] = values[i + offset], periodic, axis 0."""
    if offset == 0:
        return values
    return np.roll(values, -offset, axis=0)


def _gather(values, idx):
    """values[idx[i, ...], ...] along axis 0 with per-entry row indices."""
    if values.ndim == 1:
        return values[idx]
    cols = np.broadcast_to(np.arange(values.shape[1]), values.shape)
    return values[idx, cols]


def _eval_polys(table, theta):
    return {o: np.polynomial.polynomial.polyval(theta, p) for o, p in table.items()}


# ---------------------------------------------------------------------------
# R2: interface values from cell averages
# ---------------------------------------------------------------------------

def _interface_one_sided(avgs, kind, positive):
    """hhat_{i+1/2} for all i, stencil biased for the given wind sign.

    For positive wind the value at the right edge of cell i is reconstructed
    from cells centred on i; for negative wind the mirror image about the
    interface is used.
    """
    if positive:
        pick = lambda off: _tap(avgs, off)
    else:
        # mirror: cell i+1-off plays the role of cell i+off
        pick = lambda off: _tap(avgs, 1 - off)
    if kind in ("linear3", "linear5"):
        offs, w = _INTERFACE_W[kind]
        out = 0.0
        for o, c in zip(offs, w):
            out = out + c * pick(o)
        return out
    taps = {o: pick(o) for o in (-2, -1, 0, 1, 2)}
    betas = smoothness_indicators(taps[-2], taps[-1], taps[0], taps[1], taps[2])
    w = _nonlinear_weights(betas, WENO_INTERFACE_D)
    out = 0.0
    for wr, (offs, cw) in zip(w, _INTERFACE_WENO_SUB):
        sub = 0.0
        for o, c in zip(offs, cw):
            sub = sub + c * taps[o]
        out = out + wr * sub
    return out


def r2_interface_from_averages(cell_averages, wind_sign, kind):
    """Interface values Hhat_{i+1/2} from periodic cell averages.

    ``wind_sign`` may be a scalar, one value per line, or a full per-entry
    array; mixed signs select per-entry between the two one-sided
    reconstructions (lines with a uniform sign are partitioned and solved
    one-sided, which halves the work in the split sweeps).
    """
    check_kind(kind)
    avgs = np.asarray(cell_averages, dtype=float)
    sign = np.asarray(wind_sign)
    if np.all(sign >= 0):
        return _interface_one_sided(avgs, kind, True)
    if np.all(sign < 0):
        return _interface_one_sided(avgs, kind, False)
    if avgs.ndim == 2 and sign.ndim == 1 and sign.shape[0] == avgs.shape[1]:
        out = np.empty_like(avgs)
        posm = sign >= 0
        out[:, posm] = _interface_one_sided(avgs[:, posm], kind, True)
        out[:, ~posm] = _interface_one_sided(avgs[:, ~posm], kind, False)
        return out
    pos = _interface_one_sided(avgs, kind, True)
    neg = _interface_one_sided(avgs, kind, False)
    return np.where(sign >= 0, pos, neg)


def flux_difference(values, wind_sign, kind, spacing):
    """(Hhat_{i+1/2} - Hhat_{i-1/2})/spacing along axis 0, periodic."""
    hhat = r2_interface_from_averages(values, wind_sign, kind)
    return (hhat - np.roll(hhat, 1, axis=0)) / spacing


# ---------------------------------------------------------------------------
# sub-cell flux integral (constant-displacement path)
# ---------------------------------------------------------------------------

def subcell_integral(values, theta, kind):
    """Q_j(theta) for every cell j: integral of h over the trailing theta part.

    ``values`` holds cell averages along axis 0; ``theta`` broadcasts over
    lines.  The result is in units of values*spacing with unit spacing; the
    caller scales.  Exact zero at theta = 0.
    """
    check_kind(kind)
    theta = np.asarray(theta, dtype=float)
    if kind in ("linear3", "linear5"):
        coeffs = _eval_polys(_SUBCELL_CELLS[kind], theta)
        out = 0.0
        for o, c in coeffs.items():
            out = out + c * _tap(values, o)
        return out
    taps = {o: _tap(values, o) for o in (-2, -1, 0, 1, 2)}
    betas = smoothness_indicators(taps[-2], taps[-1], taps[0], taps[1], taps[2])
    d = subcell_blend_weights(theta)
    w = _nonlinear_weights(betas, d)
    out = 0.0
    for wr, table in zip(w, _SUBCELL_WENO_SUB):
        coeffs = _eval_polys(table, theta)
        sub = 0.0
        for o, c in coeffs.items():
            sub = sub + c * taps[o]
        out = out + wr * sub
    return out


# ---------------------------------------------------------------------------
# R1: foot integral from point values (variable-displacement path)
# ---------------------------------------------------------------------------

def _range_sums(values, lo, hi):
    """Signed periodic sums over index ranges [lo, hi) along axis 0.

    ``lo`` and ``hi`` are integer arrays of the output shape; rows index
    axis 0 implicitly (entry [i, ...] sums values[r % n, ...] for r in
    [lo[i], hi[i])), with whole periods contributing the line total.
    """
    n = values.shape[0]
    prefix = np.concatenate([np.zeros((1,) + values.shape[1:]), np.cumsum(values, axis=0)])
    total = prefix[n]

    def cum(t):
        t = np.broadcast_to(t, values.shape)
        q, r = np.divmod(t, n)
        if values.ndim > 1:
            cols = np.broadcast_to(np.arange(values.shape[1]), values.shape)
            base = prefix[r, cols]
        else:
            base = prefix[r]
        return q * total + base

    return cum(hi) - cum(lo)


def _fraction_weno(tap, theta, wind):
    """Nonlinear fraction integral from taps of one wind family."""
    offs = (-3, -2, -1, 0, 1) if wind > 0 else (-2, -1, 0, 1, 2)
    taps = {o: tap(o) for o in offs}
    betas = smoothness_indicators(*(taps[o] for o in offs))
    d = fraction_blend_weights(theta, wind)
    w = _nonlinear_weights(betas, d)
    out = 0.0
    for wr, table in zip(w, _FRACTION_WENO_SUB[wind]):
        sub = 0.0
        for o, p in table.items():
            sub = sub + np.polynomial.polynomial.polyval(theta, p) * taps[o]
        out = out + wr * sub
    return out


def fraction_integral(values, theta, kind, wind=1):
    """J_j(theta) = int_{x_j - theta}^{x_j} of the point interpolant, unit spacing."""
    check_kind(kind)
    theta = np.asarray(theta, dtype=float)
    if kind in ("linear3", "linear5"):
        coeffs = _eval_polys(_FRACTION_POINTS[kind], theta)
        out = 0.0
        for o, c in coeffs.items():
            out = out + c * _tap(values, o)
        return out
    return _fraction_weno(lambda o: _tap(values, o), theta, wind)


def r1_foot_integral(line, foot: FootPoint, spacing, kind):
    """Foot integrals F_i = int_{x_i*}^{x_i} f from point values.

    Whole node cells are integrated with the symmetric interpolatory rule
    (exact to the stencil degree, summed via prefix sums so arbitrary shifts
    cost the same), the fractional piece with the sub-cell interpolant.
    Feet may differ per node.
    """
    check_kind(kind)
    values = np.asarray(line, dtype=float)
    n = values.shape[0]
    s = np.broadcast_to(np.asarray(foot.integer_shift, dtype=np.int64), values.shape)
    theta = np.broadcast_to(np.asarray(foot.fraction, dtype=float), values.shape)
    idx_shape = (n,) + (1,) * (values.ndim - 1)
    i = np.arange(n).reshape(idx_shape)
    offs, w = _NODECELL_W[kind]
    # whole-cell integrals I_r of the point interpolant, summed for
    # r in [i-s, i) through one prefix pass
    cell = 0.0
    for o, c in zip(offs, w):
        cell = cell + c * _tap(values, o)
    whole = _range_sums(cell, i - s, i)
    # fractional piece at the foot node j = i - s, with the coefficient
    # polynomials evaluated at each node's own fraction
    j = i - s

    def tap(off):
        return _gather(values, np.mod(j + off, n))

    if kind in ("linear3", "linear5"):
        frac = 0.0
        for o, p in _FRACTION_POINTS[kind].items():
            frac = frac + np.polynomial.polynomial.polyval(theta, p) * tap(o)
    elif np.all(s >= 0):
        frac = _fraction_weno(tap, theta, 1)
    elif np.all(s < 0):
        frac = _fraction_weno(tap, theta, -1)
    else:
        frac = np.where(s >= 0, _fraction_weno(tap, theta, 1),
                        _fraction_weno(tap, theta, -1))
    return spacing * (whole + frac)
