"""Sphere-ball intersection geometry for radial integrands.

For a radial density f, the mass inside the off-center ball B_t(x) reduces
to a one-dimensional integral

    mass(|x|, t) = s_{n-1} * int_0^inf f(r) * cap_fraction(|x|, t, r) * r^{n-1} dr,

where cap_fraction is the fraction of the sphere of radius r (centered at
the origin) that lies inside B_t(x).  The fraction is the normalized measure
of a hyperspherical cap, expressed through the regularized incomplete beta
function of sin^2(theta*), with cos(theta*) = (rho^2 + r^2 - t^2)/(2 rho r).

The r-integral has kinks at r = |t - rho| and r = t + rho, and the cap
measure behaves like (distance to the breakpoint)^{(n-1)/2} there, so the
quadrature splits at both breakpoints and uses a square-root substitution on
the two edge pieces; interior pieces use Gauss-Legendre in ln r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING

import numpy as np
from scipy.special import betainc

from .errors import DivergentIntegralError, ParameterError
from .radial import _leggauss01, sphere_surface, unit_ball_volume

if TYPE_CHECKING:  # pragma: no cover
    from .radial import RadialFunction

_EDGE_NODES = 20
_MID_NODES = 10


@dataclass(frozen=True)
class CapKernel:
    """Dimension-bound cap-measure kernel; immutable and thread-safe."""

    n: int

    def __post_init__(self):
        if not (isinstance(self.n, int) and self.n >= 3):
            raise ParameterError(f"cap kernel requires integer dimension n >= 3, got {self.n}")

    @cached_property
    def surface(self) -> float:
        return sphere_surface(self.n)

    @cached_property
    def ball_volume(self) -> float:
        return unit_ball_volume(self.n)

    @cached_property
    def _half_order(self) -> float:
        return (self.n - 1) / 2.0


def cap_fraction(kernel: CapKernel, rho, t, r):
    """Fraction of the sphere of radius r centered at 0 lying inside B_t(x), |x| = rho.

    Equals 1 for r <= t - rho, 0 for |rho - r| >= t on the empty side, and the
    normalized cap measure in between.  Broadcasts over array arguments.
    """
    rho = np.asarray(rho, dtype=float)
    t = np.asarray(t, dtype=float)
    r = np.asarray(r, dtype=float)
    scalar = rho.ndim == 0 and t.ndim == 0 and r.ndim == 0
    rho, t, r = np.atleast_1d(rho), np.atleast_1d(t), np.atleast_1d(r)
    if np.any(t <= 0.0):
        raise ParameterError("ball radius t must be positive")
    if np.any(r <= 0.0):
        raise ParameterError("shell radius r must be positive")
    if np.any(rho < 0.0):
        raise ParameterError("center distance rho must be nonnegative")

    rho, t, r = np.broadcast_arrays(rho, t, r)
    out = np.zeros(rho.shape, dtype=float)

    full = r <= t - rho
    empty = np.abs(rho - r) >= t
    out[full] = 1.0
    partial = ~(full | empty)
    if partial.any():
        rp, tp, rr = rho[partial], t[partial], r[partial]
        # cancellation-free sin^2(theta*) via the factored discriminant
        num = (tp**2 - (rp - rr) ** 2) * ((rp + rr) ** 2 - tp**2)
        den = (2.0 * rp * rr) ** 2
        x = np.clip(num / den, 0.0, 1.0)
        cos_t = (rp**2 + rr**2 - tp**2) / (2.0 * rp * rr)
        half = 0.5 * betainc(kernel._half_order, 0.5, x)
        out[partial] = np.where(cos_t >= 0.0, half, 1.0 - half)
    return float(out[0]) if scalar else out


_MAX_PIECE_LOGWIDTH = 0.5 * math.log(10.0)


def _partial_nodes(f: "RadialFunction", a: float, b: float):
    """Quadrature nodes/weights for int_a^b g(r) dr over the partial shell.

    The interval is split at the grid-cell boundaries it crosses (pieces
    wider than half a decade, possible beyond the grid, are subdivided).
    The two pieces touching the shell edges use a square-root substitution
    for the cap's half-power behavior there; interior pieces integrate in
    ln r with Gauss-Legendre.  Returns flat (r_nodes, weights) arrays.
    """
    pts = f.quad_boundaries
    lo = max(a, 1e-14 * pts[0])
    # the cap's half-power structure at the shell edges lives on the scale of
    # the shell width, so the substituted edge pieces must cover a fixed
    # fraction of it: boundaries inside the edge zones are absorbed
    width_r = b - lo
    lo_zone = min(lo + 0.25 * width_r, 2.0 * lo) if a > 0.0 else lo
    hi_zone = max(b - 0.25 * width_r, 0.5 * b)
    inner = pts[(pts > lo_zone) & (pts < hi_zone)]
    bounds = np.concatenate([[lo], inner, [b]])
    if bounds.size == 2:
        bounds = np.array([bounds[0], math.sqrt(bounds[0] * bounds[1]), bounds[1]])
    # subdivide wide interior pieces geometrically; anchored edge pieces are
    # exempt (the square-root substitution absorbs their width)
    la = np.log(bounds[:-1])
    logw = np.log(bounds[1:]) - la
    nsplit = np.maximum(1, np.ceil(logw / _MAX_PIECE_LOGWIDTH).astype(int))
    nsplit[-1] = 1
    if a > 0.0:
        nsplit[0] = 1
    if int(nsplit.max()) > 1:
        total = int(nsplit.sum())
        starts = np.concatenate([[0], np.cumsum(nsplit)[:-1]])
        within = np.arange(total) - np.repeat(starts, nsplit)
        new_la = np.repeat(la, nsplit) + np.repeat(logw / nsplit, nsplit) * within
        bounds = np.append(np.exp(new_la), bounds[-1])

    npieces = bounds.size - 1
    p0, p1 = bounds[:-1], bounds[1:]
    lo_edge = 0 if a > 0.0 else None
    hi_edge = npieces - 1

    mid_mask = np.ones(npieces, dtype=bool)
    if lo_edge is not None:
        mid_mask[lo_edge] = False
    mid_mask[hi_edge] = False

    chunks_r, chunks_w = [], []
    if mid_mask.any():
        nodes, wts = _leggauss01(_MID_NODES)
        lam_a = np.log(p0[mid_mask])[:, None]
        width = (np.log(p1[mid_mask]) - np.log(p0[mid_mask]))[:, None]
        r = np.exp(lam_a + width * nodes[None, :])
        chunks_r.append(r.ravel())
        chunks_w.append((width * wts[None, :] * r).ravel())
    enodes, ewts = _leggauss01(_EDGE_NODES)
    if lo_edge is not None:
        width = p1[lo_edge] - p0[lo_edge]
        r = p0[lo_edge] + width * enodes**2
        chunks_r.append(r)
        chunks_w.append(2.0 * width * enodes * ewts)
    width = p1[hi_edge] - p0[hi_edge]
    r = p1[hi_edge] - width * enodes**2
    chunks_r.append(r)
    chunks_w.append(2.0 * width * enodes * ewts)
    return np.concatenate(chunks_r), np.concatenate(chunks_w)


def ball_mass_batch(kernel: CapKernel, f: "RadialFunction", rho: float, t_values) -> np.ndarray:
    """Masses of f over B_t(x) for |x| = rho and a batch of radii t.

    Exact on the declared profile model up to quadrature on the partial
    shell, with full-shell content taken from closed-form cumulative masses.
    """
    n = kernel.n
    t_arr = np.atleast_1d(np.asarray(t_values, dtype=float))
    if np.any(t_arr <= 0.0):
        raise ParameterError("ball radius t must be positive")
    if rho < 0.0:
        raise ParameterError("center distance rho must be nonnegative")
    if f.head_exponent >= n and f.values[0] > 0.0 and np.any(t_arr > rho):
        raise DivergentIntegralError(
            f"head exponent {f.head_exponent} >= n = {n}: ball mass covering the origin diverges"
        )

    out = np.zeros(t_arr.size)
    covered = t_arr > rho
    if covered.any():
        out[covered] = f.cumulative_mass(n, np.maximum(t_arr[covered] - rho, 0.0))

    if rho == 0.0:
        return out

    # partial shell |t - rho| < r < t + rho: gather all nodes, one kernel call
    hard_cutoff = math.isinf(f.tail_exponent) or f.values[-1] == 0.0
    node_r, node_w, owners = [], [], []
    for i, t in enumerate(t_arr):
        a, b = abs(t - rho), t + rho
        if hard_cutoff:
            b = min(b, f.grid.r_max)
        if b <= a or b <= 0.0:
            continue
        r_nodes, wts = _partial_nodes(f, a, b)
        node_r.append(r_nodes)
        node_w.append(wts)
        owners.append(np.full(r_nodes.size, i))
    if node_r:
        r_flat = np.concatenate(node_r)
        w_flat = np.concatenate(node_w)
        o_flat = np.concatenate(owners)
        frac = cap_fraction(kernel, rho, t_arr[o_flat], r_flat)
        contrib = f(r_flat) * frac * r_flat ** (n - 1) * w_flat
        partial = np.bincount(o_flat, weights=contrib, minlength=t_arr.size)
        out += kernel.surface * partial
    return out


def ball_mass(kernel: CapKernel, f: "RadialFunction", rho: float, t: float) -> float:
    """Mass of f over the ball of radius t centered at distance rho from the origin."""
    return float(ball_mass_batch(kernel, f, rho, np.array([float(t)]))[0])
