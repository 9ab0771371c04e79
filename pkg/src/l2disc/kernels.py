"""Kernel triples (A, B, C) defining each squared L2 discrepancy.

Every measure here admits the same closed form on a point set
``x_1, ..., x_n`` in [0,1]^d:

    D^2 = A  -  (2/n) * sum_i prod_j B_j(x_ij)
             +  (1/n^2) * sum_{i,i'} prod_j C_j(x_ij, x_i'j)

with a constant ``A``, a one-argument factor ``B`` and a symmetric
two-argument factor ``C`` applied coordinate-wise.  The periodic measure has
no B term at all (encoded as ``has_b_term=False``, not as B == 0), and the
weighted variants use per-coordinate factors parametrized by gamma_j.

A KernelSpec also carries the expectation constants

    EB   = E[B(u)]          u uniform on [0,1]
    ECuv = E[C(u, v)]       u, v independent uniform
    ECuu = E[C(u, u)]

precomputed at construction by composite Gauss-Legendre quadrature with
panels split along the kink lines x = 1/2, z = 1/2 and x = z (the kernels
are piecewise polynomial, so the panel quadrature is exact to rounding).
These constants drive the expected squared discrepancy of IID sampling, and
they satisfy ``A - 2*EB^d + ECuv^d = 0`` for every measure — the constant
part of that expectation cancels exactly, which tests verify.

Subgradient conventions used by the derivative factors (relevant only on
measure-zero tie sets): sign(0) = 0 at absolute-value kinks, and ties of
max/min contribute slope one-half.  With these choices the diagonal pair
(i' = k) of the gradient formula is exact, not merely almost-everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .core import MeasureId, ValidationError, WeightVector

__all__ = ["KernelSpec", "kernel_spec", "expectation_constants"]


# ---------------------------------------------------------------------------
# per-measure factor definitions (vectorized over numpy arrays)
# ---------------------------------------------------------------------------


def _sign(x):
    # numpy sign already maps 0 -> 0, the subgradient convention we document
    return np.sign(x)


def _b_star(x):
    return (1.0 - x * x) / 2.0


def _db_star(x):
    return -x


def _c_star(x, z):
    return 1.0 - np.maximum(x, z)


def _dc_star(x, z):
    # d/dx [1 - max(x,z)]: -1 where x > z, -1/2 on the tie, 0 where x < z
    return -((x > z).astype(np.float64)) - 0.5 * (x == z)


def _b_ext(x):
    return x * (1.0 - x) / 2.0


def _db_ext(x):
    return 0.5 - x


def _c_ext(x, z):
    return np.minimum(x, z) - x * z


def _dc_ext(x, z):
    return (x < z).astype(np.float64) + 0.5 * (x == z) - z


def _c_per(x, z):
    t = x - z
    return 0.5 - np.abs(t) + t * t


def _dc_per(x, z):
    t = x - z
    return -_sign(t) + 2.0 * t


def _b_ctr(x):
    u = x - 0.5
    return (np.abs(u) - u * u) / 2.0


def _db_ctr(x):
    u = x - 0.5
    return 0.5 * _sign(u) - u


def _c_ctr(x, z):
    return (np.abs(x - 0.5) + np.abs(z - 0.5) - np.abs(x - z)) / 2.0


def _dc_ctr(x, z):
    return 0.5 * (_sign(x - 0.5) - _sign(x - z))


def _c_cad(x, z):
    # Factor for the discontinuous centered variant: zero unless both
    # arguments sit on the same side of 1/2 (ties at 1/2 count as the
    # upper side), else the smaller distance to that shared side.
    vx = x >= 0.5
    vz = z >= 0.5
    ax = np.where(vx, 1.0 - x, x)
    az = np.where(vz, 1.0 - z, z)
    return (vx == vz) * np.minimum(ax, az)


def _b_sym(x):
    return x * (1.0 - x) / 2.0


def _db_sym(x):
    return 0.5 - x


def _c_sym(x, z):
    return (1.0 - 2.0 * np.abs(x - z)) / 4.0


def _dc_sym(x, z):
    return -0.5 * _sign(x - z)


def _b_mix(x):
    u = x - 0.5
    return 2.0 / 3.0 - np.abs(u) / 4.0 - u * u / 4.0


def _db_mix(x):
    u = x - 0.5
    return -_sign(u) / 4.0 - u / 2.0


def _c_mix(x, z):
    t = np.abs(x - z)
    return (
        7.0 / 8.0
        - (np.abs(x - 0.5) + np.abs(z - 0.5)) / 4.0
        - 0.75 * t
        + 0.5 * t * t
    )


def _dc_mix(x, z):
    return -_sign(x - 0.5) / 4.0 - 0.75 * _sign(x - z) + (x - z)


def _b_asd(x):
    return (1.0 + 2.0 * x - 2.0 * x * x) / 4.0


def _db_asd(x):
    return 0.5 - x


def _c_asd(x, z):
    return (1.0 - np.abs(x - z)) / 2.0


def _dc_asd(x, z):
    return -0.5 * _sign(x - z)


# Unweighted measures: (B, B', C, dC/dx, A(d), continuous, geometric, has_B)
_PLAIN = {
    MeasureId.STAR: (_b_star, _db_star, _c_star, _dc_star, lambda d: 3.0 ** -d, True, True, True),
    MeasureId.EXT: (_b_ext, _db_ext, _c_ext, _dc_ext, lambda d: 12.0 ** -d, True, True, True),
    MeasureId.PER: (None, None, _c_per, _dc_per, lambda d: -(3.0 ** -d), True, True, False),
    MeasureId.CTR: (_b_ctr, _db_ctr, _c_ctr, _dc_ctr, lambda d: 12.0 ** -d, True, True, True),
    MeasureId.CAD: (_b_ext, _db_ext, _c_cad, None, lambda d: 12.0 ** -d, False, True, True),
    MeasureId.SYM: (_b_sym, _db_sym, _c_sym, _dc_sym, lambda d: 12.0 ** -d, True, True, True),
    MeasureId.MIX: (_b_mix, _db_mix, _c_mix, _dc_mix, lambda d: (7.0 / 12.0) ** d, True, False, True),
    MeasureId.ASD: (_b_asd, _db_asd, _c_asd, _dc_asd, lambda d: 3.0 ** -d, True, True, True),
}


@dataclass(frozen=True)
class KernelSpec:
    """A fully resolved kernel triple for one measure in one dimension count.

    The factor callables take the coordinate index ``j`` as their last
    argument; unweighted measures ignore it, weighted ones use it to pick
    gamma_j.  All callables broadcast over numpy arrays.

    ``eb``, ``ec_uv`` and ``ec_uu`` are scalars for unweighted measures and
    length-d arrays for the weighted ones; ``eb`` is None for the measure
    with no B term.  They are filled by quadrature at construction.
    """

    measure: MeasureId
    d: int
    a: float
    continuous: bool
    has_geometric_oracle: bool
    has_b_term: bool
    gamma: Optional[np.ndarray] = field(repr=False, default=None)
    b_col: Optional[Callable] = field(repr=False, default=None)
    b_prime_col: Optional[Callable] = field(repr=False, default=None)
    c_col: Callable = field(repr=False, default=None)
    c_dx_col: Optional[Callable] = field(repr=False, default=None)
    eb: "float | np.ndarray | None" = field(repr=False, default=None)
    ec_uv: "float | np.ndarray" = field(repr=False, default=0.0)
    ec_uu: "float | np.ndarray" = field(repr=False, default=0.0)

    # -- products over coordinates of the expectation constants ------------

    def eb_product(self) -> Optional[float]:
        """prod_j E[B_j(u)], or None when the measure has no B term."""
        if not self.has_b_term:
            return None
        if np.ndim(self.eb) == 0:
            return float(self.eb) ** self.d
        return float(np.prod(self.eb))

    def ecuv_product(self) -> float:
        if np.ndim(self.ec_uv) == 0:
            return float(self.ec_uv) ** self.d
        return float(np.prod(self.ec_uv))

    def ecuu_product(self) -> float:
        if np.ndim(self.ec_uu) == 0:
            return float(self.ec_uu) ** self.d
        return float(np.prod(self.ec_uu))


# ---------------------------------------------------------------------------
# quadrature for the expectation constants
# ---------------------------------------------------------------------------

_GL_ORDER = 24


@lru_cache(maxsize=None)
def _gl_nodes(order: int = _GL_ORDER):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _quad_interval(f, lo: float, hi: float) -> float:
    """Gauss-Legendre integral of f over [lo, hi] (empty intervals -> 0)."""
    if hi <= lo:
        return 0.0
    x, w = _gl_nodes()
    half = (hi - lo) / 2.0
    nodes = lo + half * (x + 1.0)
    return float(half * np.dot(w, f(nodes)))


def _quad_unit_1d(f) -> float:
    """Integral over [0,1] with a panel split at the kink x = 1/2."""
    return _quad_interval(f, 0.0, 0.5) + _quad_interval(f, 0.5, 1.0)


def _quad_triangle(f, lo: float, hi: float, lower: bool) -> float:
    """Integral of f(u, v) over the triangle of [lo,hi]^2 below (lower=True)
    or above the diagonal v = u, via iterated Gauss-Legendre.

    The inner interval collapses linearly toward the corner, which keeps the
    iterated integrand polynomial whenever f is polynomial on the triangle,
    so the rule stays exact to rounding for the kernels here.
    """
    x, w = _gl_nodes()
    half = (hi - lo) / 2.0
    u = lo + half * (x + 1.0)  # outer nodes, shape (k,)
    if lower:
        inner_lo, inner_hi = np.full_like(u, lo), u
    else:
        inner_lo, inner_hi = u, np.full_like(u, hi)
    ihalf = (inner_hi - inner_lo) / 2.0  # (k,)
    v = inner_lo[:, None] + ihalf[:, None] * (x[None, :] + 1.0)  # (k, k)
    vals = f(u[:, None], v)  # (k, k)
    inner = ihalf * (vals @ w)  # (k,)
    return float(half * np.dot(w, inner))


def _quad_rect(f, ulo, uhi, vlo, vhi) -> float:
    x, w = _gl_nodes()
    uh, vh = (uhi - ulo) / 2.0, (vhi - vlo) / 2.0
    u = ulo + uh * (x + 1.0)
    v = vlo + vh * (x + 1.0)
    vals = f(u[:, None], v[None, :])
    return float(uh * vh * np.dot(w, vals @ w))


def _quad_unit_square(f) -> float:
    """Integral over [0,1]^2 with panels split on u=1/2, v=1/2 and u=v."""
    total = 0.0
    halves = ((0.0, 0.5), (0.5, 1.0))
    for ulo, uhi in halves:
        for vlo, vhi in halves:
            if ulo == vlo:  # quadrant touches the diagonal: two triangles
                total += _quad_triangle(f, ulo, uhi, lower=True)
                total += _quad_triangle(f, ulo, uhi, lower=False)
            else:
                total += _quad_rect(f, ulo, uhi, vlo, vhi)
    return total


def _constants_for(
    b_col, c_col, j: int
) -> tuple[Optional[float], float, float]:
    eb = _quad_unit_1d(lambda x: b_col(x, j)) if b_col is not None else None
    ec_uv = _quad_unit_square(lambda u, v: c_col(u, v, j))
    ec_uu = _quad_unit_1d(lambda x: c_col(x, x, j))
    return eb, ec_uv, ec_uu


def expectation_constants(spec: KernelSpec):
    """Recompute (E[B(u)], E[C(u,v)], E[C(u,u)]) for a spec by quadrature.

    Returns scalars for unweighted measures and length-d arrays for the
    weighted ones (None in the first slot when there is no B term).  The
    same routine fills the constants stored on the spec at construction;
    calling it again is the independent route used by verification tests.
    """
    if spec.gamma is None:
        eb, ec_uv, ec_uu = _constants_for(spec.b_col, spec.c_col, 0)
        return eb, ec_uv, ec_uu
    cols = [_constants_for(spec.b_col, spec.c_col, j) for j in range(spec.d)]
    eb = np.array([c[0] for c in cols])
    ec_uv = np.array([c[1] for c in cols])
    ec_uu = np.array([c[2] for c in cols])
    return eb, ec_uv, ec_uu


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def _weighted_factors(measure: MeasureId, gamma: np.ndarray):
    g = gamma

    if measure is MeasureId.CTR_WEIGHTED:

        def b_col(x, j):
            u = np.abs(x - 0.5)
            return 1.0 + (g[j] / 2.0) * (u - u * u)

        def b_prime_col(x, j):
            u = x - 0.5
            return (g[j] / 2.0) * _sign(u) * (1.0 - 2.0 * np.abs(u))

        def c_col(x, z, j):
            return 1.0 + (g[j] / 2.0) * (
                np.abs(x - 0.5) + np.abs(z - 0.5) - np.abs(x - z)
            )

        def c_dx_col(x, z, j):
            return (g[j] / 2.0) * (_sign(x - 0.5) - _sign(x - z))

    else:  # SYM_WEIGHTED

        def b_col(x, j):
            return 1.0 + (g[j] / 2.0) * x * (1.0 - x)

        def b_prime_col(x, j):
            return (g[j] / 2.0) * (1.0 - 2.0 * x)

        def c_col(x, z, j):
            return 1.0 + (g[j] / 4.0) * (1.0 - 2.0 * np.abs(x - z))

        def c_dx_col(x, z, j):
            return -(g[j] / 2.0) * _sign(x - z)

    return b_col, b_prime_col, c_col, c_dx_col


def kernel_spec(
    measure: "MeasureId | str", d: int, gamma=None
) -> KernelSpec:
    """Resolve a measure tag into a concrete kernel triple for dimension d.

    Parameters
    ----------
    measure : MeasureId or str
        One of the ten measure tags.
    d : int
        Number of coordinates, >= 1.
    gamma : array-like or WeightVector, optional
        Length-d nonnegative weights; required for the weighted measures and
        rejected for all others.
    """
    measure = MeasureId.parse(measure)
    d = int(d)
    if d < 1:
        raise ValidationError(f"d must be >= 1, got {d}")

    if measure.weighted:
        if gamma is None:
            raise ValidationError(f"measure {measure} requires a gamma weight vector")
        wv = gamma if isinstance(gamma, WeightVector) else WeightVector(np.asarray(gamma, dtype=np.float64))
        if wv.d != d:
            raise ValidationError(
                f"gamma has length {wv.d} but the point dimension is {d}"
            )
        g = wv.gamma
        b_col, b_prime_col, c_col, c_dx_col = _weighted_factors(measure, g)
        a = float(np.prod(1.0 + g / 12.0))
        spec = KernelSpec(
            measure=measure,
            d=d,
            a=a,
            continuous=True,
            has_geometric_oracle=False,
            has_b_term=True,
            gamma=g,
            b_col=b_col,
            b_prime_col=b_prime_col,
            c_col=c_col,
            c_dx_col=c_dx_col,
        )
    else:
        if gamma is not None:
            raise ValidationError(
                f"measure {measure} does not take a gamma weight vector"
            )
        b, db, c, dc, a_of_d, continuous, geometric, has_b = _PLAIN[measure]

        def wrap1(f):
            return None if f is None else (lambda x, j, _f=f: _f(x))

        def wrap2(f):
            return None if f is None else (lambda x, z, j, _f=f: _f(x, z))

        spec = KernelSpec(
            measure=measure,
            d=d,
            a=float(a_of_d(d)),
            continuous=continuous,
            has_geometric_oracle=geometric,
            has_b_term=has_b,
            gamma=None,
            b_col=wrap1(b),
            b_prime_col=wrap1(db),
            c_col=wrap2(c),
            c_dx_col=wrap2(dc),
        )

    eb, ec_uv, ec_uu = expectation_constants(spec)
    object.__setattr__(spec, "eb", eb)
    object.__setattr__(spec, "ec_uv", ec_uv)
    object.__setattr__(spec, "ec_uu", ec_uu)
    return spec
