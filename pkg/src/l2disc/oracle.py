"""Monte Carlo geometric oracles for the discrepancy measures.

Each measure with a set-based definition is estimated directly from its
geometry: draw random anchor points, form the test region, compare the
empirical point count against the region volume, and average the squared
local discrepancy.  Nothing here touches the kernel closed forms, so these
estimators serve as an independent check of them.

Test-region conventions per measure (x is a set point, a and b anchors):

  star  half-open box [0, a): membership is x_j < a_j in every coordinate.
  ext   box [a, b) kept only when a <= b coordinate-wise; the indicator
        stays inside the integral (rejected draws contribute zero), matching
        the unnormalized closed form.
  per   coordinate-wise wraparound interval: [a_j, b_j) when a_j <= b_j,
        else [0, b_j) united with [a_j, 1).
  ctr   box between a and its nearest cube vertex; the vertex end is closed
        (membership x_j >= a_j on v_j = 1 coordinates, x_j < a_j on v_j = 0),
        which is the convention consistent with the closed form at boundary
        points.
  cad   box between a and the center plane: [a_j, 1/2) when a_j <= 1/2,
        else [1/2, a_j) — so 1/2 itself belongs to the upper-anchored box.
  sym   union of even orthants: x is inside exactly when the number of
        coordinates with x_j >= a_j is even; its volume has the closed form
        (1 + prod_j (2 a_j - 1)) / 2, which tests verify against an explicit
        sum over even-size vertex subsets.  The raw squared local
        discrepancy of this union integrates to 4^(d-1) times the value the
        sym closed form computes (the classical kernel normalizes by the
        2^(d-1) even orthants; at d = 1 the two coincide, and at one
        hand-checked d = 2 point the ratio is exactly 4), so the estimator
        divides delta by 2^(d-1) to target the same functional as the
        closed form.

All estimators stream through a fixed chunk size with Philox streams keyed
by the seed, so an estimate is a pure function of (inputs, samples, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .core import (
    MeasureId,
    NoGeometricOracleError,
    PointSet,
    ValidationError,
)
from .kernels import KernelSpec, kernel_spec

__all__ = [
    "OracleEstimate",
    "box_membership",
    "local_discrepancy",
    "mc_squared_discrepancy",
    "mc_expected_iid",
    "even_subset_volume",
]

# Fixed accumulation chunk (do not make this configurable: the chunk
# boundaries define the floating-point summation order of an estimate).
_CHUNK = 1 << 16

_GEOMETRIC = (
    MeasureId.STAR,
    MeasureId.EXT,
    MeasureId.PER,
    MeasureId.CTR,
    MeasureId.CAD,
    MeasureId.SYM,
)

_NEEDS_SECOND_ANCHOR = (MeasureId.EXT, MeasureId.PER)


@dataclass(frozen=True)
class OracleEstimate:
    """A Monte Carlo mean with its standard error and provenance."""

    mean: float
    stderr: float
    samples: int
    seed: int

    def agrees_with(self, value: float, sigmas: float = 4.0) -> bool:
        """Whether a candidate value sits within `sigmas` standard errors."""
        return abs(value - self.mean) <= sigmas * self.stderr


def _require_geometric(measure: MeasureId) -> MeasureId:
    measure = MeasureId.parse(measure)
    if measure not in _GEOMETRIC:
        raise NoGeometricOracleError(
            f"measure {measure} has no geometric set definition; "
            "only the kernel closed form applies"
        )
    return measure


def _region_inside_volume(
    measure: MeasureId, coords: np.ndarray, a: np.ndarray, b: "np.ndarray | None"
):
    """Vectorized membership and volume for a batch of test regions.

    coords: (n, d) set points; a, b: (m, d) anchor draws.  Returns
    (inside (m, n) bool, volume (m,), weight (m,)) where weight is the
    ext validity indicator (all-ones elsewhere).
    """
    X = coords[None, :, :]  # (1, n, d)
    A = a[:, None, :]  # (m, 1, d)
    m = a.shape[0]

    if measure is MeasureId.STAR:
        inside = (X < A).all(axis=2)
        volume = a.prod(axis=1)
        weight = np.ones(m)
    elif measure is MeasureId.EXT:
        B = b[:, None, :]
        valid = (a <= b).all(axis=1)
        inside = ((X >= A) & (X < B)).all(axis=2)
        volume = np.where(valid, (b - a).prod(axis=1), 0.0)
        weight = valid.astype(np.float64)
    elif measure is MeasureId.PER:
        B = b[:, None, :]
        plain = a <= b  # (m, d)
        inside = np.where(
            plain[:, None, :], (X >= A) & (X < B), (X < B) | (X >= A)
        ).all(axis=2)
        length = np.where(plain, b - a, 1.0 - a + b)
        volume = length.prod(axis=1)
        weight = np.ones(m)
    elif measure is MeasureId.CTR:
        upper = a >= 0.5  # nearest vertex coordinate is 1
        inside = np.where(upper[:, None, :], X >= A, X < A).all(axis=2)
        volume = np.where(upper, 1.0 - a, a).prod(axis=1)
        weight = np.ones(m)
    elif measure is MeasureId.CAD:
        low = a <= 0.5  # box [a, 1/2), else [1/2, a)
        inside = np.where(
            low[:, None, :], (X >= A) & (X < 0.5), (X >= 0.5) & (X < A)
        ).all(axis=2)
        volume = np.abs(a - 0.5).prod(axis=1)
        weight = np.ones(m)
    elif measure is MeasureId.SYM:
        above = (X >= A).sum(axis=2)  # coordinates on the upper side
        inside = above % 2 == 0
        volume = (1.0 + (2.0 * a - 1.0).prod(axis=1)) / 2.0
        weight = np.ones(m)
    else:  # pragma: no cover - guarded by _require_geometric
        raise NoGeometricOracleError(str(measure))
    return inside, volume, weight


def box_membership(measure: "MeasureId | str", x, a, b=None):
    """Membership of a single point in one test region, with its volume.

    Returns (inside: bool, volume: float).  ``b`` is required for the
    two-anchor measures (ext, per) and rejected otherwise.  For ext an
    inverted anchor pair (some a_j > b_j) is a rejected draw: membership
    is False and the volume is 0, mirroring the indicator inside the
    closed-form integral.
    """
    measure = _require_geometric(measure)
    xa = np.asarray(x, dtype=np.float64).reshape(1, -1)
    aa = np.asarray(a, dtype=np.float64).reshape(1, -1)
    if xa.shape != aa.shape:
        raise ValidationError("point and anchor must share a dimension count")
    if np.any(xa < 0) or np.any(xa > 1) or np.any(aa < 0) or np.any(aa > 1):
        raise ValidationError("point and anchors must lie in [0, 1]^d")
    if measure in _NEEDS_SECOND_ANCHOR:
        if b is None:
            raise ValidationError(f"measure {measure} needs a second anchor b")
        ba = np.asarray(b, dtype=np.float64).reshape(1, -1)
        if ba.shape != aa.shape or np.any(ba < 0) or np.any(ba > 1):
            raise ValidationError("second anchor must lie in [0, 1]^d and match d")
    else:
        if b is not None:
            raise ValidationError(f"measure {measure} takes a single anchor")
        ba = None
    inside, volume, weight = _region_inside_volume(measure, xa, aa, ba)
    return bool(inside[0, 0] and weight[0] > 0.0), float(volume[0] * weight[0])


def local_discrepancy(points: PointSet, inside: np.ndarray, volume: float) -> float:
    """Signed local discrepancy: covered fraction minus region volume."""
    inside = np.asarray(inside, dtype=bool).reshape(-1)
    if inside.size != points.n:
        raise ValidationError(
            f"membership vector has {inside.size} entries for {points.n} points"
        )
    return float(inside.sum()) / points.n - float(volume)


def mc_squared_discrepancy(
    measure: "MeasureId | str", points: PointSet, samples: int, seed: int
) -> OracleEstimate:
    """Monte Carlo estimate of the squared discrepancy from the geometry.

    Draws anchors uniformly, computes the squared local discrepancy of each
    test region (times the validity indicator for ext), and returns the
    sample mean with its standard error.
    """
    measure = _require_geometric(measure)
    samples = int(samples)
    if samples < 2:
        raise ValidationError(f"samples must be >= 2, got {samples}")
    coords = points.coords
    d = points.d
    n = points.n
    gen = np.random.Generator(np.random.Philox(seed))
    two_anchor = measure in _NEEDS_SECOND_ANCHOR
    # sym normalization (see module docstring): the even-orthant union is
    # 2^(d-1) orthants wide, and the closed form measures the per-orthant
    # scale, so its delta shrinks accordingly.
    delta_scale = 0.5 ** (d - 1) if measure is MeasureId.SYM else 1.0

    s1 = 0.0
    s2 = 0.0
    left = samples
    while left > 0:
        m = min(_CHUNK, left)
        a = gen.random((m, d))
        b = gen.random((m, d)) if two_anchor else None
        inside, volume, weight = _region_inside_volume(measure, coords, a, b)
        delta = (inside.sum(axis=1).astype(np.float64) / n - volume) * delta_scale
        g = weight * delta * delta
        s1 += float(g.sum())
        s2 += float((g * g).sum())
        left -= m
    mean = s1 / samples
    var = max(s2 - samples * mean * mean, 0.0) / (samples - 1)
    return OracleEstimate(mean=mean, stderr=math.sqrt(var / samples), samples=samples, seed=int(seed))


def _squared_values_batch(spec: KernelSpec, sets: np.ndarray) -> np.ndarray:
    """Closed-form squared values of a stack of sets, shape (r, n, d) -> (r,)."""
    r, n, d = sets.shape
    acc = np.full(r, spec.a)
    if spec.has_b_term:
        bprod = np.ones((r, n))
        for j in range(d):
            bprod *= spec.b_col(sets[:, :, j], j)
        acc -= 2.0 * bprod.sum(axis=1) / n
    cmat = np.ones((r, n, n))
    for j in range(d):
        col = sets[:, :, j]
        cmat *= spec.c_col(col[:, :, None], col[:, None, :], j)
    acc += cmat.sum(axis=(1, 2)) / (n * n)
    return acc


def mc_expected_iid(
    measure: "MeasureId | str",
    n: int,
    d: int,
    replications: int,
    seed: int,
    gamma=None,
) -> OracleEstimate:
    """Monte Carlo estimate of E[D^2] over IID uniform sets of size n.

    Draws `replications` independent n-point sets, evaluates the closed form
    on each, and averages.  Covers every measure (including those without a
    geometric definition), so it arbitrates the expectation identity.
    """
    spec = kernel_spec(measure, d, gamma=gamma)
    n = int(n)
    replications = int(replications)
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    if replications < 2:
        raise ValidationError(f"replications must be >= 2, got {replications}")
    gen = np.random.Generator(np.random.Philox(seed))

    # keep chunk * n * n floats bounded; fixed policy so streams reproduce
    chunk = max(1, min(4096, (1 << 22) // max(n * n, 1)))
    s1 = 0.0
    s2 = 0.0
    left = replications
    while left > 0:
        r = min(chunk, left)
        sets = gen.random((r, n, d))
        vals = _squared_values_batch(spec, sets)
        s1 += float(vals.sum())
        s2 += float((vals * vals).sum())
        left -= r
    mean = s1 / replications
    var = max(s2 - replications * mean * mean, 0.0) / (replications - 1)
    return OracleEstimate(
        mean=mean,
        stderr=math.sqrt(var / replications),
        samples=replications,
        seed=int(seed),
    )


def even_subset_volume(a) -> float:
    """Volume of the even-reflection union by explicit vertex-subset summation.

    Sums, over every even-size subset S of coordinates, the volume of the
    cell {x : x_j >= a_j exactly for j in S}.  Exponential in d; exists as
    the independent check of the closed-form volume used by the sym oracle.
    """
    arr = np.asarray(a, dtype=np.float64).reshape(-1)
    d = arr.size
    if d > 20:
        raise ValidationError("subset summation is exponential in d; d > 20 refused")
    total = 0.0
    for size in range(0, d + 1, 2):
        for subset in combinations(range(d), size):
            vol = 1.0
            for j in range(d):
                vol *= (1.0 - arr[j]) if j in subset else arr[j]
            total += vol
    return total
