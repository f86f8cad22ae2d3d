"""Unit-level random draws and normalized observation weights.

Three draw kinds are supported: unit exponentials (whose normalization is a
flat Dirichlet), Gamma(alpha/n, 1) prior draws, and pigeonhole multinomial
counts. An observation's weight is the product of its units' values,
normalized over the observed index set. Products are formed in log space so
that extreme prior draws (tiny alpha) survive without underflow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .data_model import PolyadicSample
from .errors import DegenerateDraw, ParamError

KIND_EXPONENTIAL = "exponential"
KIND_GAMMA = "gamma"
KIND_PIGEONHOLE = "pigeonhole"

# Gamma shapes below this floor are clamped: smaller values are numerically
# indistinguishable in the product-weight limit and risk degenerate streams.
MIN_GAMMA_SHAPE = 1e-6


@dataclass(frozen=True)
class UnitDraw:
    """One vector of nonnegative unit-level values.

    ``log_values`` carries the exact log-scale representation; for tiny-shape
    Gamma draws the linear ``values`` may underflow to 0 while the logs stay
    finite.
    """

    values: np.ndarray
    log_values: np.ndarray
    kind: str
    draw_index: int
    seed: int
    alpha: float | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        lv = np.asarray(self.log_values, dtype=np.float64)
        if v.ndim != 1 or v.shape != lv.shape:
            raise ParamError("values and log_values must be aligned vectors")
        if np.any(v < 0):
            raise ParamError("unit values must be nonnegative")
        v.setflags(write=False)
        lv.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "log_values", lv)

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class ObservationWeights:
    """Normalized weight per observed index tuple."""

    weights: np.ndarray
    scheme: str

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)


def uniform_weights(sample: PolyadicSample) -> ObservationWeights:
    n = sample.n_obs
    return ObservationWeights(np.full(n, 1.0 / n), "uniform")


def draw_exponential_units(n: int, seed: int, b: int) -> UnitDraw:
    """n independent Exp(1) variates from substream ``(seed, b)``.

    Sampled by inverse CDF, -log(1 - U), so the stream is portable across
    platforms and identical for identical ``(seed, b)``.
    """
    if n < 2:
        raise ParamError("need n >= 2 units")
    g = rng.substream(seed, rng.ROLE_UNIT, b)
    u = g.random(n)
    values = -np.log1p(-u)
    with np.errstate(divide="ignore"):
        log_values = np.log(values)
    return UnitDraw(values, log_values, KIND_EXPONENTIAL, b, seed)


def draw_gamma_units(n: int, alpha: float, seed: int, b: int) -> UnitDraw:
    """n independent Gamma(shape=alpha/n, scale=1) variates.

    At alpha = n the distribution equals Exp(1). Sampling uses the shape
    boost V = Y * U**(1/a) with Y ~ Gamma(a + 1), carried in log space so
    shapes as small as the 1e-6 clamp stay usable downstream.
    """
    if n < 2:
        raise ParamError("need n >= 2 units")
    if not alpha > 0:
        raise ParamError(f"alpha must be > 0, got {alpha}")
    a = max(alpha / n, MIN_GAMMA_SHAPE)
    g = rng.substream(seed, rng.ROLE_GAMMA, b)
    y = g.standard_gamma(a + 1.0, n)
    u = 1.0 - g.random(n)  # in (0, 1]
    log_values = np.log(y) + np.log(u) / a
    values = np.exp(log_values)
    return UnitDraw(values, log_values, KIND_GAMMA, b, seed, alpha=alpha)


def draw_pigeonhole_counts(n: int, seed: int, b: int) -> UnitDraw:
    """Multinomial counts of n uniform draws over the n units."""
    if n < 2:
        raise ParamError("need n >= 2 units")
    g = rng.substream(seed, rng.ROLE_PIGEONHOLE, b)
    counts = g.multinomial(n, np.full(n, 1.0 / n)).astype(np.float64)
    with np.errstate(divide="ignore"):
        log_values = np.log(counts)
    return UnitDraw(counts, log_values, KIND_PIGEONHOLE, b, seed)


def _cluster_draw(n_levels: int, seed: int, b: int) -> UnitDraw:
    g = rng.substream(seed, rng.ROLE_CLUSTER, b)
    u = g.random(n_levels)
    values = -np.log1p(-u)
    with np.errstate(divide="ignore"):
        log_values = np.log(values)
    return UnitDraw(values, log_values, KIND_EXPONENTIAL, b, seed)


def _group_draws(sample: PolyadicSample, seed: int, b: int) -> list:
    draws = []
    groups = np.asarray(sample.group_of_unit)
    for g_id in range(sample.n_groups):
        size = int(np.sum(groups == g_id))
        if size < 1:
            raise ParamError(f"group {g_id} has no units")
        gen = rng.substream(seed, rng.ROLE_UNIT, b, lane=g_id)
        u = gen.random(size)
        values = -np.log1p(-u)
        with np.errstate(divide="ignore"):
            log_values = np.log(values)
        draws.append(UnitDraw(values, log_values, KIND_EXPONENTIAL, b, seed))
    return draws


def _normalize(log_products: np.ndarray, scheme: str) -> ObservationWeights:
    m = log_products.max()
    if not np.isfinite(m):
        raise DegenerateDraw("every observed tuple has zero weight")
    w = np.exp(log_products - m)
    w /= w.sum()
    return ObservationWeights(w, scheme)


def product_weights(units: UnitDraw, sample: PolyadicSample) -> ObservationWeights:
    """Weight of tuple k: product of its units' values over the observed sum."""
    if units.n != sample.n_units:
        raise ParamError("unit draw length must equal the number of units")
    log_prod = units.log_values[sample.index].sum(axis=1)
    return _normalize(log_prod, units.kind)


def multiway_weights(
    units: UnitDraw, cluster_draw: UnitDraw, sample: PolyadicSample
) -> ObservationWeights:
    """Product weights times an independent Dirichlet over cluster levels."""
    if sample.cluster_ids is None:
        raise ParamError("sample has no cluster dimension")
    if cluster_draw.n != sample.n_cluster_levels:
        raise ParamError("cluster draw length must equal the level count")
    if units.n != sample.n_units:
        raise ParamError("unit draw length must equal the number of units")
    log_prod = units.log_values[sample.index].sum(axis=1)
    log_prod = log_prod + cluster_draw.log_values[sample.cluster_ids]
    return _normalize(log_prod, units.kind)


def grouped_product_weights(group_draws, sample: PolyadicSample) -> ObservationWeights:
    """Within-group Dirichlet unit weights, then cross-unit products.

    ``group_draws`` holds one draw vector per group (group id order); within
    a group the draw maps to that group's units in ascending unit id order.
    """
    if sample.group_of_unit is None:
        raise ParamError("sample has no unit groups")
    groups = np.asarray(sample.group_of_unit)
    n_groups = sample.n_groups
    if len(group_draws) != n_groups:
        raise ParamError(f"expected {n_groups} group draws, got {len(group_draws)}")
    log_w = np.empty(sample.n_units)
    for g_id in range(n_groups):
        members = np.nonzero(groups == g_id)[0]
        if members.size < 1:
            raise ParamError(f"group {g_id} has no units")
        draw = group_draws[g_id]
        if draw.n != members.size:
            raise ParamError(f"group {g_id} draw length mismatch")
        total = draw.values.sum()
        if not total > 0:
            raise DegenerateDraw(f"group {g_id} draw sums to zero")
        log_w[members] = draw.log_values - np.log(total)
    log_prod = log_w[sample.index].sum(axis=1)
    return _normalize(log_prod, group_draws[0].kind)


def weights_for_draw(
    sample: PolyadicSample, scheme: str, seed: int, b: int, alpha: float | None = None
) -> ObservationWeights:
    """Build the draw-``b`` weights for a resampling scheme.

    ``bayes`` uses exponential unit draws (within-group Dirichlets when the
    sample declares unit groups, and an extra cluster-level Dirichlet when a
    cluster dimension is present). ``prior`` uses Gamma(alpha/n, 1) unit
    draws. ``pigeonhole`` resamples units with replacement and ignores any
    cluster dimension, as in a cluster bootstrap over units.
    """
    if scheme == "pigeonhole":
        w = product_weights(draw_pigeonhole_counts(sample.n_units, seed, b), sample)
        return ObservationWeights(w.weights, "pigeonhole")

    if scheme == "bayes":
        base = "bayes"
        if sample.group_of_unit is not None:
            w = grouped_product_weights(_group_draws(sample, seed, b), sample)
        elif sample.cluster_ids is not None:
            units = draw_exponential_units(sample.n_units, seed, b)
            cdraw = _cluster_draw(sample.n_cluster_levels, seed, b)
            return ObservationWeights(multiway_weights(units, cdraw, sample).weights, base)
        else:
            w = product_weights(draw_exponential_units(sample.n_units, seed, b), sample)
    elif scheme == "prior":
        if alpha is None:
            raise ParamError("prior scheme requires alpha")
        if sample.group_of_unit is not None:
            raise ParamError("prior scheme does not support unit groups")
        base = f"prior({alpha:g})"
        units = draw_gamma_units(sample.n_units, alpha, seed, b)
        if sample.cluster_ids is not None:
            cdraw = _cluster_draw(sample.n_cluster_levels, seed, b)
            return ObservationWeights(multiway_weights(units, cdraw, sample).weights, base)
        w = product_weights(units, sample)
    else:
        raise ParamError(f"unknown scheme {scheme!r}")

    if sample.cluster_ids is not None:
        # grouped + clustered: extra cluster-level Dirichlet on top
        cdraw = _cluster_draw(sample.n_cluster_levels, seed, b)
        log_prod = np.log(w.weights) + cdraw.log_values[sample.cluster_ids]
        w = _normalize(log_prod, base)
    return ObservationWeights(w.weights, base)
