"""Counterfactual propagation: push parameter draws through g(data, theta).

The data enter as realized values; only theta varies across draws, so the
induced draw set is the posterior of the counterfactual prediction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import skew

from .bootstrap import BootstrapResult, CredibleInterval
from .data_model import PolyadicSample
from .errors import CounterfactualError, ParamError


@dataclass(frozen=True)
class CounterfactualFn:
    """Named deterministic map (sample, theta) -> m outputs."""

    name: str
    n_outputs: int
    fn: object

    def __call__(self, sample, theta) -> np.ndarray:
        out = np.atleast_1d(np.asarray(self.fn(sample, theta)))
        if out.shape != (self.n_outputs,):
            raise CounterfactualError(
                f"{self.name} returned shape {out.shape}, expected ({self.n_outputs},)"
            )
        return out


@dataclass(frozen=True)
class PredictionDraws:
    """Per-draw counterfactual evaluations plus the point prediction."""

    point: np.ndarray
    draws: np.ndarray  # (B_ok, m)
    dropped: int
    source: BootstrapResult


def _toy_growth(column):
    def fn(sample, theta):
        return np.array([np.exp(theta[0] * float(np.mean(sample.column(column))))])

    return fn


def _identity(dim):
    def fn(sample, theta):
        return np.asarray(theta[:dim], dtype=np.float64)

    return fn


_REGISTRY: dict = {}


def register_counterfactual(name, factory):
    """Register a factory ``(arg) -> CounterfactualFn`` under ``name``."""
    _REGISTRY[name] = factory


register_counterfactual(
    "toy-growth",
    lambda column: CounterfactualFn(f"toy-growth:{column}", 1, _toy_growth(column)),
)
register_counterfactual(
    "identity",
    lambda arg: CounterfactualFn("identity", int(arg) if arg else 1, _identity(int(arg) if arg else 1)),
)


def resolve_counterfactual(spec: str) -> CounterfactualFn:
    """Look up ``name`` or ``name:arg`` in the registry."""
    name, _, arg = spec.partition(":")
    if name not in _REGISTRY:
        raise ParamError(f"unknown counterfactual {name!r}")
    return _REGISTRY[name](arg) if arg else _REGISTRY[name](None)


def propagate(sample: PolyadicSample, result: BootstrapResult, g: CounterfactualFn) -> PredictionDraws:
    """Evaluate g on the original sample once per successful theta-draw.

    Draws with non-finite (or complex) outputs are dropped and counted.
    """
    try:
        point = g(sample, result.point_estimate)
    except Exception as exc:  # noqa: BLE001 - user-supplied g may fail arbitrarily
        raise CounterfactualError(f"{g.name} failed at the point estimate: {exc}") from exc
    if np.iscomplexobj(point) or not np.all(np.isfinite(point)):
        raise CounterfactualError(f"{g.name} is not finite at the point estimate")

    rows = []
    dropped = 0
    for theta in result.draws:
        out = np.atleast_1d(np.asarray(g.fn(sample, theta)))
        if np.iscomplexobj(out) or not np.all(np.isfinite(out)):
            dropped += 1
            continue
        rows.append(np.asarray(out, dtype=np.float64))
    draws = np.array(rows, dtype=np.float64).reshape(len(rows), g.n_outputs)
    return PredictionDraws(point=point, draws=draws, dropped=dropped, source=result)


@dataclass(frozen=True)
class CounterfactualSummary:
    point: np.ndarray
    interval: CredibleInterval
    exceedance: dict  # threshold -> (fractions (m,), mc standard errors (m,))
    skewness: np.ndarray
    n_draws: int
    dropped: int

    def to_dict(self) -> dict:
        return {
            "point": self.point.tolist(),
            "level": self.interval.level,
            "lower": self.interval.lower.tolist(),
            "upper": self.interval.upper.tolist(),
            "exceedance": {
                repr(t): {"probability": p.tolist(), "mc_se": se.tolist()}
                for t, (p, se) in self.exceedance.items()
            },
            "skewness": self.skewness.tolist(),
            "n_draws": self.n_draws,
            "dropped": self.dropped,
        }


def summarize(preds: PredictionDraws, level: float, thresholds=()) -> CounterfactualSummary:
    """Credible interval, exceedance probabilities and skewness per output."""
    b = preds.draws.shape[0]
    if b < 2:
        raise ParamError("need at least 2 prediction draws")
    tail = (1.0 - level) / 2.0
    lo, hi = np.quantile(preds.draws, [tail, 1.0 - tail], axis=0, method="linear")
    exceedance = {}
    for t in thresholds:
        p = (preds.draws > t).mean(axis=0)
        exceedance[float(t)] = (p, np.sqrt(p * (1.0 - p) / b))
    return CounterfactualSummary(
        point=preds.point,
        interval=CredibleInterval(level, lo, hi),
        exceedance=exceedance,
        skewness=np.atleast_1d(skew(preds.draws, axis=0)),
        n_draws=b,
        dropped=preds.dropped,
    )


def ranking_match_fraction(preds: PredictionDraws) -> float:
    """Share of draws whose output ordering matches the point prediction's."""
    ref = np.argsort(preds.point, kind="stable")
    orders = np.argsort(preds.draws, axis=1, kind="stable")
    return float(np.mean(np.all(orders == ref, axis=1)))
