"""Bootstrap orchestration: B resampling draws for any scheme x estimator.

Draws are independent tasks keyed by their index, so results are identical
for any worker count. Failed draws (degenerate weights, solver failures,
singular weight matrices) are recorded and excluded from quantiles rather
than aborting the run, unless they exceed a 20% systematic-failure cap.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data_model import PolyadicSample
from .errors import (
    BootstrapError,
    DegenerateDraw,
    EvalError,
    ParamError,
    SingularDesign,
    SingularWeightMatrix,
    SolverError,
    Unsupported,
)
from .estimators import EstimatorSpec, evaluate_estimator
from .weights import uniform_weights, weights_for_draw

_DRAW_FAILURES = (DegenerateDraw, SolverError, SingularWeightMatrix, SingularDesign)
MAX_FAILURE_SHARE = 0.20


@dataclass(frozen=True)
class BootstrapResult:
    """Point estimate plus the posterior/bootstrap draw matrix."""

    point_estimate: np.ndarray
    draws: np.ndarray  # (successful draws, K)
    method: str
    seed: int
    n_draws_requested: int
    param_names: tuple
    failures: tuple  # (draw index, reason string) pairs
    draw_metadata: tuple  # one info dict per successful draw, in draw order

    @property
    def failed_draw_count(self) -> int:
        return len(self.failures)

    def to_dict(self, emit_draws=False) -> dict:
        out = {
            "method": self.method,
            "seed": self.seed,
            "B": self.n_draws_requested,
            "failed": self.failed_draw_count,
            "param_names": list(self.param_names),
            "point_estimate": self.point_estimate.tolist(),
            "diagnostics": {
                "failures": [list(f) for f in self.failures],
            },
        }
        if emit_draws:
            out["draws"] = self.draws.tolist()
        return out


@dataclass(frozen=True)
class CredibleInterval:
    """Equal-tailed empirical-quantile interval per parameter."""

    level: float
    lower: np.ndarray
    upper: np.ndarray

    def width(self) -> np.ndarray:
        return self.upper - self.lower


@dataclass(frozen=True)
class DiscreteAtomSet:
    """Atoms (locations with masses) of a discrete distribution."""

    locations: np.ndarray  # (A, K)
    masses: np.ndarray  # (A,)

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=np.float64)
        if np.any(m < 0) or abs(m.sum() - 1.0) > 1e-12:
            raise ParamError("masses must be nonnegative and sum to 1")


def _run_draws(sample, spec, scheme, n_draws, seed, alpha, threads):
    def one(b):
        try:
            w = weights_for_draw(sample, scheme, seed, b, alpha=alpha)
            theta, info = evaluate_estimator(spec, sample, w)
            return b, theta, info, None
        except _DRAW_FAILURES as exc:
            return b, None, None, f"{type(exc).__name__}: {exc}"

    if threads is not None and threads <= 1:
        results = [one(b) for b in range(n_draws)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, range(n_draws)))
    results.sort(key=lambda r: r[0])
    return results


def run_bootstrap(
    sample: PolyadicSample,
    spec: EstimatorSpec,
    scheme: str = "bayes",
    n_draws: int = 1000,
    seed: int = 0,
    alpha: float | None = None,
    threads: int | None = None,
) -> BootstrapResult:
    """Run B resampling draws of the estimator under a weighting scheme.

    ``scheme`` is ``bayes``, ``pigeonhole`` or ``prior`` (the Gamma(alpha/n)
    marginal-prior sampler). Draw b uses the substream keyed by (seed, b),
    so the result is reproducible and independent of ``threads``.
    """
    if n_draws < 1:
        raise ParamError("need at least one draw")
    point, _ = evaluate_estimator(spec, sample, uniform_weights(sample))
    results = _run_draws(sample, spec, scheme, n_draws, seed, alpha, threads)

    draws, metadata, failures = [], [], []
    for b, theta, info, err in results:
        if err is None:
            draws.append(theta)
            metadata.append(info)
        else:
            failures.append((b, err))
    if len(failures) > MAX_FAILURE_SHARE * n_draws:
        raise BootstrapError(
            f"{len(failures)} of {n_draws} draws failed; first: {failures[0][1]}"
        )
    method = f"prior({alpha:g})" if scheme == "prior" else scheme
    return BootstrapResult(
        point_estimate=np.asarray(point, dtype=np.float64),
        draws=np.array(draws, dtype=np.float64).reshape(len(draws), len(point)),
        method=method,
        seed=seed,
        n_draws_requested=n_draws,
        param_names=spec.param_names(),
        failures=tuple(failures),
        draw_metadata=tuple(metadata),
    )


def run_marginal_prior(
    sample: PolyadicSample,
    spec: EstimatorSpec,
    alpha: float,
    n_draws: int = 1000,
    seed: int = 0,
    threads: int | None = None,
) -> BootstrapResult:
    """Sample the implied marginal prior along the uninformative limit:
    unit draws are Gamma(alpha/n, 1) instead of Exp(1)."""
    if not alpha > 0:
        raise ParamError("alpha must be > 0")
    return run_bootstrap(
        sample, spec, scheme="prior", n_draws=n_draws, seed=seed, alpha=alpha, threads=threads
    )


def credible_interval(result: BootstrapResult, level: float) -> CredibleInterval:
    """Equal-tailed interval from the empirical draw quantiles
    (linear interpolation between order statistics)."""
    if not 0 < level < 1:
        raise ParamError("level must be in (0, 1)")
    if result.draws.shape[0] < 2:
        raise ParamError("need at least 2 successful draws for quantiles")
    tail = (1.0 - level) / 2.0
    lo, hi = np.quantile(result.draws, [tail, 1.0 - tail], axis=0, method="linear")
    return CredibleInterval(level, lo, hi)


def limiting_prior_atoms(sample: PolyadicSample, rho, chi) -> DiscreteAtomSet:
    """Atoms of the limiting marginal prior for estimators chi(E[rho(X)]).

    Each unordered pair with both directions observed contributes an atom at
    the midpoint of its two one-observation evaluations; a pair with a
    single observed direction contributes that evaluation alone. Masses are
    uniform over contributing pairs.
    """
    if sample.order != 2:
        raise Unsupported("limiting prior atoms are defined for dyadic samples")
    feats = np.asarray(rho(sample.variables), dtype=np.float64)
    if feats.ndim == 1:
        feats = feats[:, None]
    row_of = {}
    for r, (i, j) in enumerate(sample.index.tolist()):
        row_of[(i, j)] = r

    def chi_at(row, pair):
        value = np.atleast_1d(np.asarray(chi(feats[row]), dtype=np.float64))
        if not np.all(np.isfinite(value)):
            labels = (sample.unit_labels[pair[0]], sample.unit_labels[pair[1]])
            raise EvalError(f"chi undefined at the observation for pair {labels}")
        return value

    locations = []
    seen = set()
    for (i, j), r in row_of.items():
        key = (min(i, j), max(i, j))
        if key in seen:
            continue
        seen.add(key)
        r_back = row_of.get((j, i))
        if r_back is None:
            locations.append(chi_at(r, (i, j)))
        else:
            locations.append(0.5 * (chi_at(r, (i, j)) + chi_at(r_back, (j, i))))
    locations = np.asarray(locations)
    masses = np.full(len(locations), 1.0 / len(locations))
    return DiscreteAtomSet(locations, masses)
