"""Weighted structural estimators: mean, OLS, PPML, and the GMM family.

Every estimator is a pure function of a sample and a normalized weight
vector, so the same code path serves the uniform-weight point estimate and
every resampling draw. GMM supports one-step (identity weight matrix),
two-step (centered weight matrix re-estimated at the step-1 solution), and
iterated modes; just-identified systems are solved directly as moment
roots, where the weight matrix is irrelevant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data_model import PolyadicSample
from .errors import (
    DataError,
    ParamError,
    SingularDesign,
    SingularWeightMatrix,
    SolverError,
)

COND_LIMIT = 1e12
RIDGE_FLOOR = 1e-12


@dataclass(frozen=True)
class MomentFunction:
    """Moment equations psi mapping (observation variables, theta) -> R^L.

    ``fn`` is vectorized over observations: (variables (N, V), theta (K,))
    -> (N, L). ``jacobian``, when given, returns per-observation L x K
    derivative blocks and must match finite differences to 1e-5 relative.
    ``residual_instrument`` exposes the (e, Z) decomposition required by the
    acm-style weight matrix.
    """

    name: str
    n_moments: int
    n_params: int
    fn: object
    jacobian: object = None
    residual_instrument: object = None

    def __post_init__(self):
        if self.n_moments < self.n_params:
            raise ParamError("need at least as many moments as parameters (L >= K)")

    @property
    def just_identified(self) -> bool:
        return self.n_moments == self.n_params


@dataclass(frozen=True)
class GmmWeightMatrix:
    """L x L symmetric PSD weight matrix with provenance."""

    matrix: np.ndarray
    style: str
    ridged: bool = False


@dataclass(frozen=True)
class SolverSettings:
    foc_tol: float = 1e-8
    root_tol: float = 1e-10
    max_iter: int = 100
    iter_tol: float = 1e-8
    iter_max: int = 50
    init: tuple | None = None


@dataclass(frozen=True)
class EstimatorSpec:
    """Declarative description of the estimator functional.

    ``kind`` is one of ``mean``, ``ols``, ``ppml``, ``gmm``. For GMM either
    pass a ready ``moment`` or name a builtin (``ols``, ``ppml``,
    ``linear-iv``) resolved against the sample's columns.
    """

    kind: str
    column: str | None = None
    y: str | None = None
    x: tuple = ()
    intercept: bool = False
    moment: MomentFunction | None = None
    builtin_moment: str | None = None
    instruments: tuple = ()
    gmm_mode: str = "two-step"
    weight_style: str = "centered"
    settings: SolverSettings = field(default_factory=SolverSettings)

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(self.x))
        object.__setattr__(self, "instruments", tuple(self.instruments))
        if self.kind == "mean":
            if not self.column:
                raise ParamError("mean estimator needs a column")
        elif self.kind in ("ols", "ppml"):
            if not self.y or (len(self.x) < 1 and not self.intercept):
                raise ParamError(f"{self.kind} needs a y column and >= 1 regressor")
        elif self.kind == "gmm":
            if self.moment is None and self.builtin_moment is None:
                raise ParamError("gmm needs a moment function")
            if self.gmm_mode not in ("one-step", "two-step", "iterated"):
                raise ParamError(f"unknown gmm mode {self.gmm_mode!r}")
            if self.weight_style not in ("centered", "acm"):
                raise ParamError(f"unknown weight style {self.weight_style!r}")
        else:
            raise ParamError(f"unknown estimator kind {self.kind!r}")

    def param_names(self) -> tuple:
        if self.kind == "mean":
            return (self.column,)
        if self.kind in ("ols", "ppml"):
            return (("intercept",) if self.intercept else ()) + self.x
        k = self.moment.n_params if self.moment is not None else None
        if k is None:
            k = len(self.x) + (1 if self.intercept else 0)
        return tuple(f"theta{i}" for i in range(k))


# ---------------------------------------------------------------------------
# moment builders


def _indices(variable_names, columns):
    names = list(variable_names)
    out = []
    for c in columns:
        if c not in names:
            raise DataError(f"unknown variable column {c!r}")
        out.append(names.index(c))
    return out


def _design(variables, cols, intercept):
    x = variables[:, cols]
    if intercept:
        x = np.column_stack([np.ones(len(x)), x])
    return x


def mean_moment(variable_names, column) -> MomentFunction:
    """psi = x - theta; the root is the weighted mean."""
    (j,) = _indices(variable_names, [column])

    def fn(variables, theta):
        return (variables[:, j] - theta[0])[:, None]

    def jac(variables, theta):
        return np.full((variables.shape[0], 1, 1), -1.0)

    return MomentFunction("mean", 1, 1, fn, jacobian=jac)


def ols_moment(variable_names, y, x_columns, intercept=False) -> MomentFunction:
    """psi = (y - x'theta) x."""
    (jy,) = _indices(variable_names, [y])
    jx = _indices(variable_names, x_columns)
    k = len(jx) + (1 if intercept else 0)

    def fn(variables, theta):
        x = _design(variables, jx, intercept)
        resid = variables[:, jy] - x @ theta
        return resid[:, None] * x

    def jac(variables, theta):
        x = _design(variables, jx, intercept)
        return -x[:, :, None] * x[:, None, :]

    def resid_instr(variables, theta):
        x = _design(variables, jx, intercept)
        return variables[:, jy] - x @ theta, x

    return MomentFunction("ols", k, k, fn, jacobian=jac, residual_instrument=resid_instr)


def ppml_moment(variable_names, y, x_columns, intercept=False) -> MomentFunction:
    """psi = (y - exp(x'theta)) x, the pseudo-Poisson first-order condition."""
    (jy,) = _indices(variable_names, [y])
    jx = _indices(variable_names, x_columns)
    k = len(jx) + (1 if intercept else 0)

    def fn(variables, theta):
        x = _design(variables, jx, intercept)
        with np.errstate(over="ignore"):
            mu = np.exp(x @ theta)
        return (variables[:, jy] - mu)[:, None] * x

    def jac(variables, theta):
        x = _design(variables, jx, intercept)
        with np.errstate(over="ignore"):
            mu = np.exp(x @ theta)
        return -(mu[:, None, None] * x[:, :, None] * x[:, None, :])

    def resid_instr(variables, theta):
        x = _design(variables, jx, intercept)
        with np.errstate(over="ignore"):
            mu = np.exp(x @ theta)
        return variables[:, jy] - mu, x

    return MomentFunction("ppml", k, k, fn, jacobian=jac, residual_instrument=resid_instr)


def linear_iv_moment(variable_names, y, regressors, instruments, intercept=False) -> MomentFunction:
    """psi = (y - r'theta) z with L = len(instruments) (+ intercept)."""
    (jy,) = _indices(variable_names, [y])
    jr = _indices(variable_names, regressors)
    jz = _indices(variable_names, instruments)
    k = len(jr) + (1 if intercept else 0)
    n_mom = len(jz) + (1 if intercept else 0)
    if n_mom < k:
        raise ParamError("need at least as many instruments as regressors")

    def fn(variables, theta):
        r = _design(variables, jr, intercept)
        z = _design(variables, jz, intercept)
        return (variables[:, jy] - r @ theta)[:, None] * z

    def jac(variables, theta):
        r = _design(variables, jr, intercept)
        z = _design(variables, jz, intercept)
        return -z[:, :, None] * r[:, None, :]

    def resid_instr(variables, theta):
        r = _design(variables, jr, intercept)
        z = _design(variables, jz, intercept)
        return variables[:, jy] - r @ theta, z

    return MomentFunction("linear-iv", n_mom, k, fn, jacobian=jac, residual_instrument=resid_instr)


BUILTIN_MOMENTS = ("ols", "ppml", "linear-iv")


def build_moment(spec: EstimatorSpec, sample: PolyadicSample) -> MomentFunction:
    """Resolve the estimator's moment equations against the sample's columns."""
    if spec.kind == "mean":
        return mean_moment(sample.variable_names, spec.column)
    if spec.kind == "ols":
        return ols_moment(sample.variable_names, spec.y, spec.x, spec.intercept)
    if spec.kind == "ppml":
        return ppml_moment(sample.variable_names, spec.y, spec.x, spec.intercept)
    if spec.moment is not None:
        return spec.moment
    name = spec.builtin_moment
    if name == "ols":
        return ols_moment(sample.variable_names, spec.y, spec.x, spec.intercept)
    if name == "ppml":
        return ppml_moment(sample.variable_names, spec.y, spec.x, spec.intercept)
    if name == "linear-iv":
        return linear_iv_moment(
            sample.variable_names, spec.y, spec.x, spec.instruments, spec.intercept
        )
    raise ParamError(f"unknown builtin moment {name!r}")


# ---------------------------------------------------------------------------
# moment arithmetic


def moment_mean(moment, variables, weights, theta) -> np.ndarray:
    return weights @ moment.fn(variables, theta)


def moment_mean_jacobian(moment, variables, weights, theta) -> np.ndarray:
    """d/dtheta of the weighted mean moment, (L, K)."""
    if moment.jacobian is not None:
        blocks = moment.jacobian(variables, theta)
        return np.einsum("n,nlk->lk", weights, blocks)
    return _fd_mean_jacobian(moment, variables, weights, theta)


def _fd_mean_jacobian(moment, variables, weights, theta):
    k = moment.n_params
    out = np.empty((moment.n_moments, k))
    for j in range(k):
        h = 1e-6 * (1.0 + abs(theta[j]))
        tp, tm = theta.copy(), theta.copy()
        tp[j] += h
        tm[j] -= h
        out[:, j] = (
            moment_mean(moment, variables, weights, tp)
            - moment_mean(moment, variables, weights, tm)
        ) / (2 * h)
    return out


def observation_jacobian(moment, variables, theta) -> np.ndarray:
    """Per-observation Jacobian blocks (N, L, K), finite differences if needed."""
    if moment.jacobian is not None:
        return moment.jacobian(variables, theta)
    n, k = variables.shape[0], moment.n_params
    out = np.empty((n, moment.n_moments, k))
    for j in range(k):
        h = 1e-6 * (1.0 + abs(theta[j]))
        tp, tm = theta.copy(), theta.copy()
        tp[j] += h
        tm[j] -= h
        out[:, :, j] = (moment.fn(variables, tp) - moment.fn(variables, tm)) / (2 * h)
    return out


# ---------------------------------------------------------------------------
# closed-form estimators


def weighted_mean(sample: PolyadicSample, weights, column) -> float:
    """Sum of weight * value over observed tuples."""
    return float(weights.weights @ sample.column(column))


def weighted_ols(sample: PolyadicSample, weights, y, x_columns, intercept=False) -> np.ndarray:
    """Solve the weighted normal equations (sum w x x') theta = sum w x y."""
    x = sample.columns(x_columns)
    if intercept:
        x = np.column_stack([np.ones(sample.n_obs), x])
    w = weights.weights
    gram = x.T @ (w[:, None] * x)
    if not np.all(np.isfinite(gram)) or np.linalg.cond(gram) >= COND_LIMIT:
        raise SingularDesign("weighted Gram matrix is numerically singular")
    rhs = x.T @ (w * sample.column(y))
    return np.linalg.solve(gram, rhs)


def weighted_ppml(
    sample: PolyadicSample, weights, y, x_columns, intercept=False, settings=None
) -> tuple:
    """Damped Newton on the weighted PPML moment; returns (theta, iterations).

    Initialized at the weighted OLS of log(y + 1) on the regressors; declares
    convergence when the moment residual's max norm is at or below 1e-8.
    """
    settings = settings or SolverSettings()
    yv = sample.column(y)
    if np.any(yv < 0):
        raise DataError("ppml requires a nonnegative dependent variable")
    if not np.any(yv > 0):
        raise SolverError("ppml is undefined for an all-zero dependent variable")
    x = sample.columns(x_columns)
    if intercept:
        x = np.column_stack([np.ones(sample.n_obs), x])
    w = weights.weights

    gram = x.T @ (w[:, None] * x)
    if not np.all(np.isfinite(gram)) or np.linalg.cond(gram) >= COND_LIMIT:
        raise SingularDesign("ppml design is collinear")
    theta = np.linalg.solve(gram, x.T @ (w * np.log1p(yv)))

    def residual(t):
        with np.errstate(over="ignore"):
            mu = np.exp(x @ t)
        return (w * (yv - mu)) @ x, mu

    m, mu = residual(theta)
    tol = 1e-8
    for it in range(settings.max_iter):
        norm = np.max(np.abs(m)) if np.all(np.isfinite(m)) else np.inf
        if norm <= tol:
            return theta, it
        jac = -(x.T @ ((w * mu)[:, None] * x))
        try:
            step = np.linalg.solve(jac, -m)
        except np.linalg.LinAlgError:
            raise SolverError("singular ppml Jacobian", residual=norm) from None
        t = 1.0
        for _ in range(40):
            cand = theta + t * step
            m_new, mu_new = residual(cand)
            new_norm = np.max(np.abs(m_new)) if np.all(np.isfinite(m_new)) else np.inf
            if new_norm < norm:
                theta, m, mu = cand, m_new, mu_new
                break
            t *= 0.5
        else:
            raise SolverError("ppml line search stalled", residual=norm)
    norm = float(np.max(np.abs(m)))
    if norm <= tol:
        return theta, settings.max_iter
    raise SolverError(f"ppml did not converge (residual {norm:.3e})", residual=norm)


# ---------------------------------------------------------------------------
# GMM weight matrices


def _invert_psd(cov, style) -> GmmWeightMatrix:
    cov = 0.5 * (cov + cov.T)
    if not np.all(np.isfinite(cov)):
        raise SingularWeightMatrix("non-finite moment covariance")
    eigval, eigvec = np.linalg.eigh(cov)
    lam_max = eigval[-1]
    if not lam_max > 0:
        raise SingularWeightMatrix("moment covariance has no positive eigenvalue")
    floor = RIDGE_FLOOR * lam_max
    ridged = bool(np.any(eigval < floor))
    clipped = np.maximum(eigval, floor)
    matrix = (eigvec / clipped) @ eigvec.T
    return GmmWeightMatrix(0.5 * (matrix + matrix.T), style, ridged)


def centered_weight_matrix(moment, sample, weights, theta) -> GmmWeightMatrix:
    """Inverse of the moment covariance centered at the weighted moment mean."""
    theta = np.asarray(theta, dtype=np.float64)
    psi = moment.fn(sample.variables, theta)
    psibar = weights.weights @ psi
    centered = psi - psibar
    cov = centered.T @ (weights.weights[:, None] * centered)
    return _invert_psd(np.atleast_2d(cov), "centered")


def acm_weight_matrix(moment, sample, weights, theta) -> GmmWeightMatrix:
    """Inverse of (weighted mean squared residual) times (weighted Z Z')."""
    if moment.residual_instrument is None:
        raise ParamError("acm-style weight matrix needs a residual x instrument moment")
    theta = np.asarray(theta, dtype=np.float64)
    e, z = moment.residual_instrument(sample.variables, theta)
    s2 = float(weights.weights @ (e * e))
    zz = z.T @ (weights.weights[:, None] * z)
    return _invert_psd(s2 * np.atleast_2d(zz), "acm")


# ---------------------------------------------------------------------------
# solvers


def solve_z(moment, sample, weights, init=None, settings=None) -> tuple:
    """Newton root of the just-identified weighted moment; (theta, iterations).

    Central-difference Jacobian with step 1e-6 (1 + |theta_j|), halving line
    search on residual increase, convergence at max-norm <= root_tol.
    """
    settings = settings or SolverSettings()
    if not moment.just_identified:
        raise ParamError("solve_z requires a just-identified moment (L = K)")
    variables, w = sample.variables, weights.weights
    theta = np.zeros(moment.n_params) if init is None else np.asarray(init, dtype=np.float64).copy()

    def merit(m):
        return float(m @ m) if np.all(np.isfinite(m)) else np.inf

    m = moment_mean(moment, variables, w, theta)
    for it in range(settings.max_iter):
        if np.all(np.isfinite(m)) and np.max(np.abs(m)) <= settings.root_tol:
            return theta, it
        jac = _fd_mean_jacobian(moment, variables, w, theta)
        grad = jac.T @ m  # gradient of the squared-residual merit (up to 2x)
        try:
            step = np.linalg.solve(jac, -m)
        except np.linalg.LinAlgError:
            step = None
        if step is None or step @ grad >= 0:
            # Newton direction unavailable or not a descent direction
            step = -grad
            if not np.any(step):
                raise SolverError(
                    "stationary point of the moment residual", residual=float(np.max(np.abs(m)))
                )
        base = merit(m)
        t = 1.0
        for _ in range(60):
            cand = theta + t * step
            m_new = moment_mean(moment, variables, w, cand)
            if merit(m_new) < base:
                theta, m = cand, m_new
                break
            t *= 0.5
        else:
            raise SolverError(
                "Newton line search stalled", residual=float(np.max(np.abs(m)))
            )
    norm = float(np.max(np.abs(m)))
    if norm <= settings.root_tol:
        return theta, settings.max_iter
    raise SolverError(f"moment root not found (residual {norm:.3e})", residual=norm)


def _gauss_newton(moment, variables, w, weight_matrix, init, settings):
    """Minimize psibar' W psibar from one start; returns (theta, Q, converged)."""
    theta = np.asarray(init, dtype=np.float64).copy()
    wm = weight_matrix

    def q_of(m):
        return float(m @ wm @ m)

    m = moment_mean(moment, variables, w, theta)
    q = q_of(m)
    converged = False
    for _ in range(settings.max_iter):
        jac = _fd_mean_jacobian(moment, variables, w, theta)
        grad = jac.T @ (wm @ m)
        if np.max(np.abs(grad)) <= settings.foc_tol:
            converged = True
            break
        hess = jac.T @ wm @ jac
        try:
            step = np.linalg.solve(hess, -grad)
        except np.linalg.LinAlgError:
            step = -grad
        t = 1.0
        improved = False
        for _ in range(40):
            cand = theta + t * step
            m_new = moment_mean(moment, variables, w, cand)
            q_new = q_of(m_new) if np.all(np.isfinite(m_new)) else np.inf
            if q_new < q:
                theta, m, q = cand, m_new, q_new
                improved = True
                break
            t *= 0.5
        if not improved:
            # stuck at a point with a nonzero gradient: treat as stalled
            break
    else:
        jac = _fd_mean_jacobian(moment, variables, w, theta)
        converged = np.max(np.abs(jac.T @ (wm @ m))) <= settings.foc_tol
    return theta, q, converged


def _minimize_gmm(moment, sample, weights, weight_matrix, settings):
    """Multi-start Gauss-Newton on the GMM quadratic form."""
    starts = [np.zeros(moment.n_params)]
    if settings.init is not None:
        starts.insert(0, np.asarray(settings.init, dtype=np.float64))
    best = None
    for start in starts:
        theta, q, ok = _gauss_newton(
            moment, sample.variables, weights.weights, weight_matrix, start, settings
        )
        if ok and (best is None or q < best[1]):
            best = (theta, q)
    if best is None:
        raise SolverError("GMM minimization did not reach the first-order conditions")
    return best[0]


def gmm_one_step(moment, sample, weights, settings=None) -> np.ndarray:
    """Minimize psibar' psibar (identity weight matrix)."""
    settings = settings or SolverSettings()
    if moment.just_identified:
        theta, _ = solve_z(moment, sample, weights, init=settings.init, settings=settings)
        return theta
    return _minimize_gmm(moment, sample, weights, np.eye(moment.n_moments), settings)


def gmm_two_step(moment, sample, weights, settings=None) -> np.ndarray:
    """Two-step GMM: identity weight matrix, then the centered inverse
    covariance evaluated at the step-1 solution."""
    theta, _ = _gmm_two_step_info(moment, sample, weights, settings)
    return theta


def _gmm_two_step_info(moment, sample, weights, settings=None):
    settings = settings or SolverSettings()
    if moment.just_identified:
        theta, iters = solve_z(moment, sample, weights, init=settings.init, settings=settings)
        return theta, {"iterations": iters}
    theta1 = _minimize_gmm(moment, sample, weights, np.eye(moment.n_moments), settings)
    omega = centered_weight_matrix(moment, sample, weights, theta1)
    settings2 = SolverSettings(
        foc_tol=settings.foc_tol,
        root_tol=settings.root_tol,
        max_iter=settings.max_iter,
        init=tuple(theta1),
    )
    theta = _minimize_gmm(moment, sample, weights, omega.matrix, settings2)
    return theta, {"weight_matrix_ridged": omega.ridged}


def gmm_iterated(moment, sample, weights, settings=None, weight_style="centered") -> tuple:
    """Iterate theta- and weight-matrix updates to a fixed point.

    Starts from the identity weight matrix. Returns
    (theta, iterations, objective_trace).
    """
    settings = settings or SolverSettings()
    if moment.just_identified:
        theta, _ = solve_z(moment, sample, weights, init=settings.init, settings=settings)
        return theta, 1, []
    if weight_style == "acm" and moment.residual_instrument is None:
        raise ParamError("acm-style iteration needs a residual x instrument moment")

    theta = _minimize_gmm(moment, sample, weights, np.eye(moment.n_moments), settings)
    trace = []
    for it in range(1, settings.iter_max + 1):
        if weight_style == "acm":
            omega = acm_weight_matrix(moment, sample, weights, theta)
        else:
            omega = centered_weight_matrix(moment, sample, weights, theta)
        inner = SolverSettings(
            foc_tol=settings.foc_tol,
            root_tol=settings.root_tol,
            max_iter=settings.max_iter,
            init=tuple(theta),
        )
        theta_new = _minimize_gmm(moment, sample, weights, omega.matrix, inner)
        m = moment_mean(moment, sample.variables, weights.weights, theta_new)
        trace.append(float(m @ omega.matrix @ m))
        delta = np.linalg.norm(theta_new - theta)
        theta = theta_new
        if delta <= settings.iter_tol:
            return theta, it, trace
    raise SolverError("iterated GMM did not reach a fixed point", trace=trace)


# ---------------------------------------------------------------------------
# stacked just-identified representation of two-step GMM


def stacked_two_step_moment(moment) -> MomentFunction:
    """The two-step GMM estimator as one just-identified system.

    Parameters are packed as [theta1 (K), theta2 (K), m (L), Omega (L*L,
    the centered moment covariance at theta1), G1 (L*K), G2 (L*K)]. The
    final block imposes the step-2 first-order condition
    G2' Omega^{-1} psi(theta2) = 0, so the theta2 component of the root
    reproduces two-step GMM.
    """
    L, K = moment.n_moments, moment.n_params
    dim = 2 * K + L + L * L + 2 * L * K

    def unpack(params):
        i = 0
        theta1 = params[i : i + K]
        i += K
        theta2 = params[i : i + K]
        i += K
        m = params[i : i + L]
        i += L
        omega = params[i : i + L * L].reshape(L, L)
        i += L * L
        g1 = params[i : i + L * K].reshape(L, K)
        i += L * K
        g2 = params[i : i + L * K].reshape(L, K)
        return theta1, theta2, m, omega, g1, g2

    def fn(variables, params):
        theta1, theta2, m, omega, g1, g2 = unpack(params)
        n = variables.shape[0]
        psi1 = moment.fn(variables, theta1)
        psi2 = moment.fn(variables, theta2)
        j1 = observation_jacobian(moment, variables, theta1)
        j2 = observation_jacobian(moment, variables, theta2)
        omega_s = 0.5 * (omega + omega.T)
        try:
            a = np.linalg.solve(omega_s, g2)
        except np.linalg.LinAlgError:
            raise SolverError("stacked system: covariance block not invertible") from None
        centered = psi1 - m
        blocks = [
            (g1[None, :, :] - j1).reshape(n, L * K),
            psi1 @ g1,
            centered,
            (omega[None, :, :] - centered[:, :, None] * centered[:, None, :]).reshape(n, L * L),
            (g2[None, :, :] - j2).reshape(n, L * K),
            psi2 @ a,
        ]
        return np.concatenate(blocks, axis=1)

    return MomentFunction(f"stacked({moment.name})", dim, dim, fn)


def stacked_init(moment, sample, weights, theta_init=None) -> np.ndarray:
    """Consistent starting point for the stacked system at a given theta."""
    K, L = moment.n_params, moment.n_moments
    theta = np.zeros(K) if theta_init is None else np.asarray(theta_init, dtype=np.float64)
    psi = moment.fn(sample.variables, theta)
    w = weights.weights
    m = w @ psi
    centered = psi - m
    omega = centered.T @ (w[:, None] * centered)
    g = moment_mean_jacobian(moment, sample.variables, w, theta)
    return np.concatenate([theta, theta, m, omega.ravel(), g.ravel(), g.ravel()])


# ---------------------------------------------------------------------------
# dispatch


def evaluate_estimator(spec: EstimatorSpec, sample: PolyadicSample, weights) -> tuple:
    """Apply the estimator functional to a weighted empirical distribution.

    Returns (theta as 1-d array, info dict with solver metadata).
    """
    if spec.kind == "mean":
        return np.array([weighted_mean(sample, weights, spec.column)]), {}
    if spec.kind == "ols":
        return weighted_ols(sample, weights, spec.y, spec.x, spec.intercept), {}
    if spec.kind == "ppml":
        theta, iters = weighted_ppml(
            sample, weights, spec.y, spec.x, spec.intercept, spec.settings
        )
        return theta, {"iterations": iters}
    moment = build_moment(spec, sample)
    if spec.gmm_mode == "one-step":
        return gmm_one_step(moment, sample, weights, spec.settings), {}
    if spec.gmm_mode == "two-step":
        return _gmm_two_step_info(moment, sample, weights, spec.settings)
    theta, iters, trace = gmm_iterated(
        moment, sample, weights, spec.settings, weight_style=spec.weight_style
    )
    return theta, {"iterations": iters, "objective_trace": trace}
