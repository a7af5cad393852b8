"""Sparse self-representation: each point regressed on all others, l1-penalized.

Two solver modes. "exact_l1" solves the equality-constrained problem

    min ||z||_1  s.t.  x_j = X z,  z_j = 0

as a split-variable LP. "lasso_admm" solves the penalized variant

    min  lambda_j ||z||_1 + 1/2 ||x_j - X z||_2^2,  z_j = 0

by ADMM, with the per-column weight lambda_j = mu_j / alpha where
mu_j = max_{i != j} |<x_i, x_j>|. alpha > 1 keeps lambda_j below the
threshold at which the solution collapses to zero.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.optimize import linprog

SSC_MODES = ("lasso_admm", "exact_l1")

# |z_i| above this counts as support when checking optimality certificates
SUPPORT_TOL = 1e-9


@dataclass(frozen=True)
class SscConfig:
    """Solver settings for the self-representation step."""

    mode: str = "lasso_admm"
    alpha: float = 20.0
    admm_rho: float | None = None
    max_iter: int = 200
    tol_abs: float = 1e-6
    tol_rel: float = 1e-6

    def __post_init__(self):
        if self.mode not in SSC_MODES:
            raise ValueError(f"unknown mode {self.mode!r}, expected one of {SSC_MODES}")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.admm_rho is not None and not self.admm_rho > 0:
            raise ValueError("admm_rho must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass(frozen=True)
class Adjacency:
    """Symmetric nonnegative affinity matrix with zero diagonal."""

    weights: np.ndarray
    n: int = field(init=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("adjacency must be a square matrix")
        if not np.array_equal(w, w.T):
            raise ValueError("adjacency must be exactly symmetric")
        if np.any(w < 0):
            raise ValueError("adjacency weights must be nonnegative")
        if np.any(np.diag(w) != 0):
            raise ValueError("adjacency diagonal must be zero")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "n", w.shape[0])


@dataclass
class SscColumnInfo:
    """Per-column solver diagnostics."""

    column: int
    mode: str
    converged: bool
    iterations: int
    objective: float
    primal_residual: float | None = None
    dual_residual: float | None = None
    kkt_residual: float | None = None
    objective_history: list | None = None
    message: str = ""


def _soft_threshold(v: np.ndarray, k: float) -> np.ndarray:
    return np.sign(v) * np.maximum(np.abs(v) - k, 0.0)


def _l1_kkt_residual(dictionary: np.ndarray, z: np.ndarray, nu: np.ndarray) -> float:
    """Max violation of the l1 optimality certificate D^T nu.

    At an optimum there is a dual vector with ||D^T nu||_inf <= 1 and
    (D^T nu)_i = sign(z_i) on the support of z.
    """
    g = dictionary.T @ nu
    viol = max(float(np.max(np.abs(g))) - 1.0, 0.0)
    support = np.abs(z) > SUPPORT_TOL
    if np.any(support):
        viol = max(viol, float(np.max(np.abs(g[support] - np.sign(z[support])))))
    return viol


def _exact_l1_column(
    dictionary: np.ndarray, target: np.ndarray, column: int, tol: float
) -> tuple[np.ndarray, SscColumnInfo]:
    n = dictionary.shape[1]
    res = linprog(
        np.ones(2 * n),
        A_eq=np.hstack([dictionary, -dictionary]),
        b_eq=target,
        bounds=(0, None),
        method="highs",
    )
    if res.status != 0:
        info = SscColumnInfo(
            column=column,
            mode="exact_l1",
            converged=False,
            iterations=int(getattr(res, "nit", 0)),
            objective=np.nan,
            message=f"linprog status {res.status}: {res.message}",
        )
        return np.zeros(n), info
    z = res.x[:n] - res.x[n:]
    kkt = _l1_kkt_residual(dictionary, z, res.eqlin.marginals)
    info = SscColumnInfo(
        column=column,
        mode="exact_l1",
        converged=kkt <= tol,
        iterations=int(res.nit),
        objective=float(np.abs(z).sum()),
        kkt_residual=kkt,
    )
    return z, info


def _lasso_admm_column(
    gram: np.ndarray,
    dty: np.ndarray,
    y_sq: float,
    mu: float,
    config: SscConfig,
    column: int,
) -> tuple[np.ndarray, SscColumnInfo]:
    """ADMM on min ||z||_1 + (alpha/mu)/2 ||y - Dz||^2, the fit-weighted form.

    This is the equivalent of min lambda ||z||_1 + 1/2 ||y - Dz||^2 with
    lambda = mu/alpha; weighting the fit term keeps rho = alpha well scaled.
    Reported objectives use the lambda form so modes are comparable.
    """
    n = gram.shape[0]
    lam = mu / config.alpha
    w = config.alpha / mu
    rho = config.admm_rho if config.admm_rho is not None else config.alpha
    chol = cho_factor(w * gram + rho * np.eye(n))
    w_dty = w * dty
    v = np.zeros(n)
    u = np.zeros(n)
    converged = False
    it = 0
    r_norm = s_norm = np.inf
    history = []
    for it in range(1, config.max_iter + 1):
        z = cho_solve(chol, w_dty + rho * (v - u))
        v_old = v
        v = _soft_threshold(z + u, 1.0 / rho)
        u = u + z - v
        r_norm = float(np.linalg.norm(z - v))
        s_norm = float(rho * np.linalg.norm(v - v_old))
        history.append(
            float(lam * np.abs(v).sum() + 0.5 * (v @ (gram @ v)) - dty @ v + 0.5 * y_sq)
        )
        eps_pri = np.sqrt(n) * config.tol_abs + config.tol_rel * max(
            np.linalg.norm(z), np.linalg.norm(v)
        )
        eps_dual = np.sqrt(n) * config.tol_abs + config.tol_rel * np.linalg.norm(rho * u)
        if r_norm <= eps_pri and s_norm <= eps_dual:
            converged = True
            break
    # lasso stationarity at v: D^T(y - Dv) must lie in lam * subgradient(|v|_1)
    g = dty - gram @ v
    kkt = max(float(np.max(np.abs(g))) / lam - 1.0, 0.0)
    support = v != 0
    if np.any(support):
        kkt = max(kkt, float(np.max(np.abs(g[support] / lam - np.sign(v[support])))))
    info = SscColumnInfo(
        column=column,
        mode="lasso_admm",
        converged=converged,
        iterations=it,
        objective=history[-1],
        primal_residual=r_norm,
        dual_residual=s_norm,
        kkt_residual=kkt,
        objective_history=history,
        message="" if converged else "max_iter reached",
    )
    return v, info


def ssc_coefficients(
    data, config: SscConfig | None = None, return_info: bool = False
):
    """Solve the self-representation problem for every column.

    Returns the N x N coefficient matrix Z with zero diagonal (column j holds
    the representation of x_j in terms of the other points). With
    return_info=True also returns a list of per-column SscColumnInfo.
    Columns whose solver fails or stalls are kept at the best iterate and
    reported via a warning.
    """
    if config is None:
        config = SscConfig()
    x = np.asarray(getattr(data, "points", data), dtype=float)
    if x.ndim != 2:
        raise ValueError("data must be a 2-d array of column points")
    n_pts = x.shape[1]
    if n_pts < 2:
        raise ValueError("self-representation needs at least two points")
    norms = np.linalg.norm(x, axis=0)
    if np.any(norms == 0):
        bad = int(np.flatnonzero(norms == 0)[0])
        raise ValueError(f"column {bad} is identically zero")

    z_full = np.zeros((n_pts, n_pts))
    infos: list[SscColumnInfo] = []
    gram_full = x.T @ x if config.mode == "lasso_admm" else None
    for j in range(n_pts):
        others = np.concatenate([np.arange(j), np.arange(j + 1, n_pts)])
        if config.mode == "exact_l1":
            coef, info = _exact_l1_column(x[:, others], x[:, j], j, config.tol_abs)
        else:
            mu = float(np.max(np.abs(gram_full[others, j])))
            if mu == 0:
                coef = np.zeros(n_pts - 1)
                info = SscColumnInfo(
                    column=j,
                    mode="lasso_admm",
                    converged=False,
                    iterations=0,
                    objective=0.0,
                    message="point is orthogonal to all others",
                )
            else:
                coef, info = _lasso_admm_column(
                    gram_full[np.ix_(others, others)],
                    gram_full[others, j],
                    float(gram_full[j, j]),
                    mu,
                    config,
                    j,
                )
        z_full[others, j] = coef
        infos.append(info)

    bad = [i.column for i in infos if not i.converged]
    if bad:
        warnings.warn(
            f"self-representation did not converge for {len(bad)} of {n_pts} "
            f"columns (first: {bad[:5]})",
            RuntimeWarning,
            stacklevel=2,
        )
    if return_info:
        return z_full, infos
    return z_full


def adjacency_from_coefficients(z: np.ndarray) -> Adjacency:
    """Symmetrize a coefficient matrix into |Z| + |Z|^T."""
    z = np.asarray(z, dtype=float)
    a = np.abs(z)
    return Adjacency(a + a.T)


def ssc_adjacency(data, config: SscConfig | None = None, return_info: bool = False):
    """Self-representation coefficients symmetrized into an Adjacency."""
    if return_info:
        z, infos = ssc_coefficients(data, config, return_info=True)
        return adjacency_from_coefficients(z), infos
    return adjacency_from_coefficients(ssc_coefficients(data, config))


def write_diagnostics_csv(infos: list[SscColumnInfo], path) -> None:
    """Dump per-column solver diagnostics to CSV."""
    fields = [
        "column",
        "mode",
        "converged",
        "iterations",
        "objective",
        "primal_residual",
        "dual_residual",
        "kkt_residual",
        "message",
    ]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields)
        for info in infos:
            writer.writerow([getattr(info, f) for f in fields])
