"""Ordinary least squares through Householder QR.

Normal equations square the condition number, which matters for lagged price
columns; reflections keep it. Rank is decided on the diagonal of R against a
tolerance scaled by the largest column norm.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import RankDeficientError, ShapeMismatchError

RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class OlsFit:
    coefficients: np.ndarray
    rss: float
    n_rows: int
    n_cols: int
    rank: int
    residuals: np.ndarray
    r_factor: np.ndarray

    @property
    def df_resid(self) -> int:
        return self.n_rows - self.n_cols

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.coefficients


def householder_qr(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Triangularise ``X`` in place of a copy and apply the same reflections to ``y``.

    Returns ``(R, qty)`` with ``R`` the ``m x k`` upper-triangular factor (zeros
    below the diagonal) and ``qty = Q^T y``.
    """
    A = np.array(X, dtype=np.float64, copy=True)
    b = np.array(y, dtype=np.float64, copy=True)
    k = A.shape[1]
    for j in range(k):
        col = A[j:, j]
        norm = np.linalg.norm(col)
        if norm == 0.0:
            continue
        alpha = -norm if col[0] >= 0 else norm
        v = col.copy()
        v[0] -= alpha
        vnorm = np.linalg.norm(v)
        if vnorm == 0.0:
            continue
        v /= vnorm
        A[j:, j:] -= 2.0 * np.outer(v, v @ A[j:, j:])
        b[j:] -= 2.0 * v * (v @ b[j:])
        A[j + 1:, j] = 0.0
    return A, b


def ols_fit(X: np.ndarray, y: np.ndarray) -> OlsFit:
    """Least-squares fit of ``y`` on the columns of ``X``.

    Raises
    ------
    ShapeMismatchError
        If ``X`` is not ``m x k`` with ``m >= k >= 1`` or ``y`` is not length ``m``.
    RankDeficientError
        If any diagonal entry of R falls below ``RANK_TOL`` times the largest
        column norm of ``X``.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1:
        raise ShapeMismatchError("X must be 2-D and y 1-D", x_shape=X.shape, y_shape=y.shape)
    m, k = X.shape
    if y.shape[0] != m or not m >= k >= 1:
        raise ShapeMismatchError(f"incompatible shapes X{X.shape}, y{y.shape}")

    R, qty = householder_qr(X, y)
    diag = np.abs(np.diag(R[:k, :k]))
    scale = np.linalg.norm(X, axis=0).max()
    rank = int(np.count_nonzero(diag > RANK_TOL * scale)) if scale > 0 else 0
    if rank < k:
        raise RankDeficientError(rank, k)

    R_k = R[:k, :k]
    beta = solve_triangular(R_k, qty[:k], lower=False)
    tail = qty[k:]
    rss = float(tail @ tail)
    residuals = y - X @ beta
    return OlsFit(beta, rss, m, k, rank, residuals, R_k)


def coefficient_std_errors(fit: OlsFit) -> np.ndarray:
    """Classical homoskedastic standard errors, ``sigma^2 (R^T R)^{-1}`` on the diagonal."""
    if fit.df_resid < 1:
        raise ValueError("standard errors need positive residual degrees of freedom")
    sigma2 = fit.rss / fit.df_resid
    r_inv = solve_triangular(fit.r_factor, np.eye(fit.n_cols), lower=False)
    return np.sqrt(sigma2 * np.sum(r_inv ** 2, axis=1))
