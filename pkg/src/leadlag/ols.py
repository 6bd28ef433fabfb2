"""Ordinary least squares via QR, with a condition-number guard.

Quiet months produce near-constant regressors, so every fit checks the
triangular factor's conditioning and raises a typed error instead of
returning garbage coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RankDeficiencyError

COND_LIMIT = 1e12


@dataclass(frozen=True)
class OlsFit:
    """A fitted linear model y ~ X."""

    coef: np.ndarray
    stderr: np.ndarray
    residuals: np.ndarray
    rss: float
    tss: float
    n: int
    k: int

    @property
    def dof(self) -> int:
        return self.n - self.k

    @property
    def r_squared(self) -> float:
        """1 - RSS/TSS with TSS centered on the dependent's mean."""
        if self.tss == 0.0:
            return 0.0
        return 1.0 - self.rss / self.tss

    def t_stats(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.coef / self.stderr


def fit_ols(X: np.ndarray, y: np.ndarray, cond_limit: float = COND_LIMIT) -> OlsFit:
    """Least-squares fit of y on the columns of X (no implicit intercept).

    Raises RankDeficiencyError when the design is rank deficient or its
    condition number exceeds ``cond_limit``.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be 2-D")
    n, k = X.shape
    if y.shape != (n,):
        raise ValueError(f"y has shape {y.shape}, expected ({n},)")
    if n <= k:
        raise RankDeficiencyError(f"need more rows ({n}) than columns ({k})")

    q, r = np.linalg.qr(X)
    diag = np.abs(np.diag(r))
    dmax = diag.max(initial=0.0)
    if dmax == 0.0 or diag.min() == 0.0 or dmax / diag.min() > cond_limit:
        raise RankDeficiencyError(
            f"design matrix ill-conditioned (diag ratio {dmax / max(diag.min(), 1e-300):.2e})"
        )
    coef = np.linalg.solve(r, q.T @ y)

    residuals = y - X @ coef
    rss = float(residuals @ residuals)
    ybar = y.mean()
    tss = float((y - ybar) @ (y - ybar))

    dof = n - k
    sigma2 = rss / dof if dof > 0 else np.nan
    rinv = np.linalg.solve(r, np.eye(k))
    xtx_inv_diag = (rinv * rinv).sum(axis=1)
    stderr = np.sqrt(sigma2 * xtx_inv_diag)

    return OlsFit(coef=coef, stderr=stderr, residuals=residuals,
                  rss=rss, tss=tss, n=n, k=k)


def design_with_intercept(*columns: np.ndarray) -> np.ndarray:
    """Stack a leading ones column with the given regressor columns."""
    cols = [np.ones(len(columns[0]))] + [np.asarray(c, dtype=np.float64) for c in columns]
    return np.column_stack(cols)
