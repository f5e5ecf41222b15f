"""Exact conditioning analysis of a subunitary matrix appended by one column.

For ``Q`` with orthonormal columns and an extra column ``z``, the nonzero
extreme eigenvalues of ``Q Q^* + z z^*`` have a closed form in ``nu = ||z||``
and ``||v||``, where ``v`` is the component of ``z`` orthogonal to
``range(Q)``.  From these the exact 2-norm condition number of ``[Q z]``
follows, together with the optimal column scaling ``1/||z||`` and a predictor
of the angle between ``z`` and ``range(Q)`` in terms of transfer-function
quantities of the system that generated the data.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "AppendedColumnAnalysis",
    "extreme_eigenvalues",
    "condition_number",
    "condition_squared",
    "optimal_scale",
    "alpha_predictor",
]

# Relative clamp width for a discriminant driven slightly negative by roundoff.
_DISC_CLAMP = 1e-14


@dataclass(frozen=True)
class AppendedColumnAnalysis:
    """Conditioning summary of ``[Q z]`` for subunitary ``Q``.

    Attributes
    ----------
    nu : float
        ``||z||``.
    v_norm : float
        Norm of the component of ``z`` orthogonal to ``range(Q)``.
    u_norm : float
        Norm of the projection of ``z`` onto ``range(Q)``.
    eta : float
        ``v_norm / nu``, in ``(0, 1]``.
    lambda_max : float
        Largest eigenvalue of ``Q Q^* + z z^*``; at least 1.
    lambda_min_nonzero : float
        Smallest nonzero eigenvalue; positive, at most 1.
    kappa : float
        ``sqrt(lambda_max / lambda_min_nonzero)``, the 2-norm condition
        number of ``[Q z]``.
    alpha : float
        Sine of the angle between ``z`` and ``range(Q)``; equals ``eta``.
    """

    nu: float
    v_norm: float
    u_norm: float
    eta: float
    lambda_max: float
    lambda_min_nonzero: float
    kappa: float
    alpha: float


def extreme_eigenvalues(nu: float, v_norm: float) -> tuple[float, float]:
    """Nonzero extreme eigenvalues of ``Q Q^* + z z^*``.

    Parameters
    ----------
    nu : float
        ``||z||``, positive.
    v_norm : float
        Norm of the out-of-range component of ``z``; ``0 < v_norm <= nu``.

    Returns
    -------
    (lambda_max, lambda_min_nonzero) : tuple of float
        ``lambda_max >= 1 >= lambda_min_nonzero > 0`` whenever ``z`` has
        both a range and an out-of-range component.
    """
    if not nu > 0:
        raise ValueError("nu must be positive")
    if not 0 < v_norm:
        raise ValueError("v_norm must be positive")
    if v_norm > nu * (1 + 1e-13):
        raise ValueError(f"v_norm={v_norm} exceeds nu={nu}")
    v_norm = min(v_norm, nu)

    disc = 1.0 + nu**4 + 2.0 * nu**2 - 4.0 * v_norm**2
    scale = (1.0 + nu**2) ** 2
    if disc < 0.0:
        if disc < -_DISC_CLAMP * scale:
            raise ValueError(f"discriminant {disc} is negative beyond roundoff")
        disc = 0.0
    root = np.sqrt(disc)
    lam_max = 0.5 * (1.0 + nu**2 + root)
    # lam_max * lam_min = v_norm**2 exactly; dividing avoids the cancellation
    # in the subtractive form of the small eigenvalue when v_norm is tiny.
    lam_min = v_norm**2 / lam_max
    return lam_max, lam_min


def condition_number(Q: np.ndarray, z: np.ndarray, *, tol: float | None = None) -> AppendedColumnAnalysis:
    """Exact 2-norm condition number of ``[Q z]``.

    ``Q`` (m-by-n, n < m) must have orthonormal columns and ``z`` must not lie
    in ``range(Q)`` numerically, otherwise the appended matrix is
    rank-deficient and the least-squares recovery has no unique solution.
    """
    Q = np.asarray(Q)
    z = np.asarray(z).reshape(-1)
    m, n = Q.shape
    if n >= m:
        raise ValueError("Q must have fewer columns than rows (subunitary)")
    if z.shape[0] != m:
        raise ValueError("z length must match the row count of Q")

    gram_err = np.linalg.norm(Q.conj().T @ Q - np.eye(n))
    if gram_err > 1e-10 * max(1.0, np.sqrt(n)):
        raise ValueError(f"Q is not orthonormal (||Q^*Q - I|| = {gram_err:.2e})")

    nu = float(np.linalg.norm(z))
    if nu == 0.0:
        raise ValueError("z must be nonzero")
    coeff = Q.conj().T @ z
    v = z - Q @ coeff
    v_norm = float(np.linalg.norm(v))
    u_norm = float(np.linalg.norm(coeff))

    if tol is None:
        tol = m * np.finfo(float).eps
    if v_norm <= tol * nu:
        raise ValueError("rank-deficient append: z lies in range(Q) numerically")

    lam_max, lam_min = extreme_eigenvalues(nu, v_norm)
    kappa = float(np.sqrt(lam_max / lam_min))
    eta = v_norm / nu
    return AppendedColumnAnalysis(
        nu=nu,
        v_norm=v_norm,
        u_norm=u_norm,
        eta=eta,
        lambda_max=lam_max,
        lambda_min_nonzero=lam_min,
        kappa=kappa,
        alpha=eta,
    )


def condition_squared(nu: float, eta: float) -> float:
    """Squared condition number of ``[Q z]`` as a function of scale and angle.

    ``eta`` is the fixed direction parameter ``||v|| / ||z||`` and ``nu`` the
    column norm; the minimum over ``nu`` is attained at ``nu = 1``.
    """
    if not 0 < eta <= 1:
        raise ValueError("eta must lie in (0, 1]")
    if not nu > 0:
        raise ValueError("nu must be positive")
    lam_max, lam_min = extreme_eigenvalues(nu, eta * nu)
    return lam_max / lam_min


def optimal_scale(z: np.ndarray) -> float:
    """Scaling ``delta = 1/||z||`` minimizing the condition number of ``[Q delta*z]``."""
    z = np.asarray(z).reshape(-1)
    if z.size == 0:
        raise ValueError("z must be nonempty")
    if not np.all(np.isfinite(z.view(float) if z.dtype.kind == "c" else z)):
        raise ValueError("z has non-finite entries")
    peak = float(np.max(np.abs(z)))
    if peak == 0.0:
        raise ValueError("z must be nonzero")
    # Factored norm keeps 1/||z|| representable for extreme magnitudes.
    scaled_norm = float(np.linalg.norm(z / peak))
    return (1.0 / peak) / scaled_norm


def alpha_predictor(
    H_val: complex,
    H_der: complex,
    xi1_norm: float,
    gamma_norm: float,
    gamma1_norm: float,
) -> float:
    """Predict the sine of the angle between ``z(sigma)`` and the data range.

    Combines the transfer-function value and derivative at ``sigma`` with the
    norms of the moment vectors and of the range component of the derivative
    right-hand side.  A zero result means the appended column lies in the data
    range, i.e. the recovery problem is not uniquely solvable there.
    """
    if H_der == 0:
        raise ValueError("zero derivative, predictor undefined")
    if gamma_norm <= 0 or gamma1_norm <= 0:
        raise ValueError("gamma norms must be positive")

    top = (1.0 + abs(H_val) ** 2) * gamma1_norm**2 - xi1_norm**2
    denom = abs(H_der) ** 2 * gamma_norm**2
    if top < 0:
        ref = (1.0 + abs(H_val) ** 2) * gamma1_norm**2
        if top < -1e-8 * ref:
            raise ValueError(f"negative numerator {top} beyond roundoff; inconsistent inputs")
        warnings.warn("alpha predictor numerator clamped to zero", stacklevel=2)
        top = 0.0
    return float(np.sqrt(top / denom))
