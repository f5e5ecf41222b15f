"""H2 norms of discrete-time transfer functions and relative model errors.

The squared norm is the mean of ``|H|^2`` over the unit circle.  Two routes
are provided: adaptive trapezoidal quadrature of any evaluable transfer
function, and the closed-form double sum for a pole-residue expansion with
simple poles inside the circle.  They cross-check each other throughout the
test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PoleResidueForm",
    "QuadratureError",
    "h2_norm_quadrature",
    "h2_norm_pole_residue",
    "relative_h2_error",
    "pole_residue_of",
]

_MAX_NODES = 2**20


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge; carries the last estimate."""

    def __init__(self, message: str, last_estimate: float):
        super().__init__(message)
        self.last_estimate = last_estimate


@dataclass(frozen=True)
class PoleResidueForm:
    """Partial-fraction data ``H(z) = sum_i residues[i] / (z - poles[i])``."""

    poles: np.ndarray
    residues: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.poles, dtype=complex).reshape(-1)
        r = np.asarray(self.residues, dtype=complex).reshape(-1)
        if p.shape != r.shape:
            raise ValueError("poles and residues must have equal length")
        object.__setattr__(self, "poles", p)
        object.__setattr__(self, "residues", r)

    def __call__(self, z):
        zs = np.asarray(z, dtype=complex)
        vals = np.sum(self.residues / (zs[..., None] - self.poles), axis=-1)
        return complex(vals) if zs.ndim == 0 else vals

    def derivative(self, z):
        zs = np.asarray(z, dtype=complex)
        vals = -np.sum(self.residues / (zs[..., None] - self.poles) ** 2, axis=-1)
        return complex(vals) if zs.ndim == 0 else vals


def _eval_on_circle(H, omega: np.ndarray) -> np.ndarray:
    z = np.exp(1j * omega)
    try:
        vals = np.asarray(H(z), dtype=complex)
        if vals.shape != z.shape:
            raise ValueError
    except Exception:
        vals = np.array([complex(H(zi)) for zi in z])
    return vals


def h2_norm_quadrature(
    H,
    tolerance: float = 1e-10,
    initial_nodes: int = 256,
    abs_floor: float = 0.0,
) -> float:
    """H2 norm of an evaluable transfer function by adaptive trapezoid rule.

    ``H`` must accept complex arguments on the unit circle (vectorized over
    an ndarray, or scalar-by-scalar).  Real symmetry of the underlying system
    is exploited by integrating over half the circle.  Nodes are doubled
    until successive estimates of the squared-magnitude integral agree
    within ``tolerance`` relatively plus ``abs_floor`` absolutely (the floor
    keeps near-zero integrands from chasing roundoff noise); evaluations are
    reused across refinements.

    Raises
    ------
    QuadratureError
        If the node budget is exhausted; the exception carries the last
        estimate.
    """
    n = int(initial_nodes)
    omega = np.linspace(0.0, np.pi, n + 1)
    g = np.abs(_eval_on_circle(H, omega)) ** 2
    h = np.pi / n
    est = h * (0.5 * g[0] + g[1:-1].sum() + 0.5 * g[-1])

    while n < _MAX_NODES:
        mid = omega[:-1] + 0.5 * (omega[1] - omega[0])
        g_mid = np.abs(_eval_on_circle(H, mid)) ** 2
        new_est = 0.5 * est + 0.5 * h * g_mid.sum()
        n *= 2
        h *= 0.5
        omega = np.linspace(0.0, np.pi, n + 1)
        done = np.isfinite(new_est) and abs(new_est - est) <= tolerance * abs(new_est) + abs_floor
        est = new_est
        if done:
            # norm^2 = (1/2pi) * 2 * integral over [0, pi]
            return float(np.sqrt(max(est, 0.0) / np.pi))

    raise QuadratureError(
        f"quadrature did not converge within {_MAX_NODES} nodes",
        last_estimate=float(np.sqrt(max(est, 0.0) / np.pi)),
    )


def h2_norm_pole_residue(pr: PoleResidueForm) -> float:
    """Closed-form H2 norm ``sqrt(sum_ij phi_i conj(phi_j) / (1 - lam_i conj(lam_j)))``.

    Requires simple poles strictly inside the unit circle.
    """
    lam = pr.poles
    phi = pr.residues
    if lam.size and np.max(np.abs(lam)) >= 1.0:
        raise ValueError("pole on or outside the unit circle")
    if lam.size == 0:
        return 0.0
    denom = 1.0 - lam[:, None] * lam[None, :].conj()
    total = np.sum(phi[:, None] * phi[None, :].conj() / denom)
    return float(np.sqrt(max(total.real, 0.0)))


def relative_h2_error(H_full, H_rom, tolerance: float = 1e-10) -> float:
    """Relative H2 error ``||H - H_rom|| / ||H||`` by quadrature.

    The numerator integrates the pointwise difference; estimates below
    roundoff relative to ``||H||`` short-circuit the refinement so that
    near-exact models do not chase quadrature noise.
    """
    denom = h2_norm_quadrature(H_full, tolerance)
    if denom == 0.0:
        raise ValueError("full model has zero H2 norm")

    full = _as_vectorized(H_full)
    rom = _as_vectorized(H_rom)

    def diff(z):
        return full(z) - rom(z)

    floor = (1e-13 * denom) ** 2 * np.pi
    num = h2_norm_quadrature(diff, tolerance, abs_floor=floor)
    return num / denom


def _as_vectorized(H):
    def call(z):
        return _eval_on_circle_like(H, z)

    return call


def _eval_on_circle_like(H, z: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(H(z), dtype=complex)
        if vals.shape != np.asarray(z).shape:
            raise ValueError
        return vals
    except Exception:
        return np.array([complex(H(zi)) for zi in np.asarray(z).reshape(-1)]).reshape(np.asarray(z).shape)


def pole_residue_of(sys) -> PoleResidueForm:
    """Partial-fraction expansion of a realization with simple poles.

    Diagonalizes ``E^{-1} A``; residues follow from the transformed input and
    output vectors.  Accurate only for diagonalizable realizations with
    well-separated poles (generic random systems, interpolatory models).
    """
    E = np.asarray(sys.E)
    A = np.asarray(sys.A)
    b = np.asarray(sys.b).reshape(-1)
    c = np.asarray(sys.c).reshape(-1)
    At = np.linalg.solve(E, A)
    bt = np.linalg.solve(E, b.astype(complex))
    lam, X = np.linalg.eig(At)
    left = np.linalg.solve(X, bt)
    right = c @ X
    return PoleResidueForm(poles=lam, residues=right * left)
