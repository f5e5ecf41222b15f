"""Recovery of transfer-function values and derivatives from one trajectory.

Stacked Hankel matrices of the input and output span a subspace that, for
informative data, determines ``H(sigma)`` and ``H'(sigma)`` through small
least-squares systems.  Both sides of those systems are scaled by the norm of
the moment vector ``gamma = (1, sigma, ..., sigma^nhat)`` so that every stored
entry stays bounded even when ``|sigma|^nhat`` overflows double precision;
the norm itself is carried as a mantissa/exponent pair.  A fallback policy
that instead halves the working order ``nhat`` until the unscaled vector is
representable is available for comparison.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from . import conditioning
from .lti import TimeSeriesData

__all__ = [
    "ScaledNorm",
    "ScaledVector",
    "SigmaVectors",
    "InformativityWorkspace",
    "InformativityFlags",
    "FrequencySample",
    "NotInformativeError",
    "hankel",
    "build_workspace",
    "gamma_vectors",
    "sigma_vectors",
    "check_informativity",
    "recover_value",
    "recover_derivative",
    "consistency_indicator",
    "write_samples_csv",
    "SAMPLE_CSV_HEADER",
]

_EPS = np.finfo(float).eps
# Safety factors on the machine-precision rank tolerances used by the
# informativity flags.  The uniqueness test (appended column must leave the
# data range) stays tight; the membership tests tolerate more roundoff
# because their residuals pick up noise amplified by the reciprocal of the
# appended-column angle, while genuine membership failures sit many orders
# higher.  Calibrated so noise-free double-precision trajectories test as
# informative and rank-deficient stacks fail decisively.
_FLAG_SAFETY = 256.0
_MEMBER_SAFETY = 65536.0
# Largest base-2 exponent a finite double can carry.
_MAX_EXP = 1023


class NotInformativeError(Exception):
    """Data cannot determine the requested quantity at ``sigma``."""

    def __init__(self, sigma: complex, failed: str):
        self.sigma = sigma
        self.failed = failed
        super().__init__(f"data not informative at sigma={sigma}: failed {failed}")


@dataclass(frozen=True)
class ScaledNorm:
    """Positive scalar stored as ``mantissa * 2**exponent``, mantissa in [0.5, 1)."""

    mantissa: float
    exponent: int

    @classmethod
    def from_float(cls, x: float) -> "ScaledNorm":
        if not x > 0:
            raise ValueError("ScaledNorm requires a positive value")
        m, e = math.frexp(x)
        return cls(m, e)

    @classmethod
    def from_log2(cls, log2_value: float) -> "ScaledNorm":
        e = int(math.floor(log2_value)) + 1
        return cls(2.0 ** (log2_value - e), e)

    @property
    def log2(self) -> float:
        return math.log2(self.mantissa) + self.exponent

    @property
    def value(self) -> float:
        """Float value; ``inf`` when outside the representable range."""
        if self.exponent > _MAX_EXP + 1:
            return math.inf
        return math.ldexp(self.mantissa, self.exponent)

    @property
    def overflows(self) -> bool:
        return self.log2 > _MAX_EXP

    def ratio(self, other: "ScaledNorm") -> float:
        """``self / other`` evaluated through the exponent fields."""
        return math.ldexp(self.mantissa / other.mantissa, self.exponent - other.exponent)


@dataclass(frozen=True)
class ScaledVector:
    """Unit direction plus a separately stored norm."""

    direction: np.ndarray
    norm: ScaledNorm


def hankel(V: np.ndarray, depth: int) -> np.ndarray:
    """Hankel matrix with entry ``(i, j) = V[i + j]``, ``depth + 1`` rows."""
    V = np.asarray(V, dtype=float).reshape(-1)
    T = V.shape[0] - 1
    if depth > T:
        raise ValueError(f"depth {depth} too large for trajectory of length {T + 1}")
    ncols = T - depth + 1
    return np.lib.stride_tricks.sliding_window_view(V, ncols)


@dataclass(frozen=True)
class InformativityWorkspace:
    """Stacked Hankel matrix of a trajectory and an orthonormal range basis.

    ``Ubasis`` holds the ``p`` left singular vectors of ``G`` above the rank
    tolerance.  The workspace is immutable; per-sigma recoveries against it
    are independent and may run concurrently.
    """

    G: np.ndarray
    Ubasis: np.ndarray
    p: int
    nhat: int
    rank_tolerance: float
    data: TimeSeriesData
    _subcache: dict = field(default_factory=dict, repr=False, compare=False)

    def at_nhat(self, nhat: int) -> "InformativityWorkspace":
        """Workspace over the same data at a reduced working order (memoized)."""
        if nhat == self.nhat:
            return self
        ws = self._subcache.get(nhat)
        if ws is None:
            ws = build_workspace(self.data, nhat)
            self._subcache[nhat] = ws
        return ws


def build_workspace(data: TimeSeriesData, nhat: int, rank_tolerance: float | None = None) -> InformativityWorkspace:
    """Stack input/output Hankel matrices of depth ``nhat`` and orthonormalize.

    The basis comes from a singular value decomposition; the numerical rank
    ``p`` counts singular values above ``max(rows, cols) * eps * s_max``
    unless an explicit tolerance is given.
    """
    if nhat < 1:
        raise ValueError("nhat must be at least 1")
    if nhat > data.T - 1:
        raise ValueError(f"insufficient data length: nhat={nhat} needs T >= {nhat + 1}, got T={data.T}")
    G = np.vstack([hankel(data.U, nhat), hankel(data.Y, nhat)])
    u, s, _ = np.linalg.svd(G, full_matrices=False)
    if rank_tolerance is None:
        smax = s[0] if s.size else 0.0
        rank_tolerance = max(G.shape) * _EPS * smax
    p = int(np.sum(s > rank_tolerance))
    return InformativityWorkspace(
        G=G,
        Ubasis=u[:, :p],
        p=p,
        nhat=nhat,
        rank_tolerance=float(rank_tolerance),
        data=data,
    )


def gamma_vectors(sigma: complex, nhat: int) -> tuple[ScaledVector, ScaledVector]:
    """Moment vector ``(1, sigma, ..., sigma^nhat)`` and its derivative, in scaled form.

    For ``|sigma| > 1`` the directions are built from the reversed powers
    ``sigma^(k - nhat)`` so no intermediate exceeds magnitude 1; the norms are
    accumulated in the exponent field and never overflow.
    """
    if nhat < 1:
        raise ValueError("nhat must be at least 1")
    sigma = complex(sigma)
    k = np.arange(nhat + 1)
    if abs(sigma) <= 1.0:
        powers = np.concatenate(([1.0 + 0.0j], np.cumprod(np.full(nhat, sigma))))
        g1 = np.zeros(nhat + 1, dtype=complex)
        g1[1:] = k[1:] * powers[:-1]
        n_g = float(np.linalg.norm(powers))
        n_g1 = float(np.linalg.norm(g1))
        gamma = ScaledVector(powers / n_g, ScaledNorm.from_float(n_g))
        gamma1 = ScaledVector(g1 / n_g1, ScaledNorm.from_float(n_g1))
        return gamma, gamma1

    w = 1.0 / sigma
    rev = np.concatenate(([1.0 + 0.0j], np.cumprod(np.full(nhat, w))))
    q = rev[::-1].copy()  # q[k] = sigma^(k - nhat), magnitudes <= 1
    q1 = k * q
    log2_abs = math.log2(abs(sigma))
    ang = math.atan2(sigma.imag, sigma.real)
    phase = complex(math.cos(nhat * ang), math.sin(nhat * ang))
    phase1 = complex(math.cos((nhat - 1) * ang), math.sin((nhat - 1) * ang))
    n_q = float(np.linalg.norm(q))
    n_q1 = float(np.linalg.norm(q1))
    gamma = ScaledVector(
        phase * q / n_q,
        ScaledNorm.from_log2(nhat * log2_abs + math.log2(n_q)),
    )
    gamma1 = ScaledVector(
        phase1 * q1 / n_q1,
        ScaledNorm.from_log2((nhat - 1) * log2_abs + math.log2(n_q1)),
    )
    return gamma, gamma1


@dataclass(frozen=True)
class SigmaVectors:
    """Normalized right-hand sides and appended column for one ``sigma``.

    ``zhat`` and ``bhat`` embed the unit moment direction with opposite block
    layout, so both have unit norm exactly and the coefficient recovered from
    the symmetrically scaled system is the transfer value itself.  ``scale``
    is the norm of the unscaled moment vector.
    """

    sigma: complex
    nhat: int
    zhat: np.ndarray
    bhat: np.ndarray
    scale: ScaledNorm
    gamma1_dir: np.ndarray
    gamma1_norm: ScaledNorm

    @property
    def gamma_ratio(self) -> float:
        """``||gamma'|| / ||gamma||`` without forming either norm."""
        return self.gamma1_norm.ratio(self.scale)

    def derivative_rhs(self, M0: complex) -> np.ndarray:
        """Right-hand side for the derivative solve, scaled by ``1/||gamma||``."""
        top = self.gamma_ratio * self.gamma1_dir
        return np.concatenate([top, M0 * top])


def sigma_vectors(sigma: complex, nhat: int) -> SigmaVectors:
    gamma, gamma1 = gamma_vectors(sigma, nhat)
    zero = np.zeros(nhat + 1, dtype=complex)
    return SigmaVectors(
        sigma=complex(sigma),
        nhat=nhat,
        zhat=np.concatenate([zero, -gamma.direction]),
        bhat=np.concatenate([gamma.direction, zero]),
        scale=gamma.norm,
        gamma1_dir=gamma1.direction,
        gamma1_norm=gamma1.norm,
    )


@dataclass(frozen=True)
class InformativityFlags:
    """Numerical verdicts of the three rank conditions at one ``sigma``.

    ``unique`` is the appended-column rank increase, ``existence`` the
    membership of the value right-hand side, and ``interpolation`` their
    conjunction; ``hermite`` additionally requires membership of the
    derivative right-hand side.  Distances and the smallest singular values
    that produced the verdicts are kept for diagnostics.
    """

    interpolation: bool
    unique: bool
    hermite: bool
    existence: bool
    alpha: float
    smin_unique: float
    smin_value: float
    smin_derivative: float
    tolerance: float


def _mv(U: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``U @ w`` for a real basis and complex vector without promoting ``U``."""
    if np.iscomplexobj(w):
        return U @ w.real + 1j * (U @ w.imag)
    return U @ w


def _rmv(U: np.ndarray, w: np.ndarray) -> np.ndarray:
    """``U^H @ w`` for a real basis and complex vector without promoting ``U``."""
    if np.iscomplexobj(w):
        return U.T @ w.real + 1j * (U.T @ w.imag)
    return U.T @ w


class _AugmentedSolver:
    """Least-squares solves against ``[U zhat]`` with one shared factorization.

    ``method="qr"`` runs a dense Householder QR of the augmented matrix;
    ``method="projection"`` uses the closed-form solution through the
    orthogonal complement ``v = (I - U U^H) zhat``, which coincides with the
    least-squares solution because ``U`` is orthonormal.
    """

    def __init__(self, U: np.ndarray, zhat: np.ndarray, method: str = "qr"):
        self.U = U
        self.zhat = zhat
        self.method = method
        v = zhat - _mv(U, _rmv(U, zhat))
        # One reorthogonalization pass keeps v accurate when the angle is small.
        v = v - _mv(U, _rmv(U, v))
        self.v = v
        self.alpha = float(np.linalg.norm(v))
        if method == "qr":
            A = np.column_stack([U.astype(complex), zhat])
            self._Q, self._R = scipy.linalg.qr(A, mode="economic")
        elif method != "projection":
            raise ValueError(f"unknown solve method {method!r}")

    def solve(self, rhs: np.ndarray) -> tuple[complex, np.ndarray, float]:
        """Return the appended-column coefficient, range coefficients, and residual."""
        if self.method == "qr":
            x = scipy.linalg.solve_triangular(self._R, self._Q.conj().T @ rhs)
            coeff = complex(x[-1])
            xi = x[:-1]
        else:
            denom = self.v.conj() @ self.zhat
            coeff = complex((self.v.conj() @ rhs) / denom)
            xi = _rmv(self.U, rhs - coeff * self.zhat)
        resid = rhs - _mv(self.U, xi) - coeff * self.zhat
        return coeff, xi, float(np.linalg.norm(resid))


def _smin_unit_append(dist: float) -> float:
    """Smallest singular value of an orthonormal block plus one unit column
    whose orthogonal component has norm ``dist`` (exact rank-one formula)."""
    dist = min(max(dist, 0.0), 1.0)
    lam_max = 1.0 + math.sqrt(max(1.0 - dist * dist, 0.0))
    return dist / math.sqrt(lam_max)


def _orth_distance(U: np.ndarray, v_unit: np.ndarray | None, w: np.ndarray) -> float:
    """Distance of unit ``w`` from span of ``U`` (and optionally ``v_unit``)."""
    r = w - _mv(U, _rmv(U, w))
    if v_unit is not None:
        r = r - v_unit * (v_unit.conj() @ r)
    # second pass for accuracy near the span
    r = r - _mv(U, _rmv(U, r))
    if v_unit is not None:
        r = r - v_unit * (v_unit.conj() @ r)
    return float(np.linalg.norm(r))


def _flag_tolerance(ws: InformativityWorkspace) -> float:
    m = ws.Ubasis.shape[0]
    return _FLAG_SAFETY * max(m, ws.p + 2) * _EPS


def _compute_flags(
    ws: InformativityWorkspace,
    sv: SigmaVectors,
    tolerance: float | None = None,
) -> tuple[InformativityFlags, _AugmentedSolver]:
    if tolerance is None:
        tol = _flag_tolerance(ws)
        tol_member = tol * (_MEMBER_SAFETY / _FLAG_SAFETY)
    else:
        tol = tol_member = tolerance
    solver = _AugmentedSolver(ws.Ubasis, sv.zhat, method="projection")
    alpha = solver.alpha
    smin_unique = _smin_unit_append(alpha)
    unique = smin_unique > tol and ws.p + 1 <= ws.Ubasis.shape[0]

    if unique:
        v_unit = solver.v / alpha
        dist_b = _orth_distance(ws.Ubasis, v_unit, sv.bhat)
        smin_value = _smin_unit_append(dist_b)
        existence = smin_value <= tol_member
    else:
        dist_b = _orth_distance(ws.Ubasis, None, sv.bhat)
        smin_value = _smin_unit_append(dist_b)
        existence = smin_value <= tol_member

    hermite = False
    smin_der = math.inf
    if unique and existence:
        v_unit = solver.v / alpha
        M0_prov, _, _ = solver.solve(sv.bhat)
        rhs1 = sv.derivative_rhs(M0_prov)
        n1 = np.linalg.norm(rhs1)
        if n1 > 0:
            dist_d = _orth_distance(ws.Ubasis, v_unit, rhs1 / n1)
            smin_der = _smin_unit_append(dist_d)
            hermite = smin_der <= tol_member
        else:
            hermite = True
            smin_der = 0.0

    flags = InformativityFlags(
        interpolation=bool(unique and existence),
        unique=bool(unique),
        hermite=bool(hermite),
        existence=bool(existence),
        alpha=alpha,
        smin_unique=smin_unique,
        smin_value=smin_value,
        smin_derivative=smin_der,
        tolerance=tol,
    )
    return flags, solver


def check_informativity(
    ws: InformativityWorkspace,
    sigma: complex,
    tolerance: float | None = None,
) -> InformativityFlags:
    """Evaluate the three informativity rank conditions at ``sigma``.

    Rank changes are judged through the smallest singular values of the
    successively appended matrices, computed by the exact appended-column
    eigenvalue formula, against a machine-precision tolerance.
    """
    flags, _ = _compute_flags(ws, sigma_vectors(sigma, ws.nhat), tolerance)
    return flags


@dataclass(frozen=True)
class FrequencySample:
    """Recovered frequency datum with conditioning and residual diagnostics."""

    sigma: complex
    M0: complex
    M1: complex | None
    residual0: float
    residual1: float | None
    kappa: float
    alpha: float
    nhat_used: int
    informativity: InformativityFlags
    warnings: tuple[str, ...] = ()


def _resolve_nhat(sigma: complex, nhat: int, policy: str, min_nhat: int) -> int:
    """Working order after applying the overflow policy at ``sigma``."""
    if policy == "scaled":
        return nhat
    if policy != "halve-nhat":
        raise ValueError(f"unknown overflow policy {policy!r}")
    n = nhat
    while n > min_nhat and gamma_vectors(sigma, n)[0].norm.overflows:
        n //= 2
    return max(n, min_nhat)


def recover_value(
    ws: InformativityWorkspace,
    sigma: complex,
    *,
    with_derivative: bool = False,
    overflow_policy: str = "scaled",
    min_nhat: int = 8,
    solve_method: str = "projection",
    tolerance: float | None = None,
    residual_warn: float = 1e-6,
) -> FrequencySample:
    """Recover ``M0 ~ H(sigma)`` from the workspace data.

    Both sides of the least-squares system are scaled by the moment-vector
    norm, so the recovered coefficient is ``M0`` directly and every stored
    entry stays bounded regardless of ``|sigma|``.  Under the ``halve-nhat``
    policy the working order is instead halved (down to ``min_nhat``) until
    the unscaled moment vector is representable, and the workspace is rebuilt
    at that order.

    ``with_derivative=True`` additionally fills ``M1`` from the same
    factorization when the data is Hermite-informative.  The default
    ``projection`` solve method evaluates the least-squares solution in
    closed form through the orthogonal complement of the appended column;
    ``solve_method="qr"`` runs an independent dense QR least-squares solve
    instead (the two agree to roundoff and are cross-checked in the tests).

    Raises
    ------
    NotInformativeError
        If either rank condition for interpolation fails; the failed
        condition is named on the exception.
    """
    nhat_used = _resolve_nhat(sigma, ws.nhat, overflow_policy, min_nhat)
    ws_used = ws.at_nhat(nhat_used)
    sv = sigma_vectors(sigma, nhat_used)
    flags, proj = _compute_flags(ws_used, sv, tolerance)
    if not flags.unique:
        raise NotInformativeError(sigma, "uniqueness: rank([U z]) = rank(U), appended column lies in the data range")
    if not flags.existence:
        raise NotInformativeError(sigma, "existence: rank([U z b]) > rank([U z])")

    solver = proj if solve_method == "projection" else _AugmentedSolver(ws_used.Ubasis, sv.zhat, method=solve_method)
    M0, _, residual0 = solver.solve(sv.bhat)
    lam_max, lam_min = conditioning.extreme_eigenvalues(1.0, min(solver.alpha, 1.0))
    kappa = float(np.sqrt(lam_max / lam_min))

    warn: tuple[str, ...] = ()
    if residual0 > residual_warn:
        warn = (f"value residual {residual0:.3e} above threshold {residual_warn:.1e}",)

    M1 = None
    residual1 = None
    if with_derivative and flags.hermite:
        rhs1 = sv.derivative_rhs(M0)
        M1, _, residual1 = solver.solve(rhs1)
        if residual1 > residual_warn * max(float(np.linalg.norm(rhs1)), 1.0):
            warn = warn + (f"derivative residual {residual1:.3e} above threshold",)

    return FrequencySample(
        sigma=complex(sigma),
        M0=M0,
        M1=M1,
        residual0=residual0,
        residual1=residual1,
        kappa=kappa,
        alpha=solver.alpha,
        nhat_used=nhat_used,
        informativity=flags,
        warnings=warn,
    )


def recover_derivative(
    ws: InformativityWorkspace,
    sample: FrequencySample,
    *,
    solve_method: str = "projection",
    tolerance: float | None = None,
    residual_warn: float = 1e-6,
) -> FrequencySample:
    """Fill ``M1 ~ H'(sigma)`` into a sample whose value is already recovered.

    The right-hand side is assembled from the recovered ``M0`` and solved
    against the same scaled augmented matrix (at the working order recorded
    on the sample).
    """
    if not sample.informativity.hermite:
        raise NotInformativeError(sample.sigma, "hermite: rank([U z b1]) > rank([U z])")
    ws_used = ws.at_nhat(sample.nhat_used)
    sv = sigma_vectors(sample.sigma, sample.nhat_used)
    solver = _AugmentedSolver(ws_used.Ubasis, sv.zhat, method=solve_method)
    rhs1 = sv.derivative_rhs(sample.M0)
    M1, _, residual1 = solver.solve(rhs1)
    warn = sample.warnings
    scale1 = float(np.linalg.norm(rhs1))
    if residual1 > residual_warn * max(scale1, 1.0):
        warn = warn + (f"derivative residual {residual1:.3e} above threshold",)
    return replace(sample, M1=M1, residual1=residual1, warnings=warn)


def consistency_indicator(
    data: TimeSeriesData,
    sigma: complex,
    nhat: int,
    rank_tolerance: float | None = None,
    **recover_kwargs,
) -> float:
    """Relative disagreement of values recovered at working orders ``nhat`` and ``2*nhat``.

    Small values indicate a trustworthy recovery; order-of-magnitude values
    signal insufficient excitation or conditioning trouble.  ``rank_tolerance``
    is forwarded to both workspace builds (useful on noisy data, where the
    default machine-precision rank keeps the noise subspace).
    """
    ws_lo = build_workspace(data, nhat, rank_tolerance)
    ws_hi = build_workspace(data, 2 * nhat, rank_tolerance)
    m_lo = recover_value(ws_lo, sigma, **recover_kwargs).M0
    m_hi = recover_value(ws_hi, sigma, **recover_kwargs).M0
    return abs(m_lo - m_hi) / max(abs(m_hi), 1e-300)


SAMPLE_CSV_HEADER = [
    "sigma_re",
    "sigma_im",
    "M0_re",
    "M0_im",
    "M1_re",
    "M1_im",
    "residual0",
    "residual1",
    "kappa",
    "alpha",
    "nhat_used",
]


def _fmt(x: float | None) -> str:
    return "" if x is None else repr(float(x))


def sample_csv_row(s: FrequencySample) -> list[str]:
    return [
        _fmt(s.sigma.real),
        _fmt(s.sigma.imag),
        _fmt(s.M0.real),
        _fmt(s.M0.imag),
        _fmt(s.M1.real if s.M1 is not None else None),
        _fmt(s.M1.imag if s.M1 is not None else None),
        _fmt(s.residual0),
        _fmt(s.residual1),
        _fmt(s.kappa),
        _fmt(s.alpha),
        str(s.nhat_used),
    ]


def write_samples_csv(path, samples, comment_lines: tuple[str, ...] = ()) -> None:
    """Write recovered samples to CSV with the documented column layout."""
    with open(path, "w", newline="") as fh:
        for line in comment_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(SAMPLE_CSV_HEADER)
        for s in samples:
            writer.writerow(sample_csv_row(s))
