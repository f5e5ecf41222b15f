"""Hermite interpolatory reduced models from divided-difference pencils.

Given points ``sigma_i`` with values ``H_i`` and derivatives ``H'_i``, the
pencil ``(L, M)`` of divided differences realizes a degree-r rational
function ``q^T (z L - M)^{-1} q`` matching both value and slope at every
point.  When the points are closed under conjugation, a fixed block-unitary
state transformation produces a real realization with the same transfer
function.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

from .lti import DiscreteLTI

__all__ = [
    "HermiteLoewnerROM",
    "build_hermite_loewner",
    "realify",
    "rom_poles",
    "save_rom",
    "load_rom",
]

_EPS = np.finfo(float).eps
# Points closer than this (relative to the largest magnitude) are rejected:
# merging them would silently change the model order.
_COINCIDENT_RTOL = 1e-10


def _pencil_solve(M: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Dense solve with a minimum-norm fallback for exactly singular pencils.

    Ill-conditioned but regular pencils evaluate the interpolant accurately
    through plain LU (truncated least squares would not).  Data sampled from
    a function of order below the point count makes the pencil exactly
    rank-deficient while the interpolation systems stay consistent; the
    minimum-norm solution then still evaluates the interpolant.
    """
    try:
        return np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(M, rhs, rcond=None)[0]


@dataclass(frozen=True)
class HermiteLoewnerROM:
    """Reduced realization ``(Er, Ar, br, cr)`` built from Hermite data.

    ``points`` records the interpolation points; ``pencil_smin`` is the
    smallest singular value of ``sigma_i * Er - Ar`` over the points, scaled
    by the pencil norm, as an instability diagnostic.
    """

    Er: np.ndarray
    Ar: np.ndarray
    br: np.ndarray
    cr: np.ndarray
    points: np.ndarray
    is_real: bool
    pencil_smin: float

    @property
    def order(self) -> int:
        return self.Er.shape[0]

    # realization aliases shared with DiscreteLTI consumers
    @property
    def E(self) -> np.ndarray:
        return self.Er

    @property
    def A(self) -> np.ndarray:
        return self.Ar

    @property
    def b(self) -> np.ndarray:
        return self.br

    @property
    def c(self) -> np.ndarray:
        return self.cr

    def transfer_value(self, z):
        zs = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.empty(zs.shape, dtype=complex)
        for i, zi in enumerate(zs):
            w = _pencil_solve(zi * self.Er - self.Ar, self.br.astype(complex))
            out[i] = self.cr @ w
        return out[0] if np.ndim(z) == 0 else out

    def transfer_derivative(self, z):
        zs = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.empty(zs.shape, dtype=complex)
        for i, zi in enumerate(zs):
            M = zi * self.Er - self.Ar
            w = _pencil_solve(M, self.br.astype(complex))
            w = _pencil_solve(M, self.Er @ w)
            out[i] = -(self.cr @ w)
        return out[0] if np.ndim(z) == 0 else out

    def to_discrete_lti(self) -> DiscreteLTI:
        """Real realization as a simulatable system (requires ``is_real``)."""
        if not self.is_real:
            raise ValueError("realify the model before converting to a real system")
        return DiscreteLTI(E=self.Er.real, A=self.Ar.real, b=self.br.real, c=self.cr.real)


def build_hermite_loewner(points, values, derivatives) -> HermiteLoewnerROM:
    """Assemble the Hermite divided-difference pencil from sampled data.

    Off-diagonal entries are the negated divided differences of ``H`` and of
    ``z H(z)``; diagonals carry the derivative data.  The resulting transfer
    function interpolates values and derivatives at every point, provided the
    pencil is nonsingular there (checked).
    """
    sig = np.asarray(points, dtype=complex).reshape(-1)
    val = np.asarray(values, dtype=complex).reshape(-1)
    der = np.asarray(derivatives, dtype=complex).reshape(-1)
    r = sig.shape[0]
    if not (val.shape[0] == r and der.shape[0] == r):
        raise ValueError("points, values, and derivatives must have equal length")
    if r == 0:
        raise ValueError("at least one interpolation point is required")

    diff = sig[:, None] - sig[None, :]
    if r > 1:
        off = np.abs(diff) + np.diag(np.full(r, np.inf))
        if off.min() < _COINCIDENT_RTOL * np.abs(sig).max():
            raise ValueError("repeated or near-coincident interpolation points")

    with np.errstate(divide="ignore", invalid="ignore"):
        L = -(val[:, None] - val[None, :]) / diff
        M = -((sig * val)[:, None] - (sig * val)[None, :]) / diff
    np.fill_diagonal(L, -der)
    np.fill_diagonal(M, -(val + sig * der))

    scale = max(np.abs(L).max(), np.abs(M).max(), 1.0)
    smin_rel = np.inf
    for i, s in enumerate(sig):
        P = s * L - M
        svals = np.linalg.svd(P, compute_uv=False)
        smin_rel = min(smin_rel, svals[-1] / max(svals[0], _EPS * scale))
        # The pencil may be legitimately rank-deficient (data of lower order
        # than the point count); reject only when interpolation actually
        # breaks down at a sample point.
        got = val @ _pencil_solve(P, val)
        if abs(got - val[i]) > 1e-2 * max(abs(val[i]), _EPS * scale):
            raise ValueError("interpolation pencil singular at an interpolation point")

    is_real = bool(
        np.abs(sig.imag).max() == 0.0
        and np.abs(val.imag).max() == 0.0
        and np.abs(der.imag).max() == 0.0
    )
    return HermiteLoewnerROM(
        Er=L,
        Ar=M,
        br=val.copy(),
        cr=val.copy(),
        points=sig,
        is_real=is_real,
        pencil_smin=float(smin_rel),
    )


def _pair_conjugates(points: np.ndarray, rtol: float) -> tuple[list[int], list[tuple[int, int]]]:
    """Split indices into real points and conjugate pairs, or fail."""
    scale = max(np.abs(points).max(), 1.0)
    tol = rtol * scale
    unused = list(range(len(points)))
    reals: list[int] = []
    pairs: list[tuple[int, int]] = []
    while unused:
        i = unused.pop(0)
        if abs(points[i].imag) <= tol:
            reals.append(i)
            continue
        best, best_d = None, np.inf
        for j in unused:
            d = abs(points[j] - np.conj(points[i]))
            if d < best_d:
                best, best_d = j, d
        if best is None or best_d > tol:
            raise ValueError("interpolation points are not closed under conjugation")
        unused.remove(best)
        if points[i].imag > 0:
            pairs.append((i, best))
        else:
            pairs.append((best, i))
    return reals, pairs


def realify(rom: HermiteLoewnerROM, rtol: float = 1e-6) -> HermiteLoewnerROM:
    """Transform a conjugate-symmetric model to a real realization.

    Each conjugate pair of states is rotated by the fixed 2x2 unitary mixing
    a value with its conjugate into real and imaginary parts; real points
    pass through unchanged.  The data is symmetrized exactly before the
    transform (pairs within ``rtol`` are averaged), so the resulting matrices
    are real to roundoff and the transfer function is unchanged.
    """
    if rom.is_real:
        return rom
    sig = rom.points.copy()
    val = rom.br.copy()
    reals, pairs = _pair_conjugates(sig, rtol)

    # derivative data sits on the pencil diagonals
    der = -np.diag(rom.Er).copy()
    for i, j in pairs:
        if abs(val[j] - np.conj(val[i])) > rtol * max(abs(val[i]), 1.0):
            raise ValueError("sample values are not conjugate-symmetric across paired points")
        sig_m = 0.5 * (sig[i] + np.conj(sig[j]))
        val_m = 0.5 * (val[i] + np.conj(val[j]))
        der_m = 0.5 * (der[i] + np.conj(der[j]))
        sig[i], sig[j] = sig_m, np.conj(sig_m)
        val[i], val[j] = val_m, np.conj(val_m)
        der[i], der[j] = der_m, np.conj(der_m)
    for i in reals:
        sig[i] = sig[i].real
        val[i] = val[i].real
        der[i] = der[i].real

    sym = build_hermite_loewner(sig, val, der)

    r = len(sig)
    J = np.zeros((r, r), dtype=complex)
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for i in reals:
        J[i, i] = 1.0
    for i, j in pairs:
        J[i, i] = inv_sqrt2
        J[i, j] = inv_sqrt2
        J[j, i] = -1j * inv_sqrt2
        J[j, j] = 1j * inv_sqrt2

    Er = J @ sym.Er @ J.conj().T
    Ar = J @ sym.Ar @ J.conj().T
    br = J @ sym.br
    cr = J.conj() @ sym.cr

    def strip(Mat, name):
        scale = max(np.abs(Mat).max(), 1.0)
        if np.abs(Mat.imag).max() > 1e-12 * scale:
            raise ValueError(f"{name} has non-negligible imaginary part after realification")
        return Mat.real.copy()

    return HermiteLoewnerROM(
        Er=strip(Er, "Er"),
        Ar=strip(Ar, "Ar"),
        br=strip(br, "br"),
        cr=strip(cr, "cr"),
        points=sym.points,
        is_real=True,
        pencil_smin=sym.pencil_smin,
    )


def rom_poles(rom: HermiteLoewnerROM) -> np.ndarray:
    """Generalized eigenvalues of ``(Ar, Er)`` via the QZ algorithm."""
    w = scipy.linalg.eigvals(rom.Ar, rom.Er)
    if np.any(np.isnan(w)):
        raise ValueError("singular pencil: Er and Ar share a null direction")
    return w


def _matrix_to_json(M: np.ndarray):
    M = np.asarray(M)
    if np.iscomplexobj(M):
        return {"re": M.real.tolist(), "im": M.imag.tolist()}
    return M.tolist()


def _matrix_from_json(obj) -> np.ndarray:
    if isinstance(obj, dict):
        return np.asarray(obj["re"]) + 1j * np.asarray(obj["im"])
    return np.asarray(obj, dtype=float)


def save_rom(rom: HermiteLoewnerROM, path) -> None:
    """Write the realization plus interpolation metadata as JSON."""
    obj = {
        "E": _matrix_to_json(rom.Er),
        "A": _matrix_to_json(rom.Ar),
        "b": _matrix_to_json(rom.br),
        "c": _matrix_to_json(rom.cr),
        "points": [[float(p.real), float(p.imag)] for p in rom.points],
        "is_real": rom.is_real,
        "pencil_smin": rom.pencil_smin,
    }
    Path(path).write_text(json.dumps(obj, indent=1) + "\n")


def load_rom(path) -> HermiteLoewnerROM:
    obj = json.loads(Path(path).read_text())
    return HermiteLoewnerROM(
        Er=_matrix_from_json(obj["E"]),
        Ar=_matrix_from_json(obj["A"]),
        br=_matrix_from_json(obj["b"]).reshape(-1),
        cr=_matrix_from_json(obj["c"]).reshape(-1),
        points=np.array([complex(p[0], p[1]) for p in obj["points"]]),
        is_real=bool(obj["is_real"]),
        pencil_smin=float(obj.get("pencil_smin", np.nan)),
    )
