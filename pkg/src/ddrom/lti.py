"""Discrete-time SISO LTI systems: representation, simulation, and transfer functions.

A system is the 4-tuple ``(E, A, b, c)`` with nonsingular ``E``, evolving as
``E x[k+1] = A x[k] + b u[k]``, ``y[k] = c^T x[k]``, with transfer function
``H(z) = c^T (z E - A)^{-1} b``.  Besides direct per-point evaluation, a
:class:`TransferEvaluator` amortizes a generalized Schur decomposition over
many evaluation points.  Synthetic benchmark generators (random stable
systems, upwind advection, and a conducting rod) provide full-order models
for experiments.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg

__all__ = [
    "DiscreteLTI",
    "ContinuousLTI",
    "SimulationState",
    "TimeSeriesData",
    "simulate",
    "step",
    "transfer_value",
    "transfer_derivative",
    "TransferEvaluator",
    "zoh_discretize",
    "random_stable_system",
    "lightly_damped_system",
    "advection_fd_model",
    "heat_fd_model",
    "save_system",
    "load_system",
    "save_timeseries",
    "load_timeseries",
    "save_signal_csv",
    "load_signal_csv",
]


def _as_matrix(M, name: str) -> np.ndarray:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    M = M.copy()
    M.setflags(write=False)
    return M


def _as_vector(v, n: int, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=float).reshape(-1)
    if v.shape[0] != n:
        raise ValueError(f"{name} must have length {n}, got {v.shape[0]}")
    v = v.copy()
    v.setflags(write=False)
    return v


def _check_nonsingular(E: np.ndarray) -> None:
    sv = np.linalg.svd(E, compute_uv=False)
    n = E.shape[0]
    if sv[-1] <= n * np.finfo(float).eps * sv[0]:
        raise ValueError("singular descriptor matrix")


@dataclass(frozen=True)
class DiscreteLTI:
    """State-space realization ``(E, A, b, c)`` of a discrete-time SISO system.

    ``E`` must be nonsingular; ``stable`` records asymptotic stability (all
    generalized eigenvalues of ``(A, E)`` inside the open unit disk) when
    known, ``None`` when unchecked.
    """

    E: np.ndarray
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    stable: bool | None = None

    def __post_init__(self):
        E = _as_matrix(self.E, "E")
        n = E.shape[0]
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "A", _as_matrix(self.A, "A"))
        if self.A.shape[0] != n:
            raise ValueError("A must have the same shape as E")
        object.__setattr__(self, "b", _as_vector(self.b, n, "b"))
        object.__setattr__(self, "c", _as_vector(self.c, n, "c"))
        _check_nonsingular(E)

    @property
    def order(self) -> int:
        return self.E.shape[0]

    def poles(self) -> np.ndarray:
        """Generalized eigenvalues of ``(A, E)``."""
        return scipy.linalg.eigvals(self.A, self.E)

    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.poles())))

    def is_stable(self) -> bool:
        return self.spectral_radius() < 1.0


@dataclass(frozen=True)
class ContinuousLTI:
    """Continuous-time counterpart of :class:`DiscreteLTI`.

    ``sampling_frequency`` is the default rate (Hz) used by
    :func:`zoh_discretize` when none is passed explicitly.
    """

    E: np.ndarray
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    sampling_frequency: float | None = None
    stable: bool | None = None

    def __post_init__(self):
        E = _as_matrix(self.E, "E")
        n = E.shape[0]
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "A", _as_matrix(self.A, "A"))
        if self.A.shape[0] != n:
            raise ValueError("A must have the same shape as E")
        object.__setattr__(self, "b", _as_vector(self.b, n, "b"))
        object.__setattr__(self, "c", _as_vector(self.c, n, "c"))
        _check_nonsingular(E)

    @property
    def order(self) -> int:
        return self.E.shape[0]

    def poles(self) -> np.ndarray:
        return scipy.linalg.eigvals(self.A, self.E)

    def is_stable(self) -> bool:
        return bool(np.max(self.poles().real) < 0.0)


@dataclass
class SimulationState:
    """State vector and time index of an in-progress simulation."""

    x: np.ndarray
    k: int = 0


@dataclass(frozen=True)
class TimeSeriesData:
    """Paired input/output trajectories ``u[0..T]``, ``y[0..T]``."""

    U: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        U = np.asarray(self.U, dtype=float).reshape(-1)
        Y = np.asarray(self.Y, dtype=float).reshape(-1)
        if U.shape != Y.shape:
            raise ValueError("U and Y must have equal length")
        if U.shape[0] < 2:
            raise ValueError("trajectories must have length at least 2")
        U = U.copy()
        Y = Y.copy()
        U.setflags(write=False)
        Y.setflags(write=False)
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "Y", Y)

    @property
    def T(self) -> int:
        """Final time index; trajectories have ``T + 1`` samples."""
        return self.U.shape[0] - 1


class _Stepper:
    """One-step state update ``x <- E^{-1}(A x + b u)`` with ``E`` factored once."""

    def __init__(self, sys: DiscreteLTI):
        self.A = sys.A
        self.b = sys.b
        n = sys.order
        self._identity = bool(np.array_equal(sys.E, np.eye(n)))
        self._lu = None if self._identity else scipy.linalg.lu_factor(sys.E)

    def advance(self, x: np.ndarray, u: float) -> np.ndarray:
        w = self.A @ x + self.b * u
        if self._identity:
            return w
        return scipy.linalg.lu_solve(self._lu, w)


def simulate(sys: DiscreteLTI, U: np.ndarray, x0: np.ndarray | None = None) -> TimeSeriesData:
    """Simulate the system driven by input ``U`` and return the trajectory pair.

    Parameters
    ----------
    sys : DiscreteLTI
        System to simulate.
    U : array_like
        Input samples ``u[0..T]``.
    x0 : array_like, optional
        Initial state; defaults to zero.

    Returns
    -------
    TimeSeriesData
        Input and output trajectories of equal length, ``y[k] = c^T x[k]``.
    """
    U = np.asarray(U, dtype=float).reshape(-1)
    n = sys.order
    if x0 is None:
        x = np.zeros(n)
    else:
        x = np.asarray(x0, dtype=float).reshape(-1)
        if x.shape[0] != n:
            raise ValueError(f"x0 must have length {n}")
        x = x.copy()

    stepper = _Stepper(sys)
    Y = np.empty_like(U)
    for k, u in enumerate(U):
        Y[k] = sys.c @ x
        x = stepper.advance(x, u)
    return TimeSeriesData(U=U, Y=Y)


def step(sys: DiscreteLTI, state: SimulationState, u: float) -> tuple[SimulationState, float]:
    """Advance one time step; returns the new state and the output at the old one."""
    if state.x.shape[0] != sys.order:
        raise ValueError("state dimension does not match system order")
    y = float(sys.c @ state.x)
    x_next = _Stepper(sys).advance(np.asarray(state.x, dtype=float), u)
    return SimulationState(x=x_next, k=state.k + 1), y


def transfer_value(sys, z: complex) -> complex:
    """Evaluate ``H(z) = c^T (z E - A)^{-1} b`` by a dense solve."""
    M = z * sys.E - sys.A
    try:
        w = np.linalg.solve(M, sys.b.astype(complex))
    except np.linalg.LinAlgError as exc:
        raise ValueError("evaluation at pole") from exc
    return complex(sys.c @ w)


def transfer_derivative(sys, z: complex) -> complex:
    """Evaluate ``H'(z) = -c^T (z E - A)^{-1} E (z E - A)^{-1} b``."""
    M = z * sys.E - sys.A
    try:
        w = np.linalg.solve(M, sys.b.astype(complex))
        w = np.linalg.solve(M, sys.E @ w)
    except np.linalg.LinAlgError as exc:
        raise ValueError("evaluation at pole") from exc
    return complex(-(sys.c @ w))


class TransferEvaluator:
    """Fast repeated evaluation of ``H`` and ``H'`` via one QZ decomposition.

    After an O(n^3) setup, each point costs one or two triangular solves.
    Results match :func:`transfer_value` / :func:`transfer_derivative`.
    Instances are immutable after construction and safe to share between
    threads.
    """

    def __init__(self, sys):
        A = np.asarray(sys.A)
        E = np.asarray(sys.E)
        AA, BB, Q, Z = scipy.linalg.qz(A, E, output="complex")
        self._AA = AA
        self._BB = BB
        self._bt = Q.conj().T @ np.asarray(sys.b, dtype=complex)
        self._ct = np.asarray(sys.c, dtype=complex) @ Z

    def value(self, z):
        zs = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.empty(zs.shape, dtype=complex)
        for i, zi in enumerate(zs):
            M = zi * self._BB - self._AA
            w = scipy.linalg.solve_triangular(M, self._bt)
            out[i] = self._ct @ w
        return out[0] if np.isscalar(z) or np.ndim(z) == 0 else out

    def derivative(self, z):
        zs = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.empty(zs.shape, dtype=complex)
        for i, zi in enumerate(zs):
            M = zi * self._BB - self._AA
            w = scipy.linalg.solve_triangular(M, self._bt)
            w = scipy.linalg.solve_triangular(M, self._BB @ w)
            out[i] = -(self._ct @ w)
        return out[0] if np.isscalar(z) or np.ndim(z) == 0 else out


def zoh_discretize(csys: ContinuousLTI, fs: float | None = None) -> DiscreteLTI:
    """Zero-order-hold discretization at sampling frequency ``fs`` (Hz).

    Computes ``A_d = exp(E^{-1} A h)`` and the held-input matrix through the
    augmented matrix exponential (scaling-and-squaring with Pade
    approximation), with ``h = 1/fs``.  The result has ``E = I``.
    """
    if fs is None:
        fs = csys.sampling_frequency
    if fs is None or not fs > 0:
        raise ValueError("sampling frequency must be positive")
    n = csys.order
    Ac = np.linalg.solve(csys.E, csys.A)
    bc = np.linalg.solve(csys.E, csys.b)
    aug = np.zeros((n + 1, n + 1))
    aug[:n, :n] = Ac
    aug[:n, n] = bc
    phi = scipy.linalg.expm(aug / fs)
    return DiscreteLTI(
        E=np.eye(n),
        A=phi[:n, :n],
        b=phi[:n, n],
        c=csys.c,
        stable=csys.stable,
    )


def random_stable_system(n: int, spectral_radius_bound: float, seed: int) -> DiscreteLTI:
    """Random asymptotically stable system with ``E = I`` and known radius bound.

    Eigenvalues are drawn as complex-conjugate pairs (plus one real value for
    odd ``n``) with moduli at most ``spectral_radius_bound`` and assembled in
    real 2x2 block form; ``b`` and ``c`` come from the same seeded stream.
    The same seed reproduces the same system exactly.
    """
    if not 0 < spectral_radius_bound < 1:
        raise ValueError("spectral_radius_bound must lie in (0, 1)")
    if n < 1:
        raise ValueError("order must be positive")
    rng = np.random.default_rng(seed)
    A = np.zeros((n, n))
    npairs = n // 2
    moduli = spectral_radius_bound * rng.uniform(0.2, 1.0, size=npairs)
    angles = rng.uniform(0.1, np.pi - 0.1, size=npairs)
    for i in range(npairs):
        re = moduli[i] * np.cos(angles[i])
        im = moduli[i] * np.sin(angles[i])
        j = 2 * i
        A[j, j] = re
        A[j, j + 1] = im
        A[j + 1, j] = -im
        A[j + 1, j + 1] = re
    if n % 2:
        sign = 1.0 if rng.random() < 0.5 else -1.0
        A[n - 1, n - 1] = sign * spectral_radius_bound * rng.uniform(0.2, 1.0)
    b = rng.standard_normal(n)
    c = rng.standard_normal(n)
    return DiscreteLTI(E=np.eye(n), A=A, b=b, c=c, stable=True)


def lightly_damped_system(
    n: int,
    damping: float = 5e-3,
    theta_min: float = 1e-2,
    theta_max: float = 2.0,
    seed: int = 0,
) -> DiscreteLTI:
    """Dense spread of lightly damped resonances, as a flexible-structure stand-in.

    ``n/2`` oscillator pairs sit at logarithmically spaced angles with pole
    moduli near ``1 - damping`` and seeded random residues.  Recovering the
    frequency response of such a system on the unit circle is ill-conditioned
    until the Hankel depth resolves the slow decay, while points outside the
    circle stay benign; that contrast drives the working-order experiments.
    """
    if n < 2 or n % 2:
        raise ValueError("n must be a positive even number")
    if not 0 < damping < 1:
        raise ValueError("damping must lie in (0, 1)")
    if not 0 < theta_min < theta_max < np.pi:
        raise ValueError("need 0 < theta_min < theta_max < pi")
    rng = np.random.default_rng(seed)
    npairs = n // 2
    theta = np.geomspace(theta_min, theta_max, npairs)
    rho = (1.0 - damping) * (1.0 - 0.1 * damping * rng.random(npairs))
    phi = rng.uniform(0.05, 0.2, npairs) * np.exp(1j * rng.uniform(0, 2 * np.pi, npairs))
    A = np.zeros((n, n))
    b = np.zeros(n)
    c = np.zeros(n)
    for i in range(npairs):
        lam = rho[i] * np.exp(1j * theta[i])
        j = 2 * i
        # companion block realizing phi/(z - lam) + conj pair
        A[j, j] = 2.0 * lam.real
        A[j, j + 1] = -abs(lam) ** 2
        A[j + 1, j] = 1.0
        b[j] = 1.0
        c[j] = 2.0 * phi[i].real
        c[j + 1] = -2.0 * (phi[i] * np.conj(lam)).real
    return DiscreteLTI(E=np.eye(n), A=A, b=b, c=c, stable=True)


def advection_fd_model(n: int, a: float, fs: float) -> DiscreteLTI:
    """Transport of a boundary signal across the unit interval, discretized.

    First-order upwind differences on ``n`` cells for ``v_t = -a v_x`` with
    the left boundary driven by the input and the last cell read as output,
    followed by zero-order-hold sampling at ``fs``.  Requires ``fs > a * n``
    so the sampling resolves the per-cell transport time.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not a > 0:
        raise ValueError("transport velocity a must be positive")
    if not fs > a * n:
        raise ValueError(f"CFL violation: need fs > a*n = {a * n}")
    rate = a * n  # a / dx with dx = 1/n
    Ac = -rate * np.eye(n)
    idx = np.arange(n - 1)
    Ac[idx + 1, idx] = rate
    bc = np.zeros(n)
    bc[0] = rate
    c = np.zeros(n)
    c[-1] = 1.0
    csys = ContinuousLTI(E=np.eye(n), A=Ac, b=bc, c=c, stable=True)
    return zoh_discretize(csys, fs)


def heat_fd_model(
    n: int,
    Cp: float,
    rho: float,
    K0: float,
    output_x: float,
    fs: float,
) -> DiscreteLTI:
    """Heat conduction in a rod: fixed left end, flux-driven right end.

    Centered second differences on ``n`` interior-plus-boundary nodes of
    ``Cp * rho * T_t = K0 * T_xx`` on (0, 1), with ``T(0) = 0`` and the input
    prescribing the temperature gradient (flux / K0) at ``x = 1`` via a ghost
    node.  The output is the temperature at the node nearest ``output_x``.
    Discretized by zero-order hold at ``fs``.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    if min(Cp, rho, K0, fs) <= 0:
        raise ValueError("physical constants and fs must be positive")
    if not 0 < output_x < 1:
        raise ValueError("output_x must lie in (0, 1)")
    kappa = K0 / (Cp * rho)
    dx = 1.0 / n
    w = kappa / dx**2
    Ac = np.zeros((n, n))
    idx = np.arange(n)
    Ac[idx, idx] = -2.0 * w
    Ac[idx[:-1], idx[:-1] + 1] = w
    Ac[idx[1:], idx[1:] - 1] = w
    # Ghost-node elimination at the Neumann end doubles the inner coupling.
    Ac[n - 1, n - 2] = 2.0 * w
    bc = np.zeros(n)
    bc[n - 1] = 2.0 * kappa / (K0 * dx)
    c = np.zeros(n)
    i_out = int(round(output_x * n)) - 1
    c[min(max(i_out, 0), n - 1)] = 1.0
    csys = ContinuousLTI(E=np.eye(n), A=Ac, b=bc, c=c, stable=True)
    return zoh_discretize(csys, fs)


# -- serialization -----------------------------------------------------------


def system_to_json_dict(sys) -> dict:
    return {
        "E": np.asarray(sys.E).tolist(),
        "A": np.asarray(sys.A).tolist(),
        "b": np.asarray(sys.b).tolist(),
        "c": np.asarray(sys.c).tolist(),
    }


def save_system(sys, path) -> None:
    """Write a system as row-major JSON matrices."""
    Path(path).write_text(json.dumps(system_to_json_dict(sys), indent=1) + "\n")


def load_system(path) -> DiscreteLTI:
    obj = json.loads(Path(path).read_text())
    return DiscreteLTI(E=obj["E"], A=obj["A"], b=obj["b"], c=obj["c"])


def save_signal_csv(path, values: np.ndarray, label: str, comment_lines: tuple[str, ...] = ()) -> None:
    """Write one trajectory as two-column CSV ``k,<label>`` with a header row."""
    with open(path, "w", newline="") as fh:
        for line in comment_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["k", label])
        for k, v in enumerate(np.asarray(values).reshape(-1)):
            writer.writerow([k, repr(float(v))])


def load_signal_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows or rows[0][0] != "k":
        raise ValueError(f"{path}: expected header row starting with 'k'")
    return np.array([float(r[1]) for r in rows[1:]])


def save_timeseries(data: TimeSeriesData, u_path, y_path, comment_lines: tuple[str, ...] = ()) -> None:
    save_signal_csv(u_path, data.U, "u", comment_lines)
    save_signal_csv(y_path, data.Y, "y", comment_lines)


def load_timeseries(u_path, y_path) -> TimeSeriesData:
    return TimeSeriesData(U=load_signal_csv(u_path), Y=load_signal_csv(y_path))
