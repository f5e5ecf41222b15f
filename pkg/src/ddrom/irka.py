"""Fixed-point drivers iterating Hermite interpolants to local H2 optimality.

At a local optimum the reduced transfer function Hermite-interpolates the
full one at the reciprocals of its own poles.  The drivers repeat: sample
value/derivative data at the current points, build the interpolatory pencil,
take the reciprocal of its poles as the next points, and stop when the
(sorted) point set stops moving.  ``tf_irka`` samples a transfer-function
oracle; ``td_irka`` recovers every sample from a single time-domain
trajectory through the data-informativity solves.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .informativity import (
    InformativityWorkspace,
    build_workspace,
    recover_derivative,
    recover_value,
)
from .loewner import HermiteLoewnerROM, build_hermite_loewner, realify, rom_poles
from .lti import DiscreteLTI, TimeSeriesData, TransferEvaluator

__all__ = [
    "IrkaConfig",
    "IterationDiagnostics",
    "IrkaReport",
    "tf_irka",
    "td_irka",
    "default_initial_points",
    "stabilize_points",
    "report_to_json_dict",
    "write_report_summary_csv",
]

# Imaginary parts below this fraction of the largest magnitude are treated as
# real when re-pairing eigenvalues after the eigensolve.
_PAIR_RTOL = 1e-8


@dataclass(frozen=True)
class IrkaConfig:
    """Settings shared by both fixed-point drivers.

    ``nhat`` (the working order of the Hankel stack) and the overflow policy
    apply to the time-domain driver only.  ``initial_points`` must be closed
    under conjugation; if omitted, a logarithmic spread of radius
    ``initial_radius`` is used.
    """

    r: int
    max_iterations: int = 100
    convergence_tol: float = 1e-6
    initial_points: np.ndarray | None = None
    initial_radius: float = 1.05
    stabilization: bool = True
    nhat: int | None = None
    overflow_policy: str = "scaled"
    min_nhat: int = 8
    solve_method: str = "projection"

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("reduced order r must be at least 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not self.convergence_tol > 0:
            raise ValueError("convergence_tol must be positive")
        if self.initial_points is not None:
            pts = np.asarray(self.initial_points, dtype=complex).reshape(-1)
            if pts.shape[0] != self.r:
                raise ValueError("initial_points must have length r")
            if not _is_conjugate_closed(pts):
                raise ValueError("initial_points must be closed under conjugation")
            object.__setattr__(self, "initial_points", pts)


@dataclass(frozen=True)
class IterationDiagnostics:
    iteration: int
    max_move: float
    max_residual: float
    max_kappa: float
    nhat_used: tuple[int, ...] = ()
    reseeded: int = 0


@dataclass(frozen=True)
class IrkaReport:
    """Outcome of a driver run; non-convergence is a reported state, not an error."""

    converged: bool
    iterations: int
    final_points: np.ndarray
    point_history: list
    rom: HermiteLoewnerROM
    diagnostics: list
    optimality_defect: float


def _sort_points(points: np.ndarray) -> np.ndarray:
    order = np.lexsort((points.imag, points.real))
    return points[order]


def _is_conjugate_closed(points: np.ndarray, rtol: float = 1e-10) -> bool:
    a = _sort_points(points)
    b = _sort_points(np.conj(points))
    scale = max(np.abs(points).max(), 1.0)
    return bool(np.all(np.abs(a - b) <= rtol * scale))


def default_initial_points(r: int, radius: float = 1.05) -> np.ndarray:
    """Conjugate-closed starting points of magnitude ``radius``.

    ``r // 2`` frequencies are placed logarithmically inside ``(1e-3, pi)``;
    an odd ``r`` adds the real point ``radius``.
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    if not radius > 1:
        raise ValueError("radius must exceed 1")
    npairs = r // 2
    freqs = np.geomspace(1e-3, np.pi, npairs + 2)[1:-1]
    pts = []
    for w in freqs:
        pts.append(radius * np.exp(1j * w))
        pts.append(radius * np.exp(-1j * w))
    if r % 2:
        pts.append(radius + 0.0j)
    return _sort_points(np.asarray(pts, dtype=complex))


def stabilize_points(points: np.ndarray) -> np.ndarray:
    """Reflect candidate interpolation points to magnitudes above one.

    A point inside the unit circle (a reciprocal of an unstable pole) is
    replaced by the reflection ``1 / conj(sigma)``; points exactly on the
    circle are pushed outward by a relative nudge.  Conjugate closure is
    preserved.
    """
    pts = np.asarray(points, dtype=complex).reshape(-1).copy()
    if np.any(pts == 0) or not np.all(np.isfinite(pts)):
        raise ValueError("zero or non-finite interpolation point (pole at zero or infinity)")
    mags = np.abs(pts)
    inside = mags < 1.0
    pts[inside] = 1.0 / np.conj(pts[inside])
    on_circle = np.abs(np.abs(pts) - 1.0) < 4 * np.finfo(float).eps
    pts[on_circle] *= 1.0 + 1e-8
    return pts


def _conjugate_closure(points: np.ndarray) -> np.ndarray:
    """Re-pair eigenvalue reciprocals into an exactly conjugate-closed set.

    Near-real entries are snapped to the real axis; remaining entries are
    greedily matched with their nearest conjugate partner and each pair is
    replaced by ``(mu, conj(mu))`` with ``mu`` the symmetrized mean.  An
    unmatched leftover is snapped to real as a last resort.
    """
    pts = np.asarray(points, dtype=complex).reshape(-1)
    scale = max(np.abs(pts).max(), 1.0)
    tol = _PAIR_RTOL * scale
    out: list[complex] = [complex(p.real) for p in pts[np.abs(pts.imag) <= tol]]
    upper = sorted(
        (p for p in pts[np.abs(pts.imag) > tol] if p.imag > 0),
        key=lambda p: (p.real, p.imag),
    )
    lower = [p for p in pts[np.abs(pts.imag) > tol] if p.imag < 0]
    for p in upper:
        if lower:
            j = int(np.argmin([abs(np.conj(p) - q) for q in lower]))
            q = lower.pop(j)
            mu = 0.5 * (p + np.conj(q))
            out.extend([mu, np.conj(mu)])
        else:
            out.append(complex(p.real))
    out.extend(complex(q.real) for q in lower)
    return _sort_points(np.asarray(out, dtype=complex))


def _point_movement(old: np.ndarray, new: np.ndarray) -> float:
    a = _sort_points(old)
    b = _sort_points(new)
    return float(np.max(np.abs(b - a) / np.maximum(np.abs(a), 1e-300)))


def _reseed_points(count: int, existing: np.ndarray, radius: float) -> np.ndarray:
    """Fresh real points replacing degenerate pole reciprocals.

    A transient iterate can produce a pole at zero or infinity whose
    reciprocal is unusable as an interpolation point; staggered real
    substitutes keep the point count, conjugate closure, and pairwise
    separation without depending on the broken pole.
    """
    out: list[complex] = []
    val = radius
    while len(out) < count:
        taken = np.concatenate([existing, np.asarray(out, dtype=complex)]) if (len(out) or existing.size) else np.array([])
        if taken.size == 0 or np.min(np.abs(taken - val)) > 1e-6 * val:
            out.append(complex(val))
        val *= 1.1
    return np.asarray(out, dtype=complex)


def _mirror_sample(points: np.ndarray, eval_one) -> tuple[np.ndarray, np.ndarray, list]:
    """Evaluate at conjugate representatives only and mirror the results.

    Exact conjugate symmetry of the sampled data is enforced here so the
    downstream realification is exact; the per-point evaluation results are
    also collected for diagnostics.
    """
    r = points.shape[0]
    vals = np.empty(r, dtype=complex)
    ders = np.empty(r, dtype=complex)
    infos = []
    done = np.zeros(r, dtype=bool)
    scale = max(np.abs(points).max(), 1.0)
    for i in range(r):
        if done[i]:
            continue
        H, Hp, info = eval_one(points[i])
        vals[i], ders[i] = H, Hp
        done[i] = True
        if info is not None:
            infos.append(info)
        if abs(points[i].imag) > 0:
            for j in range(i + 1, r):
                if not done[j] and abs(points[j] - np.conj(points[i])) <= 1e-10 * scale:
                    vals[j] = np.conj(H)
                    ders[j] = np.conj(Hp)
                    done[j] = True
                    break
    return vals, ders, infos


def _oracle_eval_one(H):
    """Normalize the accepted oracle forms to sigma -> (value, derivative)."""
    if isinstance(H, DiscreteLTI):
        ev = TransferEvaluator(H)

        def eval_one(s):
            return complex(ev.value(s)), complex(ev.derivative(s)), None

    elif hasattr(H, "transfer_value") and hasattr(H, "transfer_derivative"):

        def eval_one(s):
            return complex(H.transfer_value(s)), complex(H.transfer_derivative(s)), None

    elif hasattr(H, "value") and hasattr(H, "derivative"):

        def eval_one(s):
            return complex(H.value(s)), complex(H.derivative(s)), None

    elif callable(H):

        def eval_one(s):
            v, d = H(s)
            return complex(v), complex(d), None

    else:
        raise TypeError("oracle must provide transfer values and derivatives")
    return eval_one


def _run_fixed_point(sampler, config: IrkaConfig) -> IrkaReport:
    points = config.initial_points
    if points is None:
        points = default_initial_points(config.r, config.initial_radius)
    points = _sort_points(np.asarray(points, dtype=complex))

    history = [points]
    diagnostics: list[IterationDiagnostics] = []
    converged = False

    for it in range(1, config.max_iterations + 1):
        vals, ders, infos = sampler(points)
        rom = build_hermite_loewner(points, vals, ders)
        poles = rom_poles(rom)
        with np.errstate(divide="ignore"):
            raw = 1.0 / poles
        bad = ~np.isfinite(raw) | (raw == 0)
        n_reseed = int(bad.sum())
        if n_reseed:
            raw = np.concatenate([raw[~bad], _reseed_points(n_reseed, raw[~bad], config.initial_radius)])
        new_points = _conjugate_closure(raw)
        if config.stabilization:
            new_points = stabilize_points(new_points)
        new_points = _sort_points(new_points)
        move = _point_movement(points, new_points)
        diagnostics.append(_make_diag(it, move, infos, n_reseed))
        history.append(new_points)
        points = new_points
        if move < config.convergence_tol:
            converged = True
            break

    vals, ders, infos = sampler(points)
    rom = realify(build_hermite_loewner(points, vals, ders))
    defect = _optimality_defect(rom, sampler)

    return IrkaReport(
        converged=converged,
        iterations=len(history) - 1,
        final_points=points,
        point_history=history,
        rom=rom,
        diagnostics=diagnostics,
        optimality_defect=defect,
    )


def _make_diag(it: int, move: float, infos: list, reseeded: int = 0) -> IterationDiagnostics:
    if infos:
        return IterationDiagnostics(
            iteration=it,
            max_move=move,
            max_residual=max(s.residual0 for s in infos),
            max_kappa=max(s.kappa for s in infos),
            nhat_used=tuple(s.nhat_used for s in infos),
            reseeded=reseeded,
        )
    return IterationDiagnostics(
        iteration=it, max_move=move, max_residual=float("nan"), max_kappa=float("nan"), reseeded=reseeded
    )


def _optimality_defect(rom: HermiteLoewnerROM, sampler) -> float:
    """Largest relative value mismatch between the model and fresh samples
    at the reciprocals of the model's own poles."""
    try:
        test_points = _conjugate_closure(1.0 / rom_poles(rom))
        vals, _, _ = sampler(test_points)
        model_vals = rom.transfer_value(test_points)
        return float(np.max(np.abs(model_vals - vals) / np.maximum(np.abs(vals), 1e-300)))
    except Exception:
        return float("nan")


def tf_irka(H, config: IrkaConfig) -> IrkaReport:
    """Drive the fixed point with a transfer-function oracle.

    ``H`` may be a :class:`DiscreteLTI`, a reduced model, an object with
    ``value``/``derivative`` methods, or a callable returning the
    ``(value, derivative)`` pair.
    """
    eval_one = _oracle_eval_one(H)

    def sampler(points):
        return _mirror_sample(points, eval_one)

    return _run_fixed_point(sampler, config)


def td_irka(
    data: TimeSeriesData,
    config: IrkaConfig,
    workspace: InformativityWorkspace | None = None,
) -> IrkaReport:
    """Drive the fixed point with samples recovered from one trajectory.

    Every value/derivative sample comes from the normalized informativity
    solves against a single Hankel workspace (built once from ``data`` at
    working order ``config.nhat``, or passed in pre-built and shared across
    runs).  Informativity failures abort with the offending point and rank
    condition on the exception; non-convergence is reported, not raised.
    """
    if workspace is None:
        if config.nhat is None:
            raise ValueError("config.nhat is required for time-domain runs")
        workspace = build_workspace(data, config.nhat)

    def eval_one(s):
        sample = recover_value(
            workspace,
            s,
            with_derivative=True,
            overflow_policy=config.overflow_policy,
            min_nhat=config.min_nhat,
            solve_method=config.solve_method,
        )
        if sample.M1 is None:
            sample = recover_derivative(workspace, sample, solve_method=config.solve_method)
        return sample.M0, sample.M1, sample

    def sampler(points):
        return _mirror_sample(points, eval_one)

    return _run_fixed_point(sampler, config)


# -- reporting ----------------------------------------------------------------


def _complex_list(values) -> list:
    return [[float(v.real), float(v.imag)] for v in np.asarray(values, dtype=complex)]


def report_to_json_dict(report: IrkaReport) -> dict:
    return {
        "converged": report.converged,
        "iterations": report.iterations,
        "final_points": _complex_list(report.final_points),
        "point_history": [_complex_list(p) for p in report.point_history],
        "optimality_defect": report.optimality_defect,
        "diagnostics": [
            {
                "iteration": d.iteration,
                "max_move": d.max_move,
                "max_residual": d.max_residual,
                "max_kappa": d.max_kappa,
                "nhat_used": list(d.nhat_used),
                "reseeded": d.reseeded,
            }
            for d in report.diagnostics
        ],
        "rom": {
            "points": _complex_list(report.rom.points),
            "is_real": report.rom.is_real,
            "order": report.rom.order,
        },
    }


def write_report_summary_csv(report: IrkaReport, path, comment_lines: tuple[str, ...] = ()) -> None:
    """Per-iteration summary: ``iteration,max_move,max_residual,max_kappa``."""
    with open(path, "w", newline="") as fh:
        for line in comment_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["iteration", "max_move", "max_residual", "max_kappa"])
        for d in report.diagnostics:
            writer.writerow([d.iteration, repr(d.max_move), repr(d.max_residual), repr(d.max_kappa)])
