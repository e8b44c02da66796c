"""Feasibility LP for a non-entangling map sending the MEMS to an isospectral target.

Variables F_ij = tr(Phi_i Lambda(xi_j)) are stored row-major: index 4*(i-1) + (j-1).
Constraints, for a spectrum lambda and target Bell overlaps m_i = tr(Phi_i sigma):

    sum_j lambda_j F_ij = m_i                  (spectrum rows)
    sum_i F_ij = 1                             (trace rows)
    F_i1 + F_i3 <= 1
    2a(1-a) F_i1 + a^2 F_i2 + (1-a)^2 F_i4 <= 1/2   for every a in the grid
    2a(1-a) F_i3 + a^2 F_i2 + (1-a)^2 F_i4 <= 1/2
    0 <= F_ij <= 1

The last two families hold for every a in [0, 1]; a finite grid is refined by
cutting planes at the maximising a of each quadratic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from memsconv import simplex
from memsconv.qcore import Spectrum, as_spectrum, check_density_matrix, hermitian_eigenvalues, overlap

FEAS_TOL = 1e-9
MARGINAL_FACTOR = 10.0
CUT_TOL = 1e-10
MAX_CUTS = 50
DEFAULT_GRID_SIZE = 101
CERT_TOL = 1e-9


class CutLimitExceeded(RuntimeError):
    pass


def var(i: int, j: int) -> int:
    """Column of F_ij (1-based i, j)."""
    return 4 * (i - 1) + (j - 1)


def uniform_grid(size: int = DEFAULT_GRID_SIZE) -> tuple[float, ...]:
    """`size` uniform points k/(size-1) on [0, 1]; even sizes miss 1/2 and are rejected by build_lp."""
    if size < 3:
        raise ValueError("a-grid needs at least 3 points")
    return tuple(k / (size - 1) for k in range(size))


@dataclass
class LpProblem:
    eq_lhs: np.ndarray
    eq_rhs: np.ndarray
    ineq_lhs: np.ndarray
    ineq_rhs: np.ndarray
    grid: tuple[float, ...]
    lower: float = 0.0
    upper: float = 1.0

    @property
    def n_vars(self) -> int:
        return self.eq_lhs.shape[1]


@dataclass
class FarkasCertificate:
    """Multipliers proving infeasibility; combining every row gives 0^T x <= c with c < 0."""

    eq: np.ndarray     # free sign, one per equality row
    ineq: np.ndarray   # >= 0, one per inequality row
    lower: np.ndarray  # >= 0, on -x_j <= 0
    upper: np.ndarray  # >= 0, on x_j <= 1


@dataclass
class Verdict:
    status: str  # "feasible" or "infeasible"
    f: np.ndarray | None = None                  # 4x4 witness when feasible
    certificate: FarkasCertificate | None = None
    grid: tuple[float, ...] = ()
    cuts: tuple[float, ...] = ()
    iterations: int = 0
    phase1_objective: float = 0.0
    marginal: bool = False
    spectrum: tuple[float, ...] = ()
    target: tuple[float, ...] = ()
    extra: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"

    @property
    def all_points(self) -> tuple[float, ...]:
        return tuple(sorted(set(self.grid) | set(self.cuts)))


def target_overlaps(sigma: np.ndarray) -> np.ndarray:
    sigma = check_density_matrix(sigma)
    return np.array([overlap(sigma, i) for i in range(1, 5)])


def tau_rows(a: float) -> list[np.ndarray]:
    """The eight tau-family rows at parameter a (two per Bell index i)."""
    rows = []
    for i in range(1, 5):
        for first in (1, 3):
            r = np.zeros(16)
            r[var(i, first)] = 2 * a * (1 - a)
            r[var(i, 2)] = a * a
            r[var(i, 4)] = (1 - a) ** 2
            rows.append(r)
    return rows


def build_lp(s, m: Sequence[float], grid: Sequence[float]) -> LpProblem:
    s = as_spectrum(s)
    m = np.asarray(m, dtype=float)
    if m.shape != (4,) or not np.all(np.isfinite(m)):
        raise ValueError("target overlaps must be 4 finite reals")
    grid = tuple(float(a) for a in grid)
    if any(not 0.0 <= a <= 1.0 for a in grid):
        raise ValueError("a-grid values must lie in [0, 1]")
    for a in (0.0, 0.5, 1.0):
        if a not in grid:
            raise ValueError(f"a-grid must contain {a}")

    eq = np.zeros((8, 16))
    for i in range(1, 5):
        for j in range(1, 5):
            eq[i - 1, var(i, j)] = s[j - 1]
            eq[4 + j - 1, var(i, j)] = 1.0
    eq_rhs = np.concatenate([m, np.ones(4)])

    rows = []
    for i in range(1, 5):
        r = np.zeros(16)
        r[var(i, 1)] = r[var(i, 3)] = 1.0
        rows.append(r)
    rhs = [1.0] * 4
    for a in grid:
        rows.extend(tau_rows(a))
        rhs.extend([0.5] * 8)
    return LpProblem(eq, eq_rhs, np.array(rows), np.array(rhs), grid)


def solve_feasibility(p: LpProblem, feas_tol: float = FEAS_TOL) -> Verdict:
    res = simplex.solve(None, p.eq_lhs, p.eq_rhs, p.ineq_lhs, p.ineq_rhs, feas_tol=feas_tol)
    marginal = res.phase1_objective <= MARGINAL_FACTOR * feas_tol and res.phase1_objective > 1e-14
    if res.status == "infeasible":
        coef = res.ray_eq @ p.eq_lhs + res.ray_ub @ p.ineq_lhs
        cert = FarkasCertificate(
            eq=res.ray_eq,
            ineq=res.ray_ub,
            lower=np.maximum(coef, 0.0),
            upper=np.zeros(p.n_vars),
        )
        return Verdict("infeasible", certificate=cert, grid=p.grid, iterations=res.iterations,
                       phase1_objective=res.phase1_objective, marginal=marginal)
    x = np.clip(res.x, 0.0, None)
    if constraint_violation(p, x) > feas_tol:
        marginal = True
    return Verdict("feasible", f=x.reshape(4, 4), grid=p.grid, iterations=res.iterations,
                   phase1_objective=res.phase1_objective, marginal=marginal)


def constraint_violation(p: LpProblem, x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float).ravel()
    return float(max(
        np.max(np.abs(p.eq_lhs @ x - p.eq_rhs)),
        np.max(p.ineq_lhs @ x - p.ineq_rhs, initial=0.0),
        -x.min(),
        x.max() - p.upper,
    ))


def tau_quadratic_max(x: float, y: float, z: float) -> tuple[float, float]:
    """Max over a in [0, 1] of g(a) = 2a(1-a) x + a^2 y + (1-a)^2 z; returns (a*, g(a*))."""

    def g(a: float) -> float:
        return 2 * a * (1 - a) * x + a * a * y + (1 - a) ** 2 * z

    best_a, best = (0.0, z) if z >= y else (1.0, y)
    curv = y + z - 2 * x
    if curv < 0:
        a = min(1.0, max(0.0, (z - x) / curv))
        if g(a) > best:
            best_a, best = a, g(a)
    return best_a, best


def continuum_violation(f: np.ndarray) -> tuple[float, list[float], list[tuple[int, int]]]:
    """Worst excess over 1/2 of the tau constraints on all of [0, 1].

    Also returns the maximising a of each violated quadratic and the violated
    quadratics themselves as (i, first) with first in {1, 3}.
    """
    f = np.asarray(f).reshape(4, 4)
    worst, where, which = -math.inf, [], []
    for i in range(4):
        for first in (0, 2):
            a, val = tau_quadratic_max(f[i, first], f[i, 1], f[i, 3])
            worst = max(worst, val - 0.5)
            if val - 0.5 > CUT_TOL:
                where.append(a)
                which.append((i + 1, first + 1))
    return worst, where, which


def _inner(p: LpProblem, f: np.ndarray, quads: set[tuple[int, int]]) -> LpProblem:
    """Linear inner approximation of the continuum constraint on the given quadratics.

    In Bernstein form 1/2 - g(a) has coefficients P = 1/2 - z, Q = 1/2 - x, R = 1/2 - y,
    and g <= 1/2 on [0, 1] iff P, R >= 0 and Q >= -sqrt(PR). Since
    sqrt(PR) >= min(tP, R/t) for t > 0, the rows Q + tP >= 0 and Q + R/t >= 0 imply it;
    t = sqrt(R/P) at the current witness makes the bound tight there.
    """
    f = np.asarray(f).reshape(4, 4)
    rows, rhs = [], []
    for i, first in sorted(quads):
        P = max(0.5 - f[i - 1, 3], 1e-12)
        R = max(0.5 - f[i - 1, 1], 1e-12)
        t = min(max(math.sqrt(R / P), 1e-4), 1e4)
        for coef_z, coef_y, bound in ((t, 0.0, 0.5 * (1 + t)), (0.0, 1 / t, 0.5 * (1 + 1 / t))):
            r = np.zeros(16)
            r[var(i, first)] = 1.0
            r[var(i, 4)] = coef_z
            r[var(i, 2)] = coef_y
            rows.append(r)
            rhs.append(bound)
    return LpProblem(p.eq_lhs, p.eq_rhs, np.vstack([p.ineq_lhs, rows]),
                     np.concatenate([p.ineq_rhs, rhs]), p.grid)


def refine_continuum(s, m: Sequence[float], v: Verdict, max_cuts: int = MAX_CUTS,
                     feas_tol: float = FEAS_TOL) -> Verdict:
    """Enforce the tau constraints for every a in [0, 1], not just on the grid.

    Each round appends the maximising a of every violated quadratic as a new cut and
    re-solves. When the witness still violates, a second solve adds a linear inner
    approximation of the violated quadratics (see _inner); any solution of that
    restriction is continuum-feasible, which stops slow cut sequences near a = 0 or 1.
    """
    if not v.feasible:
        return v
    s = as_spectrum(s)
    m = np.asarray(m, dtype=float)
    grid, cuts = tuple(v.grid), list(v.cuts)
    iterations = v.iterations
    quads: set[tuple[int, int]] = set()
    while True:
        _, where, which = continuum_violation(v.f)
        if not where:
            break
        quads.update(which)
        new = sorted({a for a in where if a not in grid and a not in cuts})
        if not new:
            raise RuntimeError("violated cut already present; solver and cut disagree")
        if len(cuts) + len(new) > max_cuts:
            raise CutLimitExceeded(f"more than {max_cuts} cuts needed for spectrum {s.values}")
        cuts.extend(new)
        p = build_lp(s, m, sorted(set(grid) | set(cuts)))
        v = solve_feasibility(p, feas_tol)
        iterations += v.iterations
        if not v.feasible:
            break
        worst, _, which = continuum_violation(v.f)
        f = v.f
        while worst > CUT_TOL:
            # widen the inner approximation until its witness is clean or it stops growing
            quads.update(which)
            t = solve_feasibility(_inner(p, f, quads), feas_tol)
            iterations += t.iterations
            if not t.feasible:
                break
            t_worst, _, which = continuum_violation(t.f)
            if t_worst <= CUT_TOL:
                v = t
                break
            if quads.issuperset(which):
                break
            f = t.f
    v.grid, v.cuts, v.iterations = grid, tuple(cuts), iterations
    return v


def verify_farkas(p: LpProblem, c: FarkasCertificate, tol: float = CERT_TOL) -> bool:
    """Independent check of an infeasibility certificate with compensated sums."""
    n = p.n_vars
    shapes = [(c.eq.shape, (p.eq_lhs.shape[0],)), (c.ineq.shape, (p.ineq_lhs.shape[0],)),
              (c.lower.shape, (n,)), (c.upper.shape, (n,))]
    for got, want in shapes:
        if got != want:
            raise ValueError(f"certificate shape {got} does not match problem shape {want}")
    if min(c.ineq.min(initial=0.0), c.lower.min(), c.upper.min()) < 0:
        return False
    coef = []
    for j in range(n):
        terms = [float(u) * float(a) for u, a in zip(c.eq, p.eq_lhs[:, j]) if u and a]
        terms += [float(u) * float(a) for u, a in zip(c.ineq, p.ineq_lhs[:, j]) if u and a]
        terms += [-float(c.lower[j]), float(c.upper[j])]
        coef.append(math.fsum(terms))
    rhs = math.fsum(
        [float(u) * float(b) for u, b in zip(c.eq, p.eq_rhs)]
        + [float(u) * float(b) for u, b in zip(c.ineq, p.ineq_rhs)]
        + [float(u) * p.upper for u in c.upper]
        + [-float(u) * p.lower for u in c.lower]
    )
    return max(abs(x) for x in coef) <= tol and rhs <= -tol


def problem_for(v: Verdict) -> LpProblem:
    """Rebuild the exact LP a verdict was decided on (grid plus cuts)."""
    return build_lp(v.spectrum, v.target, v.all_points)


def feasible_for_overlaps(s, m: Sequence[float], grid_size: int = DEFAULT_GRID_SIZE,
                          feas_tol: float = FEAS_TOL) -> Verdict:
    s = as_spectrum(s)
    m = np.asarray(m, dtype=float)
    v = solve_feasibility(build_lp(s, m, uniform_grid(grid_size)), feas_tol)
    v = refine_continuum(s, m, v, feas_tol=feas_tol)
    v.spectrum, v.target = s.values, tuple(float(x) for x in m)
    return v


def feasible_for_spectrum(s, grid_size: int = DEFAULT_GRID_SIZE, feas_tol: float = FEAS_TOL) -> Verdict:
    """LP verdict for the isospectral Bell-diagonal target sum_j lambda_j Phi_j."""
    s = as_spectrum(s)
    return feasible_for_overlaps(s, s.values, grid_size, feas_tol)


def feasible_for_permutation(s, perm: Sequence[int], grid_size: int = DEFAULT_GRID_SIZE) -> Verdict:
    """Target sum_j lambda_{perm(j)} Phi_j (perm 1-based)."""
    s = as_spectrum(s)
    return feasible_for_overlaps(s, [s[p - 1] for p in perm], grid_size)


def feasible_for_target(s, sigma: np.ndarray, grid_size: int = DEFAULT_GRID_SIZE,
                        iso_tol: float = 1e-9) -> Verdict:
    """LP verdict for an arbitrary isospectral target density matrix."""
    s = as_spectrum(s)
    sigma = check_density_matrix(sigma)
    if np.max(np.abs(hermitian_eigenvalues(sigma) - np.array(s.values))) > iso_tol:
        raise ValueError("target is not isospectral to the given spectrum")
    return feasible_for_overlaps(s, target_overlaps(sigma), grid_size)


def permutation_scan(s, grid_size: int = DEFAULT_GRID_SIZE) -> list[str]:
    """Verdict status for all 24 Bell-diagonal eigenvalue assignments; these always agree."""
    s = as_spectrum(s)
    return [feasible_for_permutation(s, [p + 1 for p in perm], grid_size).status
            for perm in itertools.permutations(range(4))]


# -- flat key=value record ---------------------------------------------------

def _fmt(xs) -> str:
    return ",".join(repr(float(x)) for x in np.ravel(xs))


def _parse(text: str) -> np.ndarray:
    return np.array([float(t) for t in text.split(",")]) if text else np.zeros(0)


def verdict_to_record(v: Verdict) -> str:
    lines = [
        f"spectrum={_fmt(v.spectrum)}",
        f"target={_fmt(v.target)}",
        f"status={v.status}",
        f"grid_size={len(v.grid)}",
        f"cuts={len(v.cuts)}",
        f"cut_points={_fmt(v.cuts)}",
        f"iterations={v.iterations}",
        f"phase1_objective={v.phase1_objective!r}",
        f"marginal={str(v.marginal).lower()}",
    ]
    if v.feasible:
        lines.append(f"F={_fmt(v.f)}")
    else:
        c = v.certificate
        lines += [f"cert_eq={_fmt(c.eq)}", f"cert_ineq={_fmt(c.ineq)}",
                  f"cert_lower={_fmt(c.lower)}", f"cert_upper={_fmt(c.upper)}"]
    return "\n".join(lines) + "\n"


def verdict_from_record(text: str) -> Verdict:
    kv = dict(line.split("=", 1) for line in text.strip().splitlines() if line.strip())
    v = Verdict(
        status=kv["status"],
        grid=uniform_grid(int(kv["grid_size"])),
        cuts=tuple(_parse(kv["cut_points"])),
        iterations=int(kv["iterations"]),
        phase1_objective=float(kv["phase1_objective"]),
        marginal=kv["marginal"] == "true",
        spectrum=tuple(_parse(kv["spectrum"])),
        target=tuple(_parse(kv["target"])),
    )
    if v.feasible:
        v.f = _parse(kv["F"]).reshape(4, 4)
    else:
        v.certificate = FarkasCertificate(*(_parse(kv[k]) for k in ("cert_eq", "cert_ineq", "cert_lower", "cert_upper")))
    return v
