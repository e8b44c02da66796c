"""Closed-form spectral regions and their cross-check against the LP verdict.

Six classes partition the eigenvalue simplex:

  AllSeparable      every state with the spectrum is separable
  TargetSeparable   lambda1 <= 1/2, the Bell-diagonal target is separable
  GreenFeasible     1 - lambda1 - 2 lambda2 >= 0; an explicit NE channel exists
  BlackInfeasible   an analytic exclusion (Thm4, Thm5, Thm6A/B/C) applies
  OrangeInfeasible  excluded by the LP only
  BlueFeasible      LP feasible, nothing decided ("not excluded")

Strict inequalities use a margin `tol` so that floating-point noise on a region
boundary never promotes a point into an exclusion region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from memsconv.nelp import Verdict
from memsconv.qcore import Spectrum, as_spectrum, bell_projector, check_density_matrix

TOL = 1e-9


class Region(str, Enum):
    ALL_SEPARABLE = "AllSeparable"
    TARGET_SEPARABLE = "TargetSeparable"
    GREEN = "GreenFeasible"
    BLACK = "BlackInfeasible"
    ORANGE = "OrangeInfeasible"
    BLUE = "BlueFeasible"


BLACK_DETAILS = ("Thm4", "Thm5", "Thm6A", "Thm6B", "Thm6C")


@dataclass(frozen=True)
class RegionClass:
    tag: Region
    detail: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "tag", Region(self.tag))
        if (self.detail is not None) != (self.tag is Region.BLACK):
            raise ValueError("a detail sub-tag goes with BlackInfeasible and only with it")
        if self.detail is not None and self.detail not in BLACK_DETAILS:
            raise ValueError(f"unknown detail {self.detail!r}")

    def __str__(self) -> str:
        return f"{self.tag.value}({self.detail})" if self.detail else self.tag.value


class RegionInconsistency(RuntimeError):
    """An analytic exclusion disagrees with a feasible LP verdict."""


def all_separable(s, tol: float = TOL) -> bool:
    s = as_spectrum(s)
    return s[0] - s[2] - 2 * math.sqrt(s[1] * s[3]) <= tol


def thm3_applicable(s, tol: float = TOL) -> bool:
    s = as_spectrum(s)
    return 1 - s[0] - 2 * s[1] >= -tol


@dataclass(frozen=True)
class NeChannelSpec:
    """Measure-and-prepare channel: project onto Phi_1, otherwise prepare the rest of the target."""

    spectrum: Spectrum

    def __post_init__(self):
        s = as_spectrum(self.spectrum)
        object.__setattr__(self, "spectrum", s)
        if s[0] >= 1:
            raise ValueError("lambda1 = 1 is the trivial identity case; no channel needed")
        if 1 - s[0] - 2 * s[1] < -1e-12:
            raise ValueError(f"channel needs 1 - lambda1 - 2 lambda2 >= 0, got {s.values}")


def thm3_output_weights(c: NeChannelSpec, x: np.ndarray) -> np.ndarray:
    """Bell weights of the channel output."""
    s = c.spectrum
    p1 = float(np.real(np.trace(bell_projector(1) @ x)))
    rest = (float(np.real(np.trace(x))) - p1) / (1 - s[0])
    return np.array([p1, rest * s[1], rest * s[2], rest * s[3]])


def thm3_channel_apply(c: NeChannelSpec, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    check_density_matrix(x)
    w = thm3_output_weights(c, x)
    return sum(w[k] * bell_projector(k + 1) for k in range(4))


def thm4_infeasible(s, tol: float = TOL) -> bool:
    s = as_spectrum(s)
    return s[2] <= tol and s[3] <= tol and 0.5 + tol < s[0] < 1 - tol


def thm5_infeasible(s, tol: float = TOL) -> bool:
    s = as_spectrum(s)
    return s[2] > tol and s[3] <= tol and 2 * s[0] - s[1] > 1 + tol and s[1] > s[2] + tol


def thm6_region(s, tol: float = TOL) -> str | None:
    """'A', 'B', 'C' or None; only defined for lambda1 > 1/2."""
    l1, l2, l3, l4 = as_spectrum(s)
    if l1 <= 0.5:
        raise ValueError("the three exclusion regions assume lambda1 > 1/2")
    if not 2 * l2 + l3 - l1 < -tol:
        return None
    if 2 * l3 + l4 - l2 < -tol:
        return "A"
    if l3 <= 2 * l4 + tol:
        return "B" if l2 > l3 + l4 + tol else None
    return "C" if l2 > 1.5 * l3 + tol else None


def forced_rank2_values(lam: float) -> tuple[float, float, float, float]:
    """(F11, F21, F12, F22) forced by the equality rows for s = (lam, 1-lam, 0, 0)."""
    if not 0.5 < lam < 1:
        raise ValueError("forced values need 1/2 < lam < 1")
    return (3 * lam - 1) / (2 * lam), (1 - lam) / (2 * lam), 0.5, 0.5


def forced_rank2_excess(lam: float, a: float | None = None) -> float:
    """tau-constraint value minus 1/2 at the forced point; a defaults to 1/(2 lam)."""
    f11, _, f12, _ = forced_rank2_values(lam)
    a = 1 / (2 * lam) if a is None else a
    return 2 * a * (1 - a) * f11 + a * a * f12 - 0.5


def black_detail(s, tol: float = TOL) -> str | None:
    s = as_spectrum(s)
    if thm4_infeasible(s, tol):
        return "Thm4"
    if thm5_infeasible(s, tol):
        return "Thm5"
    if s[0] > 0.5:
        r = thm6_region(s, tol)
        if r is not None:
            return "Thm6" + r
    return None


def near_boundary(s, tol: float = TOL) -> bool:
    """True when some region-defining quantity lies within tol of zero."""
    l1, l2, l3, l4 = as_spectrum(s)
    edges = [
        l1 - l3 - 2 * math.sqrt(l2 * l4),
        l1 - 0.5,
        1 - l1 - 2 * l2,
        2 * l1 - l2 - 1,
        l2 - l3,
        2 * l2 + l3 - l1,
        2 * l3 + l4 - l2,
        l3 - 2 * l4,
        l2 - l3 - l4,
        l2 - 1.5 * l3,
    ]
    return any(abs(e) <= tol for e in edges)


def classify(s, lp: Verdict, tol: float = TOL) -> RegionClass:
    s = as_spectrum(s)
    if all_separable(s, tol):
        return RegionClass(Region.ALL_SEPARABLE)
    if s[0] <= 0.5 + tol:
        return RegionClass(Region.TARGET_SEPARABLE)
    if thm3_applicable(s, tol):
        return RegionClass(Region.GREEN)
    detail = black_detail(s, tol)
    if detail is not None:
        if lp.feasible:
            raise RegionInconsistency(f"{detail} excludes {s.values} but the LP is feasible")
        return RegionClass(Region.BLACK, detail)
    if not lp.feasible:
        return RegionClass(Region.ORANGE)
    return RegionClass(Region.BLUE)
