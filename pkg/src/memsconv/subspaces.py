"""Separable-ray geometry of 2- and 3-dimensional two-qubit subspaces.

A ket is a product vector iff its 2x2 reshape is singular. On a 2-d subspace
span{b1, b2} the map (alpha, beta) -> det(reshape2(alpha b1 + beta b2)) is a
binary quadratic form, so the subspace holds one, two or only separable rays.
A 3-d subspace is classified by its orthogonal complement. Both labels are
invariant under invertible local operators A (x) B, which is what makes them
obstructions to SEP conversions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from memsconv.qcore import (
    as_spectrum,
    hermitian_eigh,
    is_entangled,
    max_entangling_epsilon,
    mems,
    perturbed_mems,
)

ORTHO_TOL = 1e-12
DEPENDENT_TOL = 1e-10
ALL_TOL = 1e-12  # all three quadratic coefficients below this: every ray separable
DISCRIMINANT_TOL = 1e-10  # relative to the squared coefficient norm
DET_TOL = 1e-10
INVERTIBLE_TOL = 1e-8
SUPPORT_TOL = 1e-10


class SeparableCount(str, Enum):
    ONE = "One"
    TWO = "Two"
    ALL = "All"


class ComplementClass(str, Enum):
    SEPARABLE = "SeparableComplement"
    ENTANGLED = "EntangledComplement"


def _orthonormalize(vectors) -> np.ndarray:
    # modified Gram-Schmidt, two passes
    out: list[np.ndarray] = []
    for v in vectors:
        w = np.asarray(v, dtype=complex).ravel().copy()
        if w.shape != (4,):
            raise ValueError("kets must have 4 amplitudes")
        scale = np.linalg.norm(w)
        for _ in range(2):
            for u in out:
                w -= (u.conj() @ w) * u
        n = np.linalg.norm(w)
        if n <= DEPENDENT_TOL * max(scale, 1.0):
            raise ValueError("vectors are linearly dependent")
        out.append(w / n)
    return np.array(out)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Orthonormal basis stored as rows of a (d, 4) complex array."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim != 2 or b.shape[1] != 4 or not 1 <= b.shape[0] <= 4:
            raise ValueError(f"basis must be (d, 4), got {b.shape}")
        gram = b.conj() @ b.T
        if np.max(np.abs(gram - np.eye(b.shape[0]))) > ORTHO_TOL:
            raise ValueError("basis is not orthonormal")
        object.__setattr__(self, "basis", b)

    @classmethod
    def span(cls, *vectors) -> "Subspace":
        return cls(_orthonormalize(vectors))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def projector(self) -> np.ndarray:
        return self.basis.T @ self.basis.conj()

    def same_as(self, other: "Subspace", tol: float = 1e-9) -> bool:
        return self.dim == other.dim and np.max(np.abs(self.projector() - other.projector())) <= tol


@dataclass(frozen=True)
class LocalPair:
    """Local operator A (x) B acting on both qubits."""

    a: np.ndarray
    b: np.ndarray

    def operator(self) -> np.ndarray:
        return np.kron(np.asarray(self.a, dtype=complex), np.asarray(self.b, dtype=complex))

    def invertible(self, tol: float = INVERTIBLE_TOL) -> bool:
        return abs(np.linalg.det(self.a)) >= tol and abs(np.linalg.det(self.b)) >= tol

    def inverse(self) -> "LocalPair":
        return LocalPair(np.linalg.inv(self.a), np.linalg.inv(self.b))


def reshape2(k: np.ndarray) -> np.ndarray:
    """M[i, j] = amplitude of |ij>."""
    return np.asarray(k, dtype=complex).reshape(2, 2)


def det2(k: np.ndarray) -> complex:
    k = np.asarray(k, dtype=complex).ravel()
    return complex(k[0] * k[3] - k[1] * k[2])


def is_product(k: np.ndarray, tol: float = DET_TOL) -> bool:
    return abs(det2(k)) <= tol


def ray_quadratic(v: Subspace) -> tuple[complex, complex, complex]:
    """Coefficients (a, b, c) of det(reshape2(alpha b1 + beta b2)) = a alpha^2 + b alpha beta + c beta^2."""
    if v.dim != 2:
        raise ValueError("ray_quadratic needs a 2-dimensional subspace")
    p, q = v.basis
    a = det2(p)
    c = det2(q)
    b = complex(p[0] * q[3] + q[0] * p[3] - p[1] * q[2] - q[1] * p[2])
    return a, b, c


def separable_ray_count(v: Subspace) -> SeparableCount:
    a, b, c = ray_quadratic(v)
    norm2 = abs(a) ** 2 + abs(b) ** 2 + abs(c) ** 2
    if max(abs(a), abs(b), abs(c)) < ALL_TOL:
        return SeparableCount.ALL
    # b^2 - 4ac vanishes exactly for a double root on the projective line, including
    # the chart a = 0 where (alpha : beta) = (1 : 0) is a root
    if abs(b * b - 4 * a * c) <= DISCRIMINANT_TOL * norm2:
        return SeparableCount.ONE
    return SeparableCount.TWO


def separable_rays(v: Subspace) -> list[np.ndarray]:
    """Normalized product vectors spanning the separable rays (empty when all are)."""
    count = separable_ray_count(v)
    if count is SeparableCount.ALL:
        return []
    a, b, c = ray_quadratic(v)
    scale = math.sqrt(abs(a) ** 2 + abs(b) ** 2 + abs(c) ** 2)
    roots: list[tuple[complex, complex]] = []
    if abs(a) <= ALL_TOL * scale:
        # beta = 0 is a root; the other comes from b alpha + c beta = 0
        roots.append((1.0, 0.0))
        if abs(b) > ALL_TOL * scale:
            roots.append((-c / b, 1.0))
    else:
        d = np.sqrt(complex(b * b - 4 * a * c))
        roots.extend([((-b + d) / (2 * a), 1.0), ((-b - d) / (2 * a), 1.0)])
    if count is SeparableCount.ONE:
        roots = roots[:1]
    out = []
    for alpha, beta in roots:
        w = alpha * v.basis[0] + beta * v.basis[1]
        out.append(w / np.linalg.norm(w))
    return out


def orthogonal_complement(v: Subspace) -> np.ndarray:
    """Unit vector orthogonal to a 3-d subspace: the largest canonical-vector residual."""
    if v.dim != 3:
        raise ValueError("orthogonal_complement needs a 3-dimensional subspace")
    best = None
    for e in np.eye(4, dtype=complex):
        w = e.copy()
        for _ in range(2):
            for u in v.basis:
                w -= (u.conj() @ w) * u
        if best is None or np.linalg.norm(w) > np.linalg.norm(best):
            best = w
    return best / np.linalg.norm(best)


def complement_class(v: Subspace, tol: float = DET_TOL) -> ComplementClass:
    if is_product(orthogonal_complement(v), tol):
        return ComplementClass.SEPARABLE
    return ComplementClass.ENTANGLED


def apply_local(v: Subspace, p: LocalPair) -> Subspace:
    if not p.invertible():
        raise ValueError("local pair is singular")
    op = p.operator()
    return Subspace.span(*(op @ u for u in v.basis))


def support(rho: np.ndarray, tol: float = SUPPORT_TOL) -> Subspace:
    w, vecs = hermitian_eigh(rho)
    keep = [vecs[:, k] for k in range(4) if w[k] > tol]
    return Subspace.span(*keep)


def random_local_pair(rng: np.random.Generator) -> LocalPair:
    """Complex Gaussian 2x2 factors, redrawn until invertible."""
    while True:
        a, b = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(2))
        p = LocalPair(a, b)
        if p.invertible():
            return p


def _check_eps(s, eps: float) -> None:
    if eps < 0:
        raise ValueError("eps must be non-negative")
    if eps > 0:
        limit = max_entangling_epsilon(s)
        if eps > limit:
            raise ValueError(f"eps={eps} exceeds the entangling threshold {limit}")


def sep_obstruction_rank2(s, eps: float) -> bool:
    """True when no SEP map sends mems(s) to perturbed_mems(s, eps) for s = (lam, 1-lam, 0, 0).

    The source support holds exactly one separable ray, the target support two;
    local invertible operators cannot change that count.
    """
    s = as_spectrum(s)
    lam = s[0]
    if s[2] > 1e-12 or s[3] > 1e-12 or not 0.5 - 1e-12 <= lam < 1:
        raise ValueError(f"rank-2 obstruction needs (lam, 1-lam, 0, 0) with lam in [1/2, 1), got {s.values}")
    _check_eps(s, eps)
    target = perturbed_mems(s, eps)
    src = separable_ray_count(support(mems(s)))
    tgt = separable_ray_count(support(target))
    return src is SeparableCount.ONE and tgt is SeparableCount.TWO and is_entangled(target)


def sep_obstruction_rank3(s, eps: float) -> bool:
    """True when no SEP map sends mems(s) to perturbed_mems(s, eps) for rank-3 s with lam1 != lam3.

    The source support has a product complement (|10>), the target an entangled one.
    """
    s = as_spectrum(s)
    if s[2] <= 1e-12 or s[3] > 1e-12:
        raise ValueError(f"rank-3 obstruction needs lambda3 > 0 = lambda4, got {s.values}")
    if abs(s[0] - s[2]) <= 1e-12:
        raise ValueError("lambda1 = lambda3 is excluded: every state with this spectrum is separable")
    _check_eps(s, eps)
    target = perturbed_mems(s, eps)
    src = complement_class(support(mems(s)))
    tgt = complement_class(support(target))
    return (src is ComplementClass.SEPARABLE and tgt is ComplementClass.ENTANGLED
            and is_entangled(target))
