"""Two-qubit states: Bell basis, MEMS, Bell-diagonal and tau-family states, PPT test.

Kets are complex arrays of shape (4,) in the computational basis
|00>, |01>, |10>, |11>; operators and density matrices are (4, 4) complex arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

# minimum eigenvalue of rho^Gamma below -PPT_TOL counts as entangled
PPT_TOL = 1e-10
HERMITIAN_TOL = 1e-10

JACOBI_OFF_TOL = 1e-13
JACOBI_MAX_SWEEPS = 60

_S = 1 / math.sqrt(2)
_BELL = np.array(
    [
        [_S, 0, 0, _S],
        [_S, 0, 0, -_S],
        [0, _S, _S, 0],
        [0, -_S, _S, 0],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class Spectrum:
    """Ordered eigenvalues lambda1 >= lambda2 >= lambda3 >= lambda4 >= 0 summing to 1."""

    values: tuple[float, float, float, float]

    def __init__(self, values: Sequence[float], tol: float = 1e-12):
        vals = tuple(float(v) for v in values)
        if len(vals) != 4:
            raise ValueError(f"spectrum needs 4 values, got {len(vals)}")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite spectrum {vals}")
        if vals[3] < -tol:
            raise ValueError(f"negative eigenvalue in {vals}")
        if any(vals[k] < vals[k + 1] - tol for k in range(3)):
            raise ValueError(f"spectrum not in non-increasing order: {vals}")
        if abs(math.fsum(vals) - 1.0) > tol:
            raise ValueError(f"spectrum does not sum to 1: {vals}")
        object.__setattr__(self, "values", vals)

    def __iter__(self) -> Iterator[float]:
        return iter(self.values)

    def __getitem__(self, k: int) -> float:
        return self.values[k]

    def __len__(self) -> int:
        return 4

    @property
    def rank(self) -> int:
        return sum(v > 1e-12 for v in self.values)


def as_spectrum(s) -> Spectrum:
    return s if isinstance(s, Spectrum) else Spectrum(s)


def ket(*amplitudes) -> np.ndarray:
    return np.asarray(amplitudes, dtype=complex).reshape(4)


def basis_ket(label: str) -> np.ndarray:
    """Computational basis ket from a label such as "01"."""
    v = np.zeros(4, dtype=complex)
    v[int(label, 2)] = 1.0
    return v


def projector(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def bell_ket(i: int) -> np.ndarray:
    """Bell vector |Phi_i>, i in 1..4, ordered Phi+, Phi-, Psi+, Psi- with the 1/sqrt2 phases below.

    |Phi_1> = (|00>+|11>)/sqrt2, |Phi_2> = (|00>-|11>)/sqrt2,
    |Phi_3> = (|10>+|01>)/sqrt2, |Phi_4> = (|10>-|01>)/sqrt2.
    """
    if i not in (1, 2, 3, 4):
        raise ValueError(f"Bell index must be in 1..4, got {i}")
    return _BELL[i - 1].copy()


def bell_projector(i: int) -> np.ndarray:
    return projector(bell_ket(i))


def xi(j: int) -> np.ndarray:
    """The four orthogonal rank-1 pieces of the MEMS: Phi_1, |01><01|, Phi_2, |10><10|."""
    if j == 1:
        return bell_projector(1)
    if j == 2:
        return projector(basis_ket("01"))
    if j == 3:
        return bell_projector(2)
    if j == 4:
        return projector(basis_ket("10"))
    raise ValueError(f"xi index must be in 1..4, got {j}")


def mems(s) -> np.ndarray:
    s = as_spectrum(s)
    return sum(lam * xi(j) for j, lam in enumerate(s, start=1))


def bell_diagonal(s, perm: Sequence[int] = (1, 2, 3, 4)) -> np.ndarray:
    """sum_j lambda_{perm(j)} Phi_j, with perm given 1-based."""
    s = as_spectrum(s)
    perm = tuple(perm)
    if sorted(perm) != [1, 2, 3, 4]:
        raise ValueError(f"not a permutation of 1..4: {perm}")
    return sum(s[perm[j] - 1] * bell_projector(j + 1) for j in range(4))


def bell_mixture(p: Sequence[float]) -> np.ndarray:
    """sum_i p_i Phi_i for arbitrary weights (not necessarily ordered)."""
    return sum(float(p[i]) * bell_projector(i + 1) for i in range(4))


def tau_state(a: float, sign: int = +1, tilde: bool = False) -> np.ndarray:
    """Separable family used for the semi-infinite LP constraints.

    2a(1-a) Phi + a^2 |01><01| + (1-a)^2 |10><10| +- a(1-a)(|01><10| + |10><01|),
    with Phi = Phi_1 (tilde=False) or Phi_2 (tilde=True).
    """
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"a must lie in [0, 1], got {a}")
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    b = 1.0 - a
    phi = bell_projector(2 if tilde else 1)
    e01, e10 = basis_ket("01"), basis_ket("10")
    cross = np.outer(e01, e10) + np.outer(e10, e01)
    return 2 * a * b * phi + a * a * projector(e01) + b * b * projector(e10) + sign * a * b * cross


def partial_transpose(x: np.ndarray) -> np.ndarray:
    """Transpose on the first qubit: (|ij><kl|)^Gamma = |kj><il|."""
    x = np.asarray(x)
    if x.shape != (4, 4):
        raise ValueError(f"expected a 4x4 operator, got shape {x.shape}")
    return x.reshape(2, 2, 2, 2).transpose(2, 1, 0, 3).reshape(4, 4)


def _jacobi(x: np.ndarray, vectors: bool):
    a = np.array(x, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex) if vectors else None
    scale = max(1.0, float(np.linalg.norm(a)))
    for _ in range(JACOBI_MAX_SWEEPS):
        off = math.sqrt(sum(abs(a[p, q]) ** 2 for p in range(n) for q in range(n) if p != q))
        if off < JACOBI_OFF_TOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                # phase e^{-i phi} on column q makes the (p, q) entry real and positive
                ph = apq / r
                app, aqq = a[p, p].real, a[q, q].real
                theta = (aqq - app) / (2.0 * r)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # G = D R: columns p, q of the unitary
                gpp, gpq = c, s
                gqp, gqq = -s * ph.conjugate(), c * ph.conjugate()
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = colp * gpp + colq * gqp
                a[:, q] = colp * gpq + colq * gqq
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = rowp * np.conj(gpp) + rowq * np.conj(gqp)
                a[q, :] = rowp * np.conj(gpq) + rowq * np.conj(gqq)
                a[p, q] = a[q, p] = 0.0
                if v is not None:
                    vp = v[:, p].copy()
                    vq = v[:, q].copy()
                    v[:, p] = vp * gpp + vq * gqp
                    v[:, q] = vp * gpq + vq * gqq
    else:
        raise RuntimeError("Jacobi eigenvalue iteration did not converge")
    w = a.diagonal().real.copy()
    order = np.argsort(-w, kind="stable")
    return w[order], (v[:, order] if v is not None else None)


def _check_hermitian(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.shape != (4, 4):
        raise ValueError(f"expected a 4x4 operator, got shape {x.shape}")
    if np.max(np.abs(x - x.conj().T)) > HERMITIAN_TOL:
        raise ValueError("operator is not Hermitian")
    return x


def hermitian_eigenvalues(x: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian 4x4 operator, sorted descending (cyclic Jacobi)."""
    w, _ = _jacobi(_check_hermitian(x), vectors=False)
    return w


def hermitian_eigh(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Descending eigenvalues and matching orthonormal eigenvectors (as columns)."""
    return _jacobi(_check_hermitian(x), vectors=True)


def check_density_matrix(rho: np.ndarray, tol: float = 1e-12, psd_tol: float = 1e-10) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 density matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValueError(f"density matrix trace is {np.trace(rho).real!r}, not 1")
    if hermitian_eigenvalues(rho)[-1] < -psd_tol:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def min_pt_eigenvalue(rho: np.ndarray) -> float:
    return float(hermitian_eigenvalues(partial_transpose(rho))[-1])


def is_entangled(rho: np.ndarray, tol: float = PPT_TOL) -> bool:
    """PPT test; exact for two qubits."""
    rho = check_density_matrix(rho)
    return min_pt_eigenvalue(rho) < -tol


def overlap(rho: np.ndarray, i: int) -> float:
    """Fidelity tr(Phi_i rho) with the i-th Bell state."""
    b = bell_ket(i)
    return float(np.real(b.conj() @ np.asarray(rho) @ b))


def phi1_perturbed(eps: float) -> np.ndarray:
    """Normalized (|Phi_1> + eps |10>) / sqrt(1 + eps^2)."""
    return (bell_ket(1) + eps * basis_ket("10")) / math.sqrt(1.0 + eps * eps)


def perturbed_mems(s, eps: float) -> np.ndarray:
    """lambda1 Phi_1(eps) + lambda2 |01><01| + lambda3 Phi_2 for rank <= 3 spectra."""
    s = as_spectrum(s)
    if s[3] > 1e-12:
        raise ValueError("perturbed_mems needs lambda4 = 0")
    if eps < 0:
        raise ValueError("eps must be non-negative")
    rho = s[0] * projector(phi1_perturbed(eps)) + s[1] * xi(2)
    if s[2] > 0:
        rho = rho + s[2] * xi(3)
    return rho


def max_entangling_epsilon(s, tol: float = 1e-9, eps_max: float = 1.0) -> float:
    """Largest eps* <= eps_max with perturbed_mems(s, eps) entangled at every tested eps < eps*.

    A 64-point scan of (0, eps_max] brackets the first separable eps, then bisection
    narrows it to `tol`. Rank-2 spectra stay entangled for all eps, so they return eps_max.
    """
    s = as_spectrum(s)
    if s[3] > 1e-12:
        raise ValueError("max_entangling_epsilon needs lambda4 = 0")
    if not is_entangled(mems(s)):
        raise ValueError(f"mems{s.values} is separable; no entangling perturbation exists")

    def entangled(e: float) -> bool:
        return min_pt_eigenvalue(perturbed_mems(s, e)) < -PPT_TOL

    lo = 0.0
    for e in np.linspace(0.0, eps_max, 65)[1:]:
        if not entangled(float(e)):
            hi = float(e)
            break
        lo = float(e)
    else:
        return eps_max
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if entangled(mid):
            lo = mid
        else:
            hi = mid
    return lo


def random_qubit(rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=2) + 1j * rng.normal(size=2)
    return z / np.linalg.norm(z)


def random_product_state(rng: np.random.Generator) -> np.ndarray:
    return projector(np.kron(random_qubit(rng), random_qubit(rng)))


def random_separable_state(rng: np.random.Generator, terms: int = 4) -> np.ndarray:
    """Convex mixture of Haar-random product states."""
    w = rng.dirichlet(np.ones(terms))
    return sum(wk * random_product_state(rng) for wk in w)


def random_spectrum(rng: np.random.Generator, rank: int = 4) -> Spectrum:
    """Uniform point of the ordered probability simplex with exactly `rank` nonzero entries."""
    v = np.zeros(4)
    v[:rank] = np.sort(rng.dirichlet(np.ones(rank)))[::-1]
    v[rank - 1] = 1.0 - math.fsum(v[: rank - 1])
    return Spectrum(v)
