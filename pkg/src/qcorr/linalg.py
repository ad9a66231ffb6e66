"""Small dense Hermitian linear algebra for one- and two-qubit operators.

Everything here works on plain ``numpy`` arrays of shape (2, 2) or (4, 4).
Entropies are in bits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidState, NonHermitian

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
NEG_EIG_TOL = 1e-10
ENTROPY_CUTOFF = 1e-14
JACOBI_TOL = 1e-13
_MAX_SWEEPS = 60

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in descending order and matching orthonormal eigenvectors
    stored column-wise."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@dataclass(frozen=True)
class ValidationOutcome:
    accepted: bool
    reason: str | None = None
    clamped: bool = False
    matrix: np.ndarray | None = None
    min_eigenvalue: float = float("nan")

    def __bool__(self):
        return self.accepted


def hermiticity_error(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T)))


def hermitize(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    return 0.5 * (m + m.conj().T)


def hermitian_eig(m, tol: float = HERMITIAN_TOL) -> Spectrum:
    """Eigendecomposition of a small Hermitian matrix by cyclic complex Jacobi.

    Rotations are applied in a fixed (p, q) sweep order so the output is a
    deterministic function of the input. Iteration stops once the
    off-diagonal Frobenius norm drops below ``JACOBI_TOL`` times
    ``max(1, ||m||_F)``.

    Raises
    ------
    NonHermitian
        If ``max|m - m^dagger| >= tol``.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    err = hermiticity_error(m)
    if err >= tol:
        raise NonHermitian(f"max|M - M^dagger| = {err:.3e}")
    n = m.shape[0]
    a = hermitize(m).tolist()
    v = [[1.0 + 0j if i == j else 0j for j in range(n)] for i in range(n)]
    thresh = JACOBI_TOL * max(1.0, float(np.linalg.norm(m)))
    conj = complex.conjugate
    for _ in range(_MAX_SWEEPS):
        off = math.sqrt(sum(abs(a[i][j]) ** 2 for i in range(n) for j in range(n) if i != j))
        if off < thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                ph = apq / mag
                theta = 0.5 * math.atan2(2.0 * mag, a[q][q].real - a[p][p].real)
                c, s = math.cos(theta), math.sin(theta)
                j01, j10 = s * ph, -s * conj(ph)
                for row in a:
                    x, y = row[p], row[q]
                    row[p] = x * c + y * j10
                    row[q] = x * j01 + y * c
                rp, rq = a[p], a[q]
                for k in range(n):
                    x, y = rp[k], rq[k]
                    rp[k] = c * x + conj(j10) * y
                    rq[k] = conj(j01) * x + c * y
                a[p][q] = a[q][p] = 0j
                for row in v:
                    x, y = row[p], row[q]
                    row[p] = x * c + y * j10
                    row[q] = x * j01 + y * c
    w = np.array([a[i][i].real for i in range(n)])
    order = np.argsort(-w, kind="stable")
    return Spectrum(w[order], np.array(v, dtype=complex)[:, order])


def eigvals_2x2(m) -> tuple[float, float]:
    """Closed-form eigenvalues (descending) of a 2x2 Hermitian matrix."""
    a, d = m[0, 0].real, m[1, 1].real
    b = m[0, 1]
    mean = 0.5 * (a + d)
    rad = math.hypot(0.5 * (a - d), abs(b))
    return mean + rad, mean - rad


def entropy_of_probs(p) -> float:
    """Shannon entropy in bits; entries below the cutoff contribute zero.

    Round-off in a near-pure distribution (an entry slightly above 1) would
    give a tiny negative sum, so the result is clamped at zero.
    """
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > ENTROPY_CUTOFF]
    return max(float(-np.sum(p * np.log2(p))), 0.0)


def binary_entropy(x: float) -> float:
    """h(x) = -x log2 x - (1-x) log2(1-x), with 0 log 0 = 0."""
    s = 0.0
    for t in (x, 1.0 - x):
        if t > ENTROPY_CUTOFF:
            s -= t * math.log2(t)
    return max(s, 0.0)


def qubit_entropy_from_bloch(r: float) -> float:
    """Entropy of a qubit whose Bloch vector has length ``r``."""
    r = min(max(r, 0.0), 1.0)
    return binary_entropy(0.5 * (1.0 + r))


def validate_density_matrix(m) -> ValidationOutcome:
    """Check Hermiticity, unit trace and positivity.

    Eigenvalues in ``[-NEG_EIG_TOL, 0)`` are clamped to zero and the matrix is
    renormalised; the returned outcome then has ``clamped=True`` and carries
    the repaired matrix. Rejections carry a reason string instead of raising.
    """
    try:
        m = np.asarray(m, dtype=complex)
    except (TypeError, ValueError):
        return ValidationOutcome(False, "BadShape")
    if m.ndim != 2 or m.shape not in ((2, 2), (4, 4)):
        return ValidationOutcome(False, "BadShape")
    if not np.all(np.isfinite(m)):
        return ValidationOutcome(False, "BadShape")
    if hermiticity_error(m) >= HERMITIAN_TOL:
        return ValidationOutcome(False, "NonHermitian")
    if abs(np.trace(m).real - 1.0) > TRACE_TOL:
        return ValidationOutcome(False, "TraceNotOne")
    spec = hermitian_eig(m)
    lam_min = float(spec.eigenvalues[-1])
    if lam_min < -NEG_EIG_TOL:
        return ValidationOutcome(False, "NegativeEigenvalue", min_eigenvalue=lam_min)
    if lam_min < 0.0:
        lam = np.clip(spec.eigenvalues, 0.0, None)
        lam = lam / lam.sum()
        v = spec.eigenvectors
        repaired = hermitize((v * lam) @ v.conj().T)
        return ValidationOutcome(True, None, True, repaired, lam_min)
    return ValidationOutcome(True, None, False, hermitize(m), lam_min)


def von_neumann_entropy(m) -> float:
    """S(rho) = -Tr[rho log2 rho] in bits.

    Raises
    ------
    InvalidState
        If ``m`` is not a valid density matrix.
    """
    out = validate_density_matrix(m)
    if not out.accepted:
        raise InvalidState(out.reason)
    m = out.matrix
    if m.shape == (2, 2):
        return entropy_of_probs(eigvals_2x2(m))
    return entropy_of_probs(hermitian_eig(m).eigenvalues)


def partial_trace(m, keep: str) -> np.ndarray:
    """Reduced 2x2 operator of a 4x4 two-qubit operator.

    ``keep`` is ``"A"`` (trace out B) or ``"B"`` (trace out A).
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"partial_trace expects a 4x4 matrix, got {m.shape}")
    t = m.reshape(2, 2, 2, 2)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'A' or 'B', not {keep!r}")


def tensor(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != (2, 2) or b.shape != (2, 2):
        raise ValueError("tensor expects two 2x2 matrices")
    return np.kron(a, b)


SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def swap_parties(m) -> np.ndarray:
    return SWAP @ np.asarray(m, dtype=complex) @ SWAP


def projector(axis) -> tuple[np.ndarray, np.ndarray]:
    """The pair (I + n.sigma)/2, (I - n.sigma)/2 for a unit Bloch axis n."""
    n = np.asarray(axis, dtype=float)
    ns = n[0] * SX + n[1] * SY + n[2] * SZ
    return 0.5 * (I2 + ns), 0.5 * (I2 - ns)


def bloch_vector(m) -> np.ndarray:
    """Bloch vector of a 2x2 operator, r_p = Tr[m sigma_p]."""
    m = np.asarray(m, dtype=complex)
    return np.array([np.trace(m @ s).real for s in PAULIS])


def correlation_data(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (a, b, T) with a_p = Tr[m s_p x I], b_q = Tr[m I x s_q] and
    T_pq = Tr[m s_p x s_q]."""
    m = np.asarray(m, dtype=complex)
    a = np.array([np.trace(m @ np.kron(s, I2)).real for s in PAULIS])
    b = np.array([np.trace(m @ np.kron(I2, s)).real for s in PAULIS])
    t = np.array([[np.trace(m @ np.kron(sp, sq)).real for sq in PAULIS] for sp in PAULIS])
    return a, b, t


def from_correlation_data(a, b, t) -> np.ndarray:
    """Inverse of :func:`correlation_data`."""
    m = np.kron(I2, I2).astype(complex)
    for p in range(3):
        m = m + a[p] * np.kron(PAULIS[p], I2) + b[p] * np.kron(I2, PAULIS[p])
        for q in range(3):
            m = m + t[p][q] * np.kron(PAULIS[p], PAULIS[q])
    return m / 4.0
