"""Two-qubit state families, a Hilbert-Schmidt sampler and the Bloch normal form.

Basis ordering is |00>, |01>, |10>, |11> with qubit A the left tensor factor.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.spatial.transform import Rotation

from . import linalg
from .errors import InvalidState, OutOfRange
from .linalg import I2, PAULIS

PARAM_TOL = 1e-10

PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
PSI_PLUS = np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated 4x4 two-qubit density matrix plus where it came from.

    Construct through :meth:`from_matrix` (or a family constructor) so the
    matrix is guaranteed to have passed :func:`linalg.validate_density_matrix`.
    """

    matrix: np.ndarray
    family: str = "external"
    params: dict = field(default_factory=dict)
    clamped: bool = False

    @classmethod
    def from_matrix(cls, m, family="external", params=None) -> "DensityMatrix":
        m = np.asarray(m, dtype=complex)
        if m.shape != (4, 4):
            raise InvalidState("BadShape", f"expected 4x4, got {m.shape}")
        out = linalg.validate_density_matrix(m)
        if not out.accepted:
            raise InvalidState(out.reason, f"min eigenvalue {out.min_eigenvalue:.3e}"
                               if out.reason == "NegativeEigenvalue" else "")
        mat = out.matrix
        mat.setflags(write=False)
        return cls(mat, family, dict(params or {}), out.clamped)

    @property
    def provenance(self) -> dict:
        return {"family": self.family, "params": dict(self.params)}

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __repr__(self):
        p = ", ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}"
                      for k, v in self.params.items())
        return f"DensityMatrix({self.family}{': ' + p if p else ''})"


def as_matrix(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    return np.asarray(rho, dtype=complex)


def as_state(rho) -> DensityMatrix:
    if isinstance(rho, DensityMatrix):
        return rho
    return DensityMatrix.from_matrix(rho)


def _x_matrix(r11, r22, r33, r44, r14, r23):
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0], m[1, 1], m[2, 2], m[3, 3] = r11, r22, r33, r44
    m[0, 3], m[3, 0] = r14, np.conj(r14)
    m[1, 2], m[2, 1] = r23, np.conj(r23)
    return m


def x_state(r11, r22, r33, r44, r14=0.0, r23=0.0, *, family="X", params=None) -> DensityMatrix:
    """State with nonzero entries only on the diagonal and anti-diagonal."""
    diag = (r11, r22, r33, r44)
    if min(diag) < -PARAM_TOL or abs(sum(diag) - 1.0) > PARAM_TOL:
        raise InvalidState("OutOfRange", f"diagonal {diag} must be nonnegative and sum to 1")
    if abs(r14) > math.sqrt(max(r11 * r44, 0.0)) + PARAM_TOL:
        raise InvalidState("NegativeEigenvalue", "|rho14| > sqrt(rho11 rho44)")
    if abs(r23) > math.sqrt(max(r22 * r33, 0.0)) + PARAM_TOL:
        raise InvalidState("NegativeEigenvalue", "|rho23| > sqrt(rho22 rho33)")
    if params is None:
        params = dict(r11=r11, r22=r22, r33=r33, r44=r44, r14=r14, r23=r23)
    return DensityMatrix.from_matrix(_x_matrix(*diag, r14, r23), family, params)


def is_x_shaped(m, tol=PARAM_TOL) -> bool:
    m = as_matrix(m)
    mask = np.ones((4, 4), dtype=bool)
    for i, j in ((0, 0), (1, 1), (2, 2), (3, 3), (0, 3), (3, 0), (1, 2), (2, 1)):
        mask[i, j] = False
    return bool(np.all(np.abs(m[mask]) < tol))


def werner(f: float) -> DensityMatrix:
    """f|phi+><phi+| + (1-f) I/4, defined for -1/3 <= f <= 1."""
    if not -1.0 / 3.0 - PARAM_TOL <= f <= 1.0 + PARAM_TOL:
        raise OutOfRange(f"Werner parameter f={f} outside [-1/3, 1]")
    return x_state((1 + f) / 4, (1 - f) / 4, (1 - f) / 4, (1 + f) / 4, f / 2, 0.0,
                   family="W", params={"f": float(f)})


def r_family(a: float, r: float) -> DensityMatrix:
    """Rank-3 family: rho11 = rho44 = (1-a)/2, rho22 = a, rho14 = r/2."""
    if not -PARAM_TOL <= a <= 1 + PARAM_TOL or abs(r) > 1 - a + PARAM_TOL:
        raise OutOfRange(f"R family needs 0 <= a <= 1 and |r| <= 1-a (a={a}, r={r})")
    return x_state((1 - a) / 2, a, 0.0, (1 - a) / 2, r / 2, 0.0,
                   family="R", params={"a": float(a), "r": float(r)})


def p_family(a: float, b: float) -> DensityMatrix:
    """rho11 = rho44 = rho14 = a/2, rho22 = (1-a-b)/2, rho33 = (1-a+b)/2."""
    if not -PARAM_TOL <= a <= 1 + PARAM_TOL or abs(b) > 1 - a + PARAM_TOL:
        raise OutOfRange(f"P family needs 0 <= a <= 1 and |b| <= 1-a (a={a}, b={b})")
    return x_state(a / 2, (1 - a - b) / 2, (1 - a + b) / 2, a / 2, a / 2, 0.0,
                   family="P", params={"a": float(a), "b": float(b)})


def beta_family(beta: float) -> DensityMatrix:
    if not -PARAM_TOL <= beta <= 1 + PARAM_TOL:
        raise OutOfRange(f"beta={beta} outside [0, 1]")
    m = beta * np.outer(PHI_PLUS, PHI_PLUS.conj()) + (1 - beta) * np.outer(PSI_PLUS, PSI_PLUS.conj())
    return DensityMatrix.from_matrix(m, "beta", {"beta": float(beta)})


def delta_family(delta: float) -> DensityMatrix:
    """delta * rho(beta=1/2) + (1 - delta) I/4."""
    if not -PARAM_TOL <= delta <= 1 + PARAM_TOL:
        raise OutOfRange(f"delta={delta} outside [0, 1]")
    m = delta * beta_family(0.5).matrix + (1 - delta) * np.eye(4) / 4
    return DensityMatrix.from_matrix(m, "delta", {"delta": float(delta)})


def ginibre_matrix(rng: np.random.Generator, rank: int = 4) -> np.ndarray:
    g = rng.standard_normal((4, rank)) + 1j * rng.standard_normal((4, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_state(seed: int, rank: int | None = None) -> DensityMatrix:
    """Hilbert-Schmidt random state (normalised G G^dagger, G a 4 x rank
    complex Ginibre matrix). ``rank=None`` means full rank."""
    rank = 4 if rank is None else int(rank)
    if not 1 <= rank <= 4:
        raise ValueError(f"rank must be in 1..4, got {rank}")
    rng = np.random.default_rng(seed)
    m = linalg.hermitize(ginibre_matrix(rng, rank))
    return DensityMatrix.from_matrix(m, "random", {"seed": int(seed), "rank": rank})


def random_x_state(seed: int) -> DensityMatrix:
    """X part of a Hilbert-Schmidt random state, i.e. (rho + ZZ rho ZZ)/2."""
    rng = np.random.default_rng(seed)
    m = ginibre_matrix(rng)
    zz = np.kron(linalg.SZ, linalg.SZ)
    m = linalg.hermitize(0.5 * (m + zz @ m @ zz))
    return DensityMatrix.from_matrix(m, "randomX", {"seed": int(seed)})


def random_unitary_2(rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_classical_classical(seed: int) -> DensityMatrix:
    """sum_ij p_ij |e_i><e_i| x |f_j><f_j| in random local bases."""
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(4))
    u, v = random_unitary_2(rng), random_unitary_2(rng)
    m = np.kron(u, v) @ np.diag(p).astype(complex) @ np.kron(u, v).conj().T
    return DensityMatrix.from_matrix(linalg.hermitize(m), "cc", {"seed": int(seed)})


def local_unitary(rho, u, v) -> DensityMatrix:
    uv = np.kron(u, v)
    m = linalg.hermitize(uv @ as_matrix(rho) @ uv.conj().T)
    return DensityMatrix.from_matrix(m, "lu")


# ---------------------------------------------------------------------------
# Bloch normal form


@dataclass(frozen=True)
class BlochForm:
    """Local Bloch vectors ``a``, ``b`` and diagonal correlations ``chi`` of
    (u_a x u_b) rho (u_a x u_b)^dagger."""

    a: np.ndarray
    b: np.ndarray
    chi: np.ndarray
    u_a: np.ndarray
    u_b: np.ndarray
    rot_a: np.ndarray
    rot_b: np.ndarray

    def matrix(self) -> np.ndarray:
        return linalg.from_correlation_data(self.a, self.b, np.diag(self.chi))


def su2_from_rotation(rot: np.ndarray) -> np.ndarray:
    """SU(2) element u with u (n.sigma) u^dagger = (rot n).sigma."""
    x, y, z, w = Rotation.from_matrix(rot).as_quat()
    return w * I2 - 1j * (x * PAULIS[0] + y * PAULIS[1] + z * PAULIS[2])


def proper_svd(t: np.ndarray):
    """t = U diag(s) V^T with U, V in SO(3); the last entry of s absorbs any
    sign needed and may be negative."""
    u, s, vt = np.linalg.svd(t)
    s = s.copy()
    if np.linalg.det(u) < 0:
        u[:, 2] *= -1
        s[2] *= -1
    if np.linalg.det(vt) < 0:
        vt[2, :] *= -1
        s[2] *= -1
    return u, s, vt.T


def bloch_normal_form(rho) -> BlochForm:
    """Rotate each qubit so the correlation matrix becomes diagonal."""
    a, b, t = linalg.correlation_data(as_matrix(rho))
    u, s, v = proper_svd(t)
    rot_a, rot_b = u.T, v.T
    return BlochForm(
        a=rot_a @ a,
        b=rot_b @ b,
        chi=s,
        u_a=su2_from_rotation(rot_a),
        u_b=su2_from_rotation(rot_b),
        rot_a=rot_a,
        rot_b=rot_b,
    )


# ---------------------------------------------------------------------------
# JSON state files

STATE_SCHEMA_VERSION = 1


def state_to_json(rho, **extra) -> str:
    """Serialise as ``{"entries": [{"re":..,"im":..} x 16], "provenance": {...}}``
    with entries in row-major order."""
    m = as_matrix(rho)
    doc = {
        "schema": STATE_SCHEMA_VERSION,
        "entries": [{"re": float(z.real), "im": float(z.imag)} for z in m.ravel()],
    }
    if isinstance(rho, DensityMatrix):
        doc["provenance"] = rho.provenance
    doc.update(extra)
    return json.dumps(doc, indent=2)


def state_from_json(text: str) -> DensityMatrix:
    """Parse and validate a JSON state document.

    Raises :class:`InvalidState` with ``reason="Parse"`` on malformed input
    and the validation reason otherwise.
    """
    try:
        doc = json.loads(text)
        entries = doc["entries"]
        if len(entries) != 16:
            raise ValueError(f"expected 16 entries, got {len(entries)}")
        vals = [complex(float(e["re"]), float(e.get("im", 0.0))) for e in entries]
    except (ValueError, KeyError, TypeError) as exc:
        raise InvalidState("Parse", str(exc)) from exc
    prov = doc.get("provenance") or {}
    return DensityMatrix.from_matrix(
        np.array(vals).reshape(4, 4), prov.get("family", "external"), prov.get("params", {})
    )


def load_state(path) -> DensityMatrix:
    return state_from_json(Path(path).read_text())


def save_state(rho, path) -> None:
    Path(path).write_text(state_to_json(rho) + "\n")
