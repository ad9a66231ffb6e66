"""Entropic correlation measures of two-qubit states.

Conventions
-----------
``discord_left`` (D<-) measures qubit B and keeps A; ``discord_right`` (D->)
measures A. ``amid`` is the mutual-information loss minimised over all
bi-local rank-1 projective measurements, ``I - I_c``.

The optimisers never work on 4x4 matrices. For a measurement along the unit
axes n (on A) and m (on B) the outcome table is

    p_kl = (1 + s_k a.n + s_l b.m + s_k s_l n.T.m) / 4,   s = +1, -1

and measuring B alone leaves A with Bloch vector (a +/- T m)/(1 +/- b.m).
The matrix-level routines (``post_measurement_state``,
``conditional_entropy_after_B_measurement``) are kept for checking these
shortcuts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import InternalConsistencyError, NotXState
from .linalg import ENTROPY_CUTOFF, binary_entropy
from .optimize import nelder_mead
from .states import BlochForm, as_matrix, as_state, bloch_normal_form, is_x_shaped

DEGENERACY_TOL = 1e-9
NEGATIVE_SLACK = 1e-7
HIERARCHY_SLACK_LOW = 1e-7
HIERARCHY_SLACK_HIGH = 1e-9
AXIS_TOL = 1e-6
FUNC_TOL = 1e-9
X_AGREEMENT_TOL = 1e-5

GRID_POLAR = 33
GRID_AZIMUTH = 64
AMID_GRID_POLAR = 9
AMID_GRID_AZIMUTH = 16
AMID_RESTARTS = 8

_EX = np.array([1.0, 0.0, 0.0])
_EY = np.array([0.0, 1.0, 0.0])
_EZ = np.array([0.0, 0.0, 1.0])


# ---------------------------------------------------------------------------
# measurement parameterisations


@dataclass(frozen=True)
class MeasurementParams:
    """The (kappa, h, w) coordinates of one qubit's measurement basis."""

    kappa: float
    h: float
    w: float

    @classmethod
    def from_y(cls, y) -> "MeasurementParams":
        y0, y1, y2, y3 = (float(v) for v in y)
        return cls(y0 * y0 + y3 * y3, y0 * y1 + y2 * y3, y1 * y3 - y0 * y2)

    @property
    def l(self) -> float:  # noqa: E743
        return 1.0 - self.kappa

    def is_realizable(self, tol=1e-10) -> bool:
        return (-tol <= self.kappa <= 1 + tol
                and abs(self.h ** 2 + self.w ** 2 - self.kappa * self.l) < tol)

    def axis(self) -> np.ndarray:
        """gamma = (2w, 2h, 2 kappa - 1): the Bloch axis of the rotated
        computational basis."""
        return np.array([2 * self.w, 2 * self.h, 2 * self.kappa - 1])


def unitary_from_y(y) -> np.ndarray:
    """U = y0 I + i y.sigma for y on the unit 3-sphere."""
    y0, y1, y2, y3 = y
    return y0 * linalg.I2 + 1j * (y1 * linalg.SX + y2 * linalg.SY + y3 * linalg.SZ)


def rotation_coefficients(y) -> np.ndarray:
    """Rows (alpha_p, beta_p, gamma_p) with U^dag s_p U = alpha s1 + beta s2 + gamma s3."""
    u = unitary_from_y(y)
    return np.array(
        [[0.5 * np.trace(u.conj().T @ sp @ u @ sq).real for sq in linalg.PAULIS]
         for sp in linalg.PAULIS]
    )


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0:
        raise ValueError("zero vector has no direction")
    return v / n


@dataclass(frozen=True)
class LocalMeasurement:
    """One complete rank-1 projective measurement on each qubit.

    Outcome ``k = 0`` on qubit A is the projector (I + axis_a.sigma)/2.
    """

    axis_a: np.ndarray
    axis_b: np.ndarray
    y_a: tuple | None = None
    y_b: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "axis_a", _unit(self.axis_a))
        object.__setattr__(self, "axis_b", _unit(self.axis_b))

    @classmethod
    def from_y(cls, y_a, y_b) -> "LocalMeasurement":
        ya = tuple(float(v) for v in y_a)
        yb = tuple(float(v) for v in y_b)
        for y in (ya, yb):
            if abs(sum(v * v for v in y) - 1.0) > 1e-10:
                raise ValueError(f"y-coordinates {y} are not on the unit 3-sphere")
        return cls(MeasurementParams.from_y(ya).axis(), MeasurementParams.from_y(yb).axis(), ya, yb)

    @classmethod
    def from_params(cls, pa: MeasurementParams, pb: MeasurementParams) -> "LocalMeasurement":
        return cls(pa.axis(), pb.axis())

    def projectors(self):
        return linalg.projector(self.axis_a), linalg.projector(self.axis_b)

    def in_frame(self, form: BlochForm) -> "LocalMeasurement":
        """The same measurement expressed in the normal-form frame of ``form``."""
        return LocalMeasurement(form.rot_a @ self.axis_a, form.rot_b @ self.axis_b)


COMPUTATIONAL = LocalMeasurement(_EZ, _EZ)


# ---------------------------------------------------------------------------
# basic entropic quantities


def reduced_states(rho):
    m = as_matrix(rho)
    return linalg.partial_trace(m, "A"), linalg.partial_trace(m, "B")


def _entropy2(m) -> float:
    return linalg.entropy_of_probs(linalg.eigvals_2x2(m))


def _entropy4(m) -> float:
    return linalg.entropy_of_probs(linalg.hermitian_eig(m).eigenvalues)


def mutual_information(rho) -> float:
    """I = S(rho_A) + S(rho_B) - S(rho_AB)."""
    return _prepare(rho).mi


def post_measurement_state(rho, meas: LocalMeasurement):
    """sum_kl (P_k x Q_l) rho (P_k x Q_l) as a validated DensityMatrix."""
    from .states import DensityMatrix

    m = rho.m if isinstance(rho, _Prepared) else as_matrix(rho)
    (pa, qb) = meas.projectors()
    out = np.zeros((4, 4), dtype=complex)
    for p in pa:
        for q in qb:
            proj = np.kron(p, q)
            out += proj @ m @ proj
    return DensityMatrix.from_matrix(linalg.hermitize(out), "measured")


def outcome_table(a, b, t, axis_a, axis_b) -> np.ndarray:
    """2x2 table p[k, l] for outcomes k on A and l on B (index 0 = '+')."""
    an = float(np.dot(a, axis_a))
    bm = float(np.dot(b, axis_b))
    c = float(axis_a @ t @ axis_b)
    s = np.array([1.0, -1.0])
    return (1 + s[:, None] * an + s[None, :] * bm + np.outer(s, s) * c) / 4


def outcome_probabilities(rho, meas: LocalMeasurement) -> np.ndarray:
    a, b, t = linalg.correlation_data(as_matrix(rho))
    return outcome_table(a, b, t, meas.axis_a, meas.axis_b)


def delta_kl(form: BlochForm, pa: MeasurementParams, pb: MeasurementParams) -> np.ndarray:
    """Delta_kl = 1 + (-1)^k a.gA + (-1)^l b.gB + (-1)^(k+l) sum_p chi_p gA_p gB_p
    for k, l in {1, 2}; entry [k-1, l-1]. Delta_kl / 4 is the probability of
    outcome (k, l) on the normal-form state, where outcome 1 is the projector
    onto -gamma."""
    ga, gb = pa.axis(), pb.axis()
    out = np.empty((2, 2))
    for k in (1, 2):
        for l in (1, 2):
            out[k - 1, l - 1] = (1 + (-1) ** k * form.a @ ga + (-1) ** l * form.b @ gb
                                 + (-1) ** (k + l) * np.sum(form.chi * ga * gb))
    return out


def classical_mi_of_table(p) -> float:
    """Shannon mutual information of a joint distribution table."""
    p = np.clip(np.asarray(p, dtype=float), 0.0, None)
    p = p / p.sum()
    return max(linalg.entropy_of_probs(p.sum(axis=1)) + linalg.entropy_of_probs(p.sum(axis=0))
               - linalg.entropy_of_probs(p), 0.0)


def conditional_entropy_after_B_measurement(rho, axis_b) -> float:
    """sum_i p_i S(rho_{A|i}) after measuring B along ``axis_b``."""
    m = as_matrix(rho)
    total = 0.0
    for proj in linalg.projector(_unit(axis_b)):
        op = np.kron(linalg.I2, proj)
        sub = linalg.partial_trace(op @ m @ op, "A")
        p = float(np.trace(sub).real)
        if p < ENTROPY_CUTOFF:
            continue
        total += p * _entropy2(sub / p)
    return total


def conditional_entropy_after_A_measurement(rho, axis_a) -> float:
    return conditional_entropy_after_B_measurement(linalg.swap_parties(as_matrix(rho)), axis_a)


# ---------------------------------------------------------------------------
# fast Bloch-vector objectives


def _h_vec(x):
    x = np.clip(x, 0.0, 1.0)
    out = np.zeros_like(x)
    for t in (x, 1.0 - x):
        mask = t > ENTROPY_CUTOFF
        out[mask] -= t[mask] * np.log2(t[mask])
    return out


def _cond_entropy_many(kept, t_eff, measured, axes) -> np.ndarray:
    """Vectorised sum_i p_i S(conditional state) for each row of ``axes``.

    ``kept`` is the Bloch vector of the unmeasured qubit, ``measured`` that of
    the measured one, and the conditional Bloch vectors are
    (kept +/- t_eff @ axis) / (1 +/- measured.axis).
    """
    bm = axes @ measured
    tm = axes @ t_eff.T
    total = np.zeros(len(axes))
    for sgn in (1.0, -1.0):
        w = 1.0 + sgn * bm
        num = np.linalg.norm(kept[None, :] + sgn * tm, axis=1)
        ok = w > 2 * ENTROPY_CUTOFF
        r = np.where(ok, num / np.where(ok, w, 1.0), 0.0)
        total += np.where(ok, 0.5 * w * _h_vec(0.5 * (1.0 + np.clip(r, 0.0, 1.0))), 0.0)
    return total


def _cond_entropy_one(kept, t_eff, measured, axis) -> float:
    kx, ky, kz = kept
    mx, my, mz = axis
    tmx = t_eff[0][0] * mx + t_eff[0][1] * my + t_eff[0][2] * mz
    tmy = t_eff[1][0] * mx + t_eff[1][1] * my + t_eff[1][2] * mz
    tmz = t_eff[2][0] * mx + t_eff[2][1] * my + t_eff[2][2] * mz
    bm = measured[0] * mx + measured[1] * my + measured[2] * mz
    total = 0.0
    for sgn in (1.0, -1.0):
        w = 1.0 + sgn * bm
        if w <= 2 * ENTROPY_CUTOFF:
            continue
        r = math.sqrt((kx + sgn * tmx) ** 2 + (ky + sgn * tmy) ** 2 + (kz + sgn * tmz) ** 2) / w
        total += 0.5 * w * binary_entropy(0.5 * (1.0 + min(r, 1.0)))
    return total


def _table_mi_many(an, bm, c) -> np.ndarray:
    """Classical MI for broadcastable arrays of a.n, b.m and n.T.m."""
    h = lambda p: np.where(p > ENTROPY_CUTOFF, -p * np.log2(np.where(p > ENTROPY_CUTOFF, p, 1.0)), 0.0)
    joint = 0.0
    for sk in (1.0, -1.0):
        for sl in (1.0, -1.0):
            joint = joint + h(np.clip((1 + sk * an + sl * bm + sk * sl * c) / 4, 0.0, None))
    ha = h((1 + an) / 2) + h((1 - an) / 2)
    hb = h((1 + bm) / 2) + h((1 - bm) / 2)
    return ha + hb - joint


def _plogp(p):
    return -p * math.log2(p) if p > ENTROPY_CUTOFF else 0.0


def _table_mi_one(a, b, chi, n, m) -> float:
    an = a[0] * n[0] + a[1] * n[1] + a[2] * n[2]
    bm = b[0] * m[0] + b[1] * m[1] + b[2] * m[2]
    c = chi[0] * n[0] * m[0] + chi[1] * n[1] * m[1] + chi[2] * n[2] * m[2]
    joint = (_plogp(max((1 + an + bm + c) / 4, 0.0)) + _plogp(max((1 + an - bm - c) / 4, 0.0))
             + _plogp(max((1 - an + bm - c) / 4, 0.0)) + _plogp(max((1 - an - bm + c) / 4, 0.0)))
    return (_plogp((1 + an) / 2) + _plogp((1 - an) / 2) + _plogp((1 + bm) / 2)
            + _plogp((1 - bm) / 2) - joint)


# ---------------------------------------------------------------------------
# sphere search helpers


def sphere_grid(n_polar=GRID_POLAR, n_azimuth=GRID_AZIMUTH, hemisphere=False) -> np.ndarray:
    top = math.pi / 2 if hemisphere else math.pi
    th = np.linspace(0.0, top, n_polar)
    ph = np.linspace(0.0, 2 * math.pi, n_azimuth, endpoint=False)
    tt, pp = np.meshgrid(th, ph, indexing="ij")
    return np.stack([np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp), np.cos(tt)], -1).reshape(-1, 3)


def _tangent_basis(m0):
    helper = _EX if abs(m0[0]) < 0.9 else _EY
    e1 = np.cross(m0, helper)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(m0, e1)


def _chart(m0):
    """Map tangent-plane coordinates (u, v) at ``m0`` to a unit axis."""
    e1, e2 = _tangent_basis(m0)
    m0x, m0y, m0z = (float(c) for c in m0)
    e1x, e1y, e1z = (float(c) for c in e1)
    e2x, e2y, e2z = (float(c) for c in e2)

    def to_axis(u, v):
        k = 1.0 / math.sqrt(1.0 + u * u + v * v)
        return ((m0x + u * e1x + v * e2x) * k, (m0y + u * e1y + v * e2y) * k,
                (m0z + u * e1z + v * e2z) * k)

    return to_axis


def _distinct(cands, k, min_angle=0.25):
    """Pick up to k axes (best first) no two of which describe nearly the same
    measurement; n and -n are the same measurement."""
    picked = []
    cos_min = math.cos(min_angle)
    for val, ax in cands:
        if all(abs(float(ax @ p)) < cos_min for _, p in picked):
            picked.append((val, ax))
            if len(picked) == k:
                break
    return picked


@dataclass
class OptResult:
    value: float
    axes: tuple
    nfev: int = 0
    xtol: float = float("nan")
    starts: int = 0


# ---------------------------------------------------------------------------
# discord


def _min_conditional_entropy(kept, t_eff, measured, extra_seeds=(), n_starts=3) -> OptResult:
    grid = sphere_grid()
    seeds = [np.asarray(x, float) for x in extra_seeds]
    axes = np.vstack([grid] + [x[None, :] for x in seeds]) if seeds else grid
    vals = _cond_entropy_many(kept, t_eff, measured, axes)
    order = np.argsort(vals, kind="stable")
    starts = _distinct(((vals[i], axes[i]) for i in order), n_starts)
    best_val, best_axis, nfev = float(vals[order[0]]), axes[order[0]], len(axes)
    kept_l, meas_l, t_l = kept.tolist(), measured.tolist(), t_eff.tolist()
    for _, m0 in starts:
        to_axis = _chart(m0)
        res = nelder_mead(lambda x: _cond_entropy_one(kept_l, t_l, meas_l, to_axis(x[0], x[1])),
                          [0.0, 0.0], step=0.05, xatol=AXIS_TOL / 10, fatol=FUNC_TOL * 1e-3)
        nfev += res.nfev
        if res.fun < best_val:
            best_val, best_axis = float(res.fun), np.array(to_axis(*res.x))
    return OptResult(best_val, (np.asarray(best_axis, float),), nfev, AXIS_TOL, len(starts))


def _discord_seeds(measured, t_eff):
    # right singular vectors of T and the measured qubit's own Bloch axis
    _, _, vt = np.linalg.svd(t_eff)
    seeds = [vt[i] for i in range(3)]
    if np.linalg.norm(measured) > DEGENERACY_TOL:
        seeds.append(measured / np.linalg.norm(measured))
    return seeds + [_EX, _EY, _EZ]


@dataclass
class _Prepared:
    """Per-state quantities shared by every measure."""

    m: np.ndarray
    a: np.ndarray
    b: np.ndarray
    t: np.ndarray
    s_a: float
    s_b: float
    s_ab: float

    @property
    def mi(self) -> float:
        return max(self.s_a + self.s_b - self.s_ab, 0.0)


def _prepare(rho) -> _Prepared:
    if isinstance(rho, _Prepared):
        return rho
    m = as_state(rho).matrix
    ra, rb = reduced_states(m)
    a, b, t = linalg.correlation_data(m)
    return _Prepared(m, a, b, t, _entropy2(ra), _entropy2(rb), _entropy4(m))


@dataclass
class DiscordResult:
    discord: float
    classical: float  # one-way classical correlation J
    axis: np.ndarray
    nfev: int


def _clamp(value, upper, what):
    if value < -NEGATIVE_SLACK:
        raise InternalConsistencyError(f"{what} = {value:.3e} is negative beyond slack")
    return min(max(value, 0.0), max(upper, 0.0))


def _discord(rho, side) -> DiscordResult:
    st = _prepare(rho)
    if side == "B":
        kept, t_eff, measured, s_kept, s_meas = st.a, st.t, st.b, st.s_a, st.s_b
    else:
        kept, t_eff, measured, s_kept, s_meas = st.b, st.t.T, st.a, st.s_b, st.s_a
    res = _min_conditional_entropy(kept, t_eff, measured, _discord_seeds(measured, t_eff))
    raw = s_meas - st.s_ab + res.value
    d = _clamp(raw, st.mi, f"discord measured on {side}")
    return DiscordResult(d, s_kept - res.value, res.axes[0], res.nfev)


def discord_left(rho) -> float:
    """D<-: minimal I - J over projective measurements on qubit B."""
    return _discord(rho, "B").discord


def discord_right(rho) -> float:
    """D->: as :func:`discord_left` with the measurement on qubit A."""
    return _discord(rho, "A").discord


def discord_two_way(rho) -> float:
    return max(discord_left(rho), discord_right(rho))


# ---------------------------------------------------------------------------
# MID


def marginal_eigenbasis_measurement(rho) -> tuple[LocalMeasurement, bool]:
    """Measurement in the eigenbases of both marginals.

    A marginal whose eigenvalue gap is below ``DEGENERACY_TOL`` has no
    preferred basis; the computational basis is used and the returned flag
    is True.
    """
    st = _prepare(rho)
    axes, degenerate = [], False
    for r in (st.a, st.b):
        nr = float(np.linalg.norm(r))
        if nr < DEGENERACY_TOL:
            axes.append(_EZ)
            degenerate = True
        else:
            axes.append(r / nr)
    return LocalMeasurement(*axes), degenerate


def mid_with_flag(rho) -> tuple[float, bool]:
    st = _prepare(rho)
    meas, degenerate = marginal_eigenbasis_measurement(st)
    after = mutual_information(post_measurement_state(st.m, meas))
    return _clamp(st.mi - after, st.mi, "MID"), degenerate


def mid(rho) -> float:
    """M = I(rho) - I(rho after measuring in the marginal eigenbases)."""
    return mid_with_flag(rho)[0]


# ---------------------------------------------------------------------------
# classical mutual information and AMID


def _pair_chart(a, b, chi, p0, q0):
    ca, cb = _chart(p0), _chart(q0)
    a, b, chi = a.tolist(), b.tolist(), chi.tolist()

    def neg_mi(x):
        return -_table_mi_one(a, b, chi, ca(x[0], x[1]), cb(x[2], x[3]))

    return neg_mi, ca, cb


def _max_table_mi(form: BlochForm, seeds=()) -> OptResult:
    """Maximise the outcome-table mutual information over pairs of axes in the
    normal-form frame: hemisphere grid on each qubit, ``AMID_RESTARTS``
    distinct top cells plus ``seeds`` as restarts, a short simplex run from
    each and a tight polish of the two best."""
    a, b, chi = form.a, form.b, form.chi
    grid = _AMID_GRID
    vals = _table_mi_many((grid @ a)[:, None], (grid @ b)[None, :], (grid * chi) @ grid.T)
    flat = np.argsort(-vals, axis=None, kind="stable")
    n = len(grid)
    cands = []
    cos_min = math.cos(0.3)
    for idx in flat[: 40 * AMID_RESTARTS]:
        i, j = divmod(int(idx), n)
        if all(abs(grid[i] @ p) < cos_min or abs(grid[j] @ q) < cos_min for _, p, q in cands):
            cands.append((float(vals.flat[idx]), grid[i], grid[j]))
            if len(cands) == AMID_RESTARTS:
                break
    for na, nb in seeds:
        na, nb = _unit(na), _unit(nb)
        cands.append((_table_mi_one(a, b, chi, na, nb), na, nb))
    best_val, best_axes = max(((v, (p, q)) for v, p, q in cands), key=lambda t: t[0])
    nfev = vals.size
    rough = []
    for _, p0, q0 in cands:
        fun, ca, cb = _pair_chart(a, b, chi, p0, q0)
        res = nelder_mead(fun, [0.0] * 4, step=0.05, xatol=1e-3, fatol=1e-8, maxfev=160)
        nfev += res.nfev
        x = res.x
        rough.append((-res.fun, np.array(ca(x[0], x[1])), np.array(cb(x[2], x[3]))))
    rough.sort(key=lambda t: -t[0])
    for _, p0, q0 in _distinct_pairs(rough, 2):
        fun, ca, cb = _pair_chart(a, b, chi, p0, q0)
        res = nelder_mead(fun, [0.0] * 4, step=0.01, xatol=AXIS_TOL / 10,
                          fatol=FUNC_TOL * 1e-3, maxfev=4000)
        nfev += res.nfev
        x = res.x
        rough.append((-res.fun, np.array(ca(x[0], x[1])), np.array(cb(x[2], x[3]))))
    for v, p, q in rough:
        if v > best_val:
            best_val, best_axes = v, (p, q)
    return OptResult(best_val, best_axes, nfev, AXIS_TOL, len(cands))


_AMID_GRID = np.unique(np.round(sphere_grid(AMID_GRID_POLAR, AMID_GRID_AZIMUTH, hemisphere=True), 12), axis=0)


def _distinct_pairs(cands, k):
    out = []
    cos_min = math.cos(0.05)
    for v, p, q in cands:
        if all(abs(p @ p2) < cos_min or abs(q @ q2) < cos_min for _, p2, q2 in out):
            out.append((v, p, q))
            if len(out) == k:
                break
    return out


@dataclass
class AmidResult:
    amid: float
    classical_mi: float
    measurement: LocalMeasurement
    nfev: int
    x_candidate: float | None = None
    mid_degenerate: bool = False


def _amid(rho) -> AmidResult:
    st = _prepare(rho)
    form = bloch_normal_form(st.m)
    mid_meas, degenerate = marginal_eigenbasis_measurement(st)
    mid_in_frame = mid_meas.in_frame(form)
    seeds = [(_EZ, _EZ), (_EX, _EX), (_EY, _EY), (mid_in_frame.axis_a, mid_in_frame.axis_b)]
    res = _max_table_mi(form, seeds)
    # the MID measurement through the matrix path bounds I_c from below, keeping A <= M exact
    mid_after = mutual_information(post_measurement_state(st.m, mid_meas))
    ic, (na, nb) = res.value, res.axes
    if mid_after > ic:
        ic, (na, nb) = mid_after, (mid_in_frame.axis_a, mid_in_frame.axis_b)
    meas = LocalMeasurement(form.rot_a.T @ na, form.rot_b.T @ nb)
    xc = amid_x_candidates(st.m) if is_x_shaped(st.m) else None
    mi = st.mi
    return AmidResult(_clamp(mi - ic, mi, "AMID"), min(ic, mi), meas, res.nfev, xc, degenerate)


def classical_mutual_information(rho) -> tuple[float, LocalMeasurement]:
    """sup over bi-local projective measurements of I(rho after measurement),
    with the measurement attaining it."""
    r = _amid(rho)
    return r.classical_mi, r.measurement


def amid(rho) -> float:
    """A = I - I_c, the minimal mutual-information loss over bi-local
    projective measurements.

    For X states the closed-form two-candidate value is computed as well;
    a disagreement beyond ``X_AGREEMENT_TOL`` raises
    :class:`InternalConsistencyError`.
    """
    r = _amid(rho)
    if r.x_candidate is not None and abs(r.x_candidate - r.amid) > X_AGREEMENT_TOL:
        raise InternalConsistencyError(
            f"X-state AMID: optimiser {r.amid:.10g} vs candidates {r.x_candidate:.10g}")
    return r.amid


def x_state_frame(rho) -> BlochForm:
    """Normal form of an X state that keeps both Bloch vectors on the z axis.

    Only z rotations are used, chosen so the transverse correlations become
    diag(chi_1, chi_2) with |chi_1| >= |chi_2|.
    """
    m = as_matrix(rho)
    if not is_x_shaped(m):
        raise NotXState("matrix has entries outside the diagonal and anti-diagonal")
    a, b, t = linalg.correlation_data(m)
    u, s, vt = np.linalg.svd(t[:2, :2])
    if np.linalg.det(u) < 0:
        u[:, 1] *= -1
        s[1] *= -1
    if np.linalg.det(vt) < 0:
        vt[1, :] *= -1
        s[1] *= -1
    rot_a, rot_b = np.eye(3), np.eye(3)
    rot_a[:2, :2] = u.T
    rot_b[:2, :2] = vt
    from .states import su2_from_rotation

    return BlochForm(rot_a @ a, rot_b @ b, np.array([s[0], s[1], t[2, 2]]),
                     su2_from_rotation(rot_a), su2_from_rotation(rot_b), rot_a, rot_b)


def mu(form: BlochForm, pa: MeasurementParams, pb: MeasurementParams) -> float:
    """I(rho') - I(rho' after the measurement given by (kappa, h, w) per qubit)."""
    rho_prime = form.matrix()
    mi = mutual_information(rho_prime)
    return mi - classical_mi_of_table(delta_kl(form, pa, pb) / 4)


Z_POINT = MeasurementParams(1.0, 0.0, 0.0)
X_POINT = MeasurementParams(0.5, 0.0, 0.5)


def amid_x_candidates(rho) -> float:
    """min[mu(1/2,0,1/2, 1/2,0,1/2), mu(1,0,0, 1,0,0)] in the X-state frame.

    Raises
    ------
    NotXState
        If the matrix is not X shaped.
    """
    form = x_state_frame(rho)
    val = min(mu(form, X_POINT, X_POINT), mu(form, Z_POINT, Z_POINT))
    return max(val, 0.0)


def candidate_bound(rho) -> float:
    """The two-candidate value evaluated in the general Bloch normal frame.

    Every measurement gives an upper bound on A, so this is a bound for any
    state; for X states :func:`amid_x_candidates` (z-rotation frame) is the
    exact value.
    """
    form = bloch_normal_form(rho)
    return max(min(mu(form, X_POINT, X_POINT), mu(form, Z_POINT, Z_POINT)), 0.0)


# ---------------------------------------------------------------------------
# aggregate report


@dataclass
class CorrelationReport:
    S: float
    I: float
    J_left: float
    J_right: float
    D_left: float
    D_right: float
    D_two_way: float
    M: float
    I_c: float
    A: float
    mid_degenerate: bool = False
    x_candidate: float | None = None
    diagnostics: dict = field(default_factory=dict)

    FIELDS = ("S", "I", "J_left", "J_right", "D_left", "D_right", "D_two_way", "M", "I_c", "A")

    def values(self) -> dict:
        return {k: getattr(self, k) for k in self.FIELDS}

    def to_dict(self) -> dict:
        out = self.values()
        out["mid_degenerate"] = self.mid_degenerate
        out["x_candidate"] = self.x_candidate
        out["diagnostics"] = self.diagnostics
        return out


def check_hierarchy(d2, a, m):
    if not (d2 - HIERARCHY_SLACK_LOW <= a <= m + HIERARCHY_SLACK_HIGH):
        raise InternalConsistencyError(
            f"hierarchy D2={d2:.12g} <= A={a:.12g} <= M={m:.12g} violated")


def full_report(rho) -> CorrelationReport:
    """Every indicator for one state, with optimiser diagnostics.

    Raises :class:`InternalConsistencyError` when D2 <= A <= M fails beyond
    optimiser slack.
    """
    st = _prepare(rho)
    left = _discord(st, "B")
    right = _discord(st, "A")
    mval, degenerate = mid_with_flag(st)
    am = _amid(st)
    d2 = max(left.discord, right.discord)
    check_hierarchy(d2, am.amid, mval)
    diag = {
        "axis_left": left.axis.tolist(),
        "axis_right": right.axis.tolist(),
        "amid_axis_a": am.measurement.axis_a.tolist(),
        "amid_axis_b": am.measurement.axis_b.tolist(),
        "nfev_discord": left.nfev + right.nfev,
        "nfev_amid": am.nfev,
        "axis_tol": AXIS_TOL,
        "amid_candidate_bound": candidate_bound(st.m),
    }
    return CorrelationReport(
        S=st.s_ab, I=st.mi, J_left=left.classical, J_right=right.classical,
        D_left=left.discord, D_right=right.discord, D_two_way=d2,
        M=mval, I_c=am.classical_mi, A=am.amid, mid_degenerate=degenerate,
        x_candidate=am.x_candidate, diagnostics=diag,
    )


# ---------------------------------------------------------------------------
# X-state fast paths (used by the boundary searches)


@dataclass(frozen=True)
class XSummary:
    """Invariants of an X state under local z rotations.

    ``a3``, ``b3`` are the local Bloch z components, ``t33`` the zz
    correlation and ``sigma`` = 2(|rho14| + |rho23|) the larger singular
    value of the transverse correlation block.
    """

    a3: float
    b3: float
    t33: float
    sigma: float
    eigenvalues: tuple

    @classmethod
    def from_entries(cls, r11, r22, r33, r44, r14=0.0, r23=0.0) -> "XSummary":
        c14, c23 = abs(r14), abs(r23)
        ev = []
        for u, v, c in ((r11, r44, c14), (r22, r33, c23)):
            mid_, rad = 0.5 * (u + v), math.hypot(0.5 * (u - v), c)
            ev += [mid_ + rad, mid_ - rad]
        return cls(r11 + r22 - r33 - r44, r11 - r22 + r33 - r44, r11 - r22 - r33 + r44,
                   2.0 * (c14 + c23), tuple(ev))

    @classmethod
    def from_matrix(cls, m) -> "XSummary":
        m = as_matrix(m)
        if not is_x_shaped(m):
            raise NotXState("matrix has entries outside the diagonal and anti-diagonal")
        d = np.real(np.diag(m))
        return cls.from_entries(d[0], d[1], d[2], d[3], m[0, 3], m[1, 2])

    @property
    def entropy(self) -> float:
        return linalg.entropy_of_probs(np.clip(self.eigenvalues, 0.0, None))

    @property
    def mutual_information(self) -> float:
        s_a = binary_entropy(0.5 * (1 + self.a3))
        s_b = binary_entropy(0.5 * (1 + self.b3))
        return max(s_a + s_b - self.entropy, 0.0)


_X_COS_GRID = np.linspace(0.0, 1.0, 401)


def _x_cond_entropy(kept, meas, t33, sigma, c):
    c = np.asarray(c, dtype=float)
    s2 = np.clip(1.0 - c * c, 0.0, None)
    total = np.zeros_like(c)
    for sgn in (1.0, -1.0):
        w = 1.0 + sgn * meas * c
        num = np.sqrt((kept + sgn * t33 * c) ** 2 + sigma * sigma * s2)
        ok = w > 2 * ENTROPY_CUTOFF
        r = np.where(ok, num / np.where(ok, w, 1.0), 0.0)
        total += np.where(ok, 0.5 * w * _h_vec(0.5 * (1 + np.clip(r, 0.0, 1.0))), 0.0)
    return total


def _x_cond_entropy_one(kept, meas, t33, sigma, c) -> float:
    s2 = max(1.0 - c * c, 0.0)
    total = 0.0
    for sgn in (1.0, -1.0):
        w = 1.0 + sgn * meas * c
        if w <= 2 * ENTROPY_CUTOFF:
            continue
        r = min(math.sqrt((kept + sgn * t33 * c) ** 2 + sigma * sigma * s2) / w, 1.0)
        total += 0.5 * w * binary_entropy(0.5 * (1 + r))
    return total


def discord_x(xs: XSummary, side: str = "B") -> float:
    """Discord of an X state from its :class:`XSummary`.

    The optimal axis lies in the plane spanned by z and the dominant
    transverse correlation direction, leaving a search over the polar
    cosine c in [0, 1]: grid, then golden-section refinement.
    """
    from .optimize import golden_section_max

    kept, meas = (xs.a3, xs.b3) if side == "B" else (xs.b3, xs.a3)
    vals = _x_cond_entropy(kept, meas, xs.t33, xs.sigma, _X_COS_GRID)
    i = int(np.argmin(vals))
    lo = _X_COS_GRID[max(i - 1, 0)]
    hi = _X_COS_GRID[min(i + 1, len(_X_COS_GRID) - 1)]
    _, neg = golden_section_max(
        lambda c: -_x_cond_entropy_one(kept, meas, xs.t33, xs.sigma, c), lo, hi, 1e-10)
    hmin = min(-neg, float(vals[i]))
    s_meas = binary_entropy(0.5 * (1 + meas))
    return min(max(s_meas - xs.entropy + hmin, 0.0), xs.mutual_information)


def amid_x(xs: XSummary) -> float:
    """AMID of an X state from the two closed-form candidates (z x z and the
    dominant transverse axis on both qubits)."""
    zz = np.array([[1 + xs.a3 + xs.b3 + xs.t33, 1 + xs.a3 - xs.b3 - xs.t33],
                   [1 - xs.a3 + xs.b3 - xs.t33, 1 - xs.a3 - xs.b3 + xs.t33]]) / 4
    xx = np.array([[1 + xs.sigma, 1 - xs.sigma], [1 - xs.sigma, 1 + xs.sigma]]) / 4
    ic = max(classical_mi_of_table(zz), classical_mi_of_table(xx))
    mi = xs.mutual_information
    return min(max(mi - ic, 0.0), mi)
