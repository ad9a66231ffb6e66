"""Maximal discord and AMID at fixed von Neumann entropy.

The searches run over a handful of X-state families:

* ``R``: rho11 = rho44 = (1-a)/2, rho22 = a, rho14 = r/2 with 0 <= a <= 1/3;
* ``W``: Werner states, split into the f >= 0 and f <= 0 branches;
* ``P``: rho11 = rho44 = rho14 = a/2, rho22,33 = (1-a-+b)/2, with the b = 0
  edge reported separately as ``P(b=0)``.

Each two-parameter family is searched on its iso-entropy curve.  The von
Neumann entropy is concave in the (affine) family parameters and is largest at
(a, r) = (1/3, 0) for R and (a, b) = (1/3, 0) for P, so every ray leaving that
point crosses a given entropy level at most once.  A slice is therefore a
1-D curve indexed by the ray angle; the crossing radius is found by bisection
and the measure is maximized over the angle by a grid followed by
golden-section refinement.  Golden-section does not need derivatives, which
matters because the discord maximum on a slice typically sits on a kink
where two measurement axes tie.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from . import measures, states
from .errors import ConstraintInfeasible
from .linalg import binary_entropy
from .measures import XSummary, amid_x, discord_x
from .optimize import bisect, golden_section_max, nelder_mead

S_MAX = 2.0
LOG2_3 = math.log2(3.0)
ANGLE_GRID = 48
ANGLE_TOL = 1e-8
RADIUS_TOL = 1e-14
CROSSING_TOL = 1e-4
TIE_TOL = 1e-9
#: round-off allowance when testing whether an edge point reaches the target entropy
ENTROPY_SLACK = 1e-12
#: family order, lowest-entropy regime first (fallback order for ties, see _winner)
FAMILY_ORDER = ("R", "W", "P(b=0)", "P", "W-")
MEASURES = ("discord", "amid")


def _entropy(ev) -> float:
    s = 0.0
    for p in ev:
        if p > 1e-14:
            s -= p * math.log2(p)
    return s


# ---------------------------------------------------------------------------
# family entries


def r_entries(a, r):
    return ((1 - a) / 2, a, 0.0, (1 - a) / 2, r / 2, 0.0)


def p_entries(a, b):
    return (a / 2, (1 - a - b) / 2, (1 - a + b) / 2, a / 2, a / 2, 0.0)


def w_entries(f):
    return ((1 + f) / 4, (1 - f) / 4, (1 - f) / 4, (1 + f) / 4, f / 2, 0.0)


def r_entropy(a, r) -> float:
    return _entropy(((1 - a + r) / 2, (1 - a - r) / 2, a))


def p_entropy(a, b) -> float:
    return _entropy((a, (1 - a - b) / 2, (1 - a + b) / 2))


def w_entropy(f) -> float:
    return _entropy(((1 + 3 * f) / 4, (1 - f) / 4, (1 - f) / 4, (1 - f) / 4))


_MEASURE_FUNCS: dict[str, Callable[[XSummary], float]] = {
    "discord": lambda xs: discord_x(xs, "B"),
    "amid": amid_x,
}


def _measure_fn(measure):
    try:
        return _MEASURE_FUNCS[measure]
    except KeyError:
        raise ValueError(f"measure must be one of {MEASURES}, got {measure!r}") from None


# ---------------------------------------------------------------------------
# boundary points


@dataclass(frozen=True)
class BoundaryPoint:
    """One sample of an extremal curve.

    For ``measure="amid_vs_discord"`` the ``entropy`` slot carries the two-way
    discord coordinate instead of S.  ``params`` holds the family parameters (``a``/``r``, ``a``/``b``, ``f``,
    ``beta``, ``delta`` or the six X entries for ``family="X"``).
    """

    entropy: float
    value: float
    measure: str
    family: str
    params: dict = field(default_factory=dict)

    def state(self) -> states.DensityMatrix:
        p = self.params
        if self.family == "R":
            return states.r_family(p["a"], p["r"])
        if self.family in ("P", "P(b=0)"):
            return states.p_family(p["a"], p["b"])
        if self.family in ("W", "W-"):
            return states.werner(p["f"])
        if self.family == "beta":
            return states.beta_family(p["beta"])
        if self.family == "delta":
            return states.delta_family(p["delta"])
        if self.family == "X":
            return states.x_state(*(p[k] for k in ("r11", "r22", "r33", "r44", "r14", "r23")))
        raise ValueError(f"unknown family {self.family!r}")

    @property
    def tag(self) -> str:
        """Family tag as printed in tables ("W" for both Werner branches)."""
        return "W" if self.family == "W-" else self.family

    def reevaluate(self) -> tuple[float, float]:
        """(entropy, value) recomputed from the state by the general routines."""
        rho = self.state()
        s = measures._prepare(rho).s_ab
        if self.measure == "discord":
            v = measures.discord_left(rho)
        elif self.measure == "amid":
            v = measures.amid(rho)
        elif self.measure == "mid":
            v = measures.mid(rho)
        elif self.measure == "amid_vs_discord":
            return measures.discord_two_way(rho), measures.amid(rho)
        else:
            raise ValueError(self.measure)
        return s, v


# ---------------------------------------------------------------------------
# iso-entropy slices of the two-parameter families

_CENTER = (1.0 / 3.0, 0.0)


def _ray_tmax(theta) -> float:
    """Largest radius along the ray from (1/3, 0) at angle ``theta`` that keeps
    u >= 0 and u + v <= 1 (v >= 0 is enforced by the angle range)."""
    c, s = math.cos(theta), math.sin(theta)
    tmax = math.inf
    if c < 0:
        tmax = min(tmax, (1.0 / 3.0) / -c)
    if c + s > 0:
        tmax = min(tmax, (2.0 / 3.0) / (c + s))
    return tmax


@dataclass(frozen=True)
class _Family2:
    name: str
    theta_lo: float
    theta_hi: float
    entries: Callable
    entropy: Callable
    keys: tuple

    def point(self, theta, t):
        c, s = math.cos(theta), math.sin(theta)
        u = _CENTER[0] + t * c
        v = max(t * s, 0.0)
        return max(u, 0.0), min(v, max(1.0 - u, 0.0))

    def radius(self, theta, target):
        """Radius where the ray meets entropy ``target``, or None."""
        tmax = _ray_tmax(theta)
        f = lambda t: self.entropy(*self.point(theta, t)) - target
        f_end = f(tmax)
        if f_end > ENTROPY_SLACK:
            return None
        if f_end >= 0:
            return tmax
        if f(0.0) < 0:
            return None
        return bisect(f, 0.0, tmax, RADIUS_TOL)

    def params(self, theta, target):
        t = self.radius(theta, target)
        if t is None:
            return None
        return dict(zip(self.keys, self.point(theta, t)))


R_SLICE = _Family2("R", math.pi / 2, math.pi, r_entries, r_entropy, ("a", "r"))
P_SLICE = _Family2("P", 0.0, math.pi, p_entries, p_entropy, ("a", "b"))


@dataclass(frozen=True)
class SliceMax:
    value: float
    theta: float
    params: dict


_CORNER_ANGLE = math.atan2(1.0, -1.0 / 3.0)  # direction of (u, v) = (0, 1)
EDGE_SCAN = 512


def _feasible_intervals(fam: _Family2, target: float) -> list[tuple[float, float]]:
    """Angle intervals whose rays reach entropy ``target`` before the edge.

    The edge entropy is scanned on a grid that contains the corner angles
    (where it can drop to zero over an arbitrarily short arc) and each sign
    change is refined by bisection.
    """
    lo, hi = fam.theta_lo, fam.theta_hi
    grid = {lo + (hi - lo) * k / EDGE_SCAN for k in range(EDGE_SCAN + 1)}
    if lo < _CORNER_ANGLE < hi:
        grid.add(_CORNER_ANGLE)
    grid = sorted(grid)
    edge = lambda th: fam.entropy(*fam.point(th, _ray_tmax(th))) - target - ENTROPY_SLACK
    ok = [edge(th) <= 0 for th in grid]

    def boundary(bad, good):
        # keep the feasible end of the bracket so the returned angle is usable
        while abs(good - bad) > 1e-13:
            mid_ = 0.5 * (bad + good)
            if edge(mid_) <= 0:
                good = mid_
            else:
                bad = mid_
        return good

    out, start = [], None
    for k, th in enumerate(grid):
        if ok[k] and start is None:
            start = th if k == 0 else boundary(grid[k - 1], th)
        if not ok[k] and start is not None:
            out.append((start, boundary(th, grid[k - 1])))
            start = None
    if start is not None:
        out.append((start, grid[-1]))
    return out


def _slice_max(fam: _Family2, measure: str, target: float, n_grid=ANGLE_GRID) -> SliceMax | None:
    fn = _measure_fn(measure)

    def value(theta):
        p = fam.params(theta, target)
        if p is None:
            return -math.inf
        return fn(XSummary.from_entries(*fam.entries(*p.values())))

    best = None
    intervals = _feasible_intervals(fam, target)
    total = sum(b - a for a, b in intervals) or 1.0
    for a, b in intervals:
        n = max(5, int(round(n_grid * (b - a) / total)))
        thetas = [a + (b - a) * k / (n - 1) for k in range(n)]
        vals = [value(t) for t in thetas]
        # every local maximum of the grid is refined: the slice profile can
        # carry a second peak that only overtakes the first between samples
        peaks = [i for i in range(n) if vals[i] > -math.inf
                 and (i == 0 or vals[i] >= vals[i - 1]) and (i == n - 1 or vals[i] >= vals[i + 1])]
        for i in peaks:
            th, v = golden_section_max(value, thetas[max(i - 1, 0)], thetas[min(i + 1, n - 1)], ANGLE_TOL)
            if vals[i] > v:
                th, v = thetas[i], vals[i]
            if best is None or v > best.value:
                best = SliceMax(v, th, fam.params(th, target))
    return best


def _werner_f(target, negative=False):
    """Werner parameter with entropy ``target`` on the chosen branch."""
    if negative:
        lo_f, hi_f = -1.0 / 3.0, 0.0
        if target < LOG2_3 - 1e-12:
            return None
        if target <= LOG2_3:
            return lo_f
    else:
        lo_f, hi_f = 0.0, 1.0
    if target >= S_MAX:
        # both branches meet at f = 0; it is reported once, on the f <= 0 branch
        return 0.0 if negative else None
    if target <= 0.0 and not negative:
        return 1.0
    return bisect(lambda f: w_entropy(f) - target, lo_f, hi_f, RADIUS_TOL)


def _p_edge_branches(target):
    """P(b=0) points with entropy ``target``: one on each side of a = 1/3."""
    if target > LOG2_3:
        return []
    g = lambda a: p_entropy(a, 0.0) - target
    out = []
    if target >= 1.0:
        out.append(1.0 / 3.0 if target == LOG2_3 else bisect(g, 0.0, 1.0 / 3.0, RADIUS_TOL))
    out.append(1.0 if target <= 0 else bisect(g, 1.0 / 3.0, 1.0, RADIUS_TOL))
    return out


def family_best(family: str, measure: str, target: float) -> BoundaryPoint | None:
    """Best point of one family at entropy ``target`` (None if infeasible)."""
    fn = _measure_fn(measure)
    if family == "R":
        sm = _slice_max(R_SLICE, measure, target)
        if sm is None:
            return None
        return BoundaryPoint(target, sm.value, measure, "R", sm.params)
    if family in ("W", "W-"):
        f = _werner_f(target, negative=family == "W-")
        if f is None:
            return None
        return BoundaryPoint(target, fn(XSummary.from_entries(*w_entries(f))), measure, family, {"f": f})
    if family == "P(b=0)":
        best = None
        for a in _p_edge_branches(target):
            v = fn(XSummary.from_entries(*p_entries(a, 0.0)))
            if best is None or v > best.value + TIE_TOL:
                best = BoundaryPoint(target, v, measure, "P(b=0)", {"a": a, "b": 0.0})
        return best
    if family == "P":
        sm = _slice_max(P_SLICE, measure, target)
        if sm is None:
            return None
        edge = family_best("P(b=0)", measure, target)
        if edge is not None and edge.value >= sm.value - TIE_TOL:
            return BoundaryPoint(target, edge.value, measure, "P", edge.params)
        return BoundaryPoint(target, sm.value, measure, "P", sm.params)
    raise ValueError(f"unknown family {family!r}")


def _check_target(target):
    if not (0.0 <= target <= S_MAX) or math.isnan(target):
        raise ConstraintInfeasible(f"entropy {target} outside [0, 2]")


TIE_PROBE = 1e-7


def _winner(measure, target, families=FAMILY_ORDER) -> BoundaryPoint:
    """Best family at ``target``.

    Families within ``TIE_TOL`` of each other are tied; the tie goes to the
    one that wins just below ``target`` (the lower-entropy side of the
    crossing), and to the earlier family of ``FAMILY_ORDER`` when none of the
    tied families exists there.
    """
    cands = [bp for bp in (family_best(f, measure, target) for f in families) if bp is not None]
    top = max(bp.value for bp in cands)
    tied = [bp for bp in cands if bp.value >= top - TIE_TOL]
    best = tied[0]
    if len(tied) > 1 and target - TIE_PROBE >= 0.0:
        below = [f for f in families if any(bp.family == f for bp in tied)]
        probe = [bp for bp in (family_best(f, measure, target - TIE_PROBE) for f in below) if bp is not None]
        if probe:
            fam = max(probe, key=lambda bp: bp.value).family
            best = next(bp for bp in tied if bp.family == fam)
    return best


def max_measure_at_entropy(measure: str, target: float) -> BoundaryPoint:
    """Largest ``measure`` ("discord" or "amid") over the candidate families at
    von Neumann entropy ``target``.

    Raises
    ------
    ConstraintInfeasible
        If ``target`` is outside [0, 2].
    """
    _measure_fn(measure)
    _check_target(target)
    return _winner(measure, float(target))


@dataclass
class LagrangeProblem:
    """Maximize ``measure`` subject to S = ``target`` over the family boxes.

    ``multiplier`` is filled by :meth:`solve` as lambda = -dV/dS, the slope of
    the optimal value, which is what the stationarity condition of
    V + lambda (S - target) fixes at the optimum.
    """

    measure: str
    target: float
    box: dict = field(default_factory=lambda: {
        "R": {"a": (0.0, 1.0 / 3.0), "r": (0.0, 1.0)},
        "W": {"f": (-1.0 / 3.0, 1.0)},
        "P": {"a": (0.0, 1.0), "b": (0.0, 1.0)},
    })
    multiplier: float | None = None
    step: float = 1e-4

    def solve(self) -> BoundaryPoint:
        bp = max_measure_at_entropy(self.measure, self.target)
        lo = max(self.target - self.step, 0.0)
        hi = min(self.target + self.step, S_MAX)
        if hi > lo:
            vl = max_measure_at_entropy(self.measure, lo).value
            vh = max_measure_at_entropy(self.measure, hi).value
            self.multiplier = -(vh - vl) / (hi - lo)
        return bp


# ---------------------------------------------------------------------------
# Table-style outputs


def boundary_curve(measure: str, targets) -> list[BoundaryPoint]:
    return [max_measure_at_entropy(measure, float(s)) for s in targets]


def family_crossings(measure: str = "discord", n_scan: int = 80) -> list[float]:
    """Entropies where the winning family changes.

    A scan over [0, 2] brackets every change of winner; each bracket is then
    narrowed by bisection on the winner itself to ``CROSSING_TOL``.
    """
    scan = [2.0 * k / n_scan for k in range(n_scan + 1)]
    for extra in (LOG2_3 - 1e-9, LOG2_3 + 1e-9):
        scan.append(extra)
    scan.sort()
    winners = [_winner(measure, s).family for s in scan]
    out = []
    for (s0, w0), (s1, w1) in zip(zip(scan, winners), zip(scan[1:], winners[1:])):
        if w0 == w1:
            continue
        lo, hi = s0, s1
        while hi - lo > CROSSING_TOL / 4:
            mid_ = 0.5 * (lo + hi)
            if _winner(measure, mid_).family == w0:
                lo = mid_
            else:
                hi = mid_
        out.append(0.5 * (lo + hi))
    return out


def _slice_optimum(fam, target) -> dict:
    return _slice_max(fam, "discord", target).params


def r_star(a: float) -> float:
    """r of the discord-optimal R state whose ``a`` parameter equals ``a``.

    As S grows from 0 the optimum of the R slice moves from (a, r) = (0, 1)
    towards larger a until it reaches the a = 1/3 edge.  The entropy at which
    it first passes ``a`` is found by bisection (each step is a golden-section
    slice maximization) and the r of that optimum is returned.
    """
    if not 0.0 <= a <= 1.0 / 3.0 + 1e-12:
        raise ValueError(f"a={a} outside [0, 1/3]")
    if a <= 0.0:
        return 1.0
    goal = min(a, 1.0 / 3.0 - 1e-6)
    s = bisect(lambda t: _slice_optimum(R_SLICE, t)["a"] - goal, 0.0, LOG2_3 - 1e-9, 1e-10)
    return _slice_optimum(R_SLICE, s)["r"]


def p_branch_start(lo: float = 1.0, hi: float = LOG2_3 - 1e-6, tol: float = 1e-9) -> float:
    """Smallest entropy at which the discord optimum of the P slice leaves the
    b = 0 edge."""
    inside = lambda t: _slice_optimum(P_SLICE, t)["b"] > 1e-6
    if not inside(hi):
        return hi
    while hi - lo > tol:
        mid_ = 0.5 * (lo + hi)
        if inside(mid_):
            hi = mid_
        else:
            lo = mid_
    return hi


def a_star(b: float) -> float:
    """a of the discord-optimal P state with asymmetry parameter ``b``.

    Along the b > 0 branch the optimal b decreases from its value at the
    branch start to 0 at S = log2 3, where the optimum is (a, b) = (1/3, 0);
    so ``b = 0`` returns 1/3.  Values of ``b`` beyond the branch start return
    the a of the starting point.
    """
    if not 0.0 <= b <= 1.0:
        raise ValueError(f"b={b} outside [0, 1]")
    if b <= 0.0:
        return 1.0 / 3.0
    s0 = p_branch_start()
    top = _slice_optimum(P_SLICE, s0)
    if b >= top["b"]:
        return top["a"]
    s = bisect(lambda t: _slice_optimum(P_SLICE, t)["b"] - b, s0, LOG2_3 - 1e-12, 1e-10)
    return _slice_optimum(P_SLICE, s)["a"]


# ---------------------------------------------------------------------------
# MID boundary


def mid_boundary(target: float) -> BoundaryPoint:
    """Largest MID at entropy ``target``: 1 up to S = 1, then 2 - S."""
    _check_target(target)
    if target <= 1.0:
        if target >= 1.0:
            beta = 0.5
        else:
            beta = 0.0 if target <= 0 else bisect(lambda x: binary_entropy(x) - target, 0.0, 0.5, RADIUS_TOL)
        return BoundaryPoint(target, 1.0, "mid", "beta", {"beta": beta})
    # S(delta) = 1 + h((1 + delta)/2), decreasing in delta on [0, 1]
    if target >= S_MAX:
        delta = 0.0
    else:
        delta = bisect(lambda d: 1.0 + binary_entropy((1 + d) / 2) - target, 0.0, 1.0, RADIUS_TOL)
    return BoundaryPoint(target, 2.0 - target, "mid", "delta", {"delta": delta})


# ---------------------------------------------------------------------------
# A versus two-way discord


def _x_from_vector(x):
    """Map an unconstrained 6-vector to X-state entries (softmax diagonal,
    coherences as fractions of their PSD bounds)."""
    m = max(x[:4])
    w = [math.exp(v - m) for v in x[:4]]
    z = sum(w)
    p = [v / z for v in w]
    c14 = math.sqrt(p[0] * p[3]) * math.cos(x[4]) ** 2
    c23 = math.sqrt(p[1] * p[2]) * math.cos(x[5]) ** 2
    return (p[0], p[1], p[2], p[3], c14, c23)


def _two_way_x(xs):
    return max(discord_x(xs, "B"), discord_x(xs, "A"))


def _noisy(entries, t):
    r11, r22, r33, r44, c14, c23 = entries
    return (r11 * (1 - t) + t / 4, r22 * (1 - t) + t / 4, r33 * (1 - t) + t / 4,
            r44 * (1 - t) + t / 4, c14 * (1 - t), c23 * (1 - t))


def _constrained_amid(entries, target):
    """A of the white-noise mixture of ``entries`` whose D<-> equals ``target``,
    or None when the state itself has D<-> below the target."""
    d0 = _two_way_x(XSummary.from_entries(*entries))
    if d0 < target - 1e-9:
        return None
    if d0 - target <= 1e-9:
        t = 0.0
    else:
        t = bisect(lambda t: _two_way_x(XSummary.from_entries(*_noisy(entries, t))) - target,
                   0.0, 1.0, 1e-11)
    mixed = _noisy(entries, t)
    return amid_x(XSummary.from_entries(*mixed)), mixed


_AVD_STARTS = (
    (0.0, -30.0, -30.0, 0.0, 0.0, 0.0),          # Bell
    (0.0, -1.0, -30.0, 0.0, 0.0, 0.0),           # R-like
    (0.0, 0.5, 1.0, 0.0, 0.0, math.pi / 2),      # P-like
    (0.0, -0.3, 0.2, -0.5, 0.3, 0.9),
    (-0.2, 0.1, 0.1, -0.2, 0.6, 0.6),
)


def amid_vs_discord_upper_boundary(target: float, maxfev: int = 400) -> BoundaryPoint:
    """Largest A among X states with two-way discord ``target``.

    Outer search: Nelder-Mead over a 6-parameter X-state chart from several
    starts.  Inner constraint: each candidate is mixed with white noise, the
    mixing weight fixed by bisection so that D<-> matches ``target``.
    """
    if not 0.0 <= target <= 1.0:
        raise ValueError(f"two-way discord {target} outside [0, 1]")
    best = (-1.0, w_entries(0.0))
    if target <= 0.0:
        return BoundaryPoint(0.0, 0.0, "amid_vs_discord", "W", {"f": 0.0})

    def neg(x):
        res = _constrained_amid(_x_from_vector(x), target)
        return 1.0 if res is None else -res[0]

    for x0 in _AVD_STARTS:
        r = nelder_mead(neg, list(x0), step=0.3, xatol=1e-6, fatol=1e-10, maxfev=maxfev)
        res = _constrained_amid(_x_from_vector(r.x), target)
        if res is not None and res[0] > best[0]:
            best = res
    value, e = best
    params = dict(zip(("r11", "r22", "r33", "r44", "r14", "r23"), e))
    return BoundaryPoint(target, value, "amid_vs_discord", "X", params)
