"""Independent reference computations used as test oracles.

Nothing here calls the package's eigensolver or optimizers: entropies use
``numpy.linalg.eigvalsh``, partial traces are explicit index sums and
optimizations are exhaustive grids.
"""
import numpy as np

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)


def entropy(m):
    ev = np.linalg.eigvalsh(np.asarray(m))
    ev = ev[ev > 1e-14]
    return float(-np.sum(ev * np.log2(ev)))


def shannon(p):
    p = np.asarray(p, dtype=float)
    p = p[p > 1e-15]
    return float(-np.sum(p * np.log2(p)))


def ptrace_loop(m, keep):
    """Partial trace by explicit index summation."""
    m = np.asarray(m)
    out = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                if keep == "A":
                    out[i, j] += m[2 * i + k, 2 * j + k]
                else:
                    out[i, j] += m[2 * k + i, 2 * k + j]
    return out


def mutual_info(m):
    return entropy(ptrace_loop(m, "A")) + entropy(ptrace_loop(m, "B")) - entropy(m)


def fibonacci_sphere(n):
    k = np.arange(n) + 0.5
    z = 1 - 2 * k / n
    phi = np.pi * (1 + 5 ** 0.5) * k
    r = np.sqrt(1 - z * z)
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def _projectors(axes):
    axes = np.atleast_2d(axes)
    ns = np.einsum("np,pij->nij", axes, np.stack([SX, SY, SZ]))
    return 0.5 * (I2 + ns), 0.5 * (I2 - ns)


def _cond_entropy_B(rho, axes):
    """H(A|B) after measuring B along each axis."""
    r = np.asarray(rho).reshape(2, 2, 2, 2)  # (a, b, a', b')
    total = np.zeros(len(axes))
    for proj in _projectors(axes):
        # Tr_B[(I x P) rho] = sum_{b, b'} P[b', b] rho[a, b, a', b']
        cond = np.einsum("nkb,abck->nac", proj, r)
        p = np.real(np.einsum("naa->n", cond))
        ev = np.linalg.eigvalsh(cond / np.where(p > 1e-15, p, 1.0)[:, None, None])
        ev = np.clip(ev, 0, None)
        h = -np.sum(np.where(ev > 1e-14, ev * np.log2(np.where(ev > 1e-14, ev, 1.0)), 0.0), axis=1)
        total += np.where(p > 1e-15, p * h, 0.0)
    return total


def _local_patch(center, radius, n):
    center = center / np.linalg.norm(center)
    helper = np.array([1.0, 0, 0]) if abs(center[0]) < 0.9 else np.array([0, 1.0, 0])
    e1 = np.cross(center, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(center, e1)
    s = np.linspace(-radius, radius, n)
    u, v = np.meshgrid(s, s)
    pts = center + u.reshape(-1, 1) * e1 + v.reshape(-1, 1) * e2
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def discord_brute(rho, side="B", n=10_000, refine=3):
    """Grid minimum of S(meas) - S(AB) + H(kept|meas): a global Fibonacci grid
    followed by successively finer local patches around the best point."""
    rho = np.asarray(rho)
    if side == "A":
        swap = np.eye(4)[[0, 2, 1, 3]]
        rho = swap @ rho @ swap
    s_meas = entropy(ptrace_loop(rho, "B"))
    s_ab = entropy(rho)
    axes = fibonacci_sphere(n)
    vals = _cond_entropy_B(rho, axes)
    best = axes[np.argmin(vals)]
    hmin = vals.min()
    radius = 2.0 / np.sqrt(n) * 2
    for _ in range(refine):
        patch = _local_patch(best, radius, 41)
        pv = _cond_entropy_B(rho, patch)
        if pv.min() < hmin:
            hmin, best = pv.min(), patch[np.argmin(pv)]
        radius /= 8
    return s_meas - s_ab + hmin


def table_mi(rho, na, nb):
    """Classical mutual information of the outcome table for axes na, nb."""
    pa, pb = _projectors(na), _projectors(nb)
    p = np.empty((2, 2))
    for k in range(2):
        for l in range(2):
            p[k, l] = np.real(np.trace(np.kron(pa[k][0], pb[l][0]) @ rho))
    return shannon(p.sum(1)) + shannon(p.sum(0)) - shannon(p.ravel())


def classical_mi_brute(rho, n=400):
    """max over a grid of axis pairs of the outcome-table mutual information."""
    rho = np.asarray(rho)
    axes = fibonacci_sphere(n)
    axes = axes[axes[:, 2] >= 0]  # n and -n give the same measurement
    pa, pb = _projectors(axes)
    r = rho.reshape(2, 2, 2, 2)
    best, arg = -1.0, None
    for ia in range(len(axes)):
        # p[k, l, j] = Tr[(P_k x Q_l^j) rho] with P on A along axis ia and Q on
        # B along every grid axis j
        p = np.empty((2, 2, len(axes)))
        for k, proj_a in enumerate((pa[ia], pb[ia])):
            for l, proj_b in enumerate((pa, pb)):
                p[k, l] = np.real(np.einsum("ca,jdb,abcd->j", proj_a, proj_b, r))
        pA = p.sum(1)
        pB = p.sum(0)
        h = lambda q: -np.sum(np.where(q > 1e-15, q * np.log2(np.where(q > 1e-15, q, 1)), 0), axis=0)
        mi = h(pA) + h(pB) - h(p.reshape(4, -1))
        j = int(np.argmax(mi))
        if mi[j] > best:
            best, arg = float(mi[j]), (axes[ia], axes[j])
    # local polish of both axes on small patches
    na, nb = arg
    radius = 0.15
    for _ in range(4):
        for which in (0, 1):
            patch = _local_patch(na if which == 0 else nb, radius, 15)
            vals = [table_mi(rho, q, nb) if which == 0 else table_mi(rho, na, q) for q in patch]
            j = int(np.argmax(vals))
            if vals[j] > best:
                best = vals[j]
                if which == 0:
                    na = patch[j]
                else:
                    nb = patch[j]
        radius /= 4
    return best


def random_local_unitary(rng):
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))
