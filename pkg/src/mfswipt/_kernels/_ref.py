"""Reference (pure numpy) implementations of the numerical kernels.

Semantics here define the contract; the compiled twin in ``_fast.pyx``
reproduces the same algorithms step for step. Keep the two in sync.
"""

from __future__ import annotations

import numpy as np

_SQRT_PI = 1.7724538509055160273
_SERIES_SPLIT = 2.5
_LENTZ_TINY = 1e-300
_LENTZ_EPS = 1e-15
_LENTZ_MAXIT = 220


def fresnel_cs(x):
    """Fresnel integrals C(x), S(x) with the pi/2 t^2 phase convention.

    Power series for |x| <= 2.5, continued-fraction evaluation of the
    auxiliary complex-error-function tail beyond. Absolute error below
    1e-9 everywhere (in practice near machine precision).

    Parameters
    ----------
    x : array_like
        Real arguments, any shape.

    Returns
    -------
    (C, S) : ndarray pair matching the input shape.
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    xf = np.atleast_1d(x).ravel()
    c = np.empty_like(xf)
    s = np.empty_like(xf)

    ax = np.abs(xf)
    small = ax <= _SERIES_SPLIT
    if np.any(small):
        cs, ss = _fresnel_series(ax[small])
        c[small], s[small] = cs, ss
    large = ~small
    if np.any(large):
        cl, sl = _fresnel_cf(ax[large])
        c[large], s[large] = cl, sl

    # odd functions
    sign = np.sign(xf)
    c *= sign
    s *= sign

    c = c.reshape(np.atleast_1d(x).shape)
    s = s.reshape(np.atleast_1d(x).shape)
    if scalar:
        return float(c[0]), float(s[0])
    return c, s


def _fresnel_series(x):
    # C = sum_k (-1)^k (pi/2)^{2k} x^{4k+1} / ((2k)! (4k+1))
    # S = sum_k (-1)^k (pi/2)^{2k+1} x^{4k+3} / ((2k+1)! (4k+3))
    t = 0.5 * np.pi * x * x
    ratio = -(t * t)
    u = x.copy()          # x * ratio^k / (2k)!
    v = x * t             # x * t * ratio^k / (2k+1)!
    c = u.copy()          # k = 0 terms: u/(1), v/3
    s = v / 3.0
    for k in range(1, 60):
        u = u * ratio / ((2 * k - 1) * (2 * k))
        v = v * ratio / ((2 * k) * (2 * k + 1))
        c += u / (4 * k + 1)
        s += v / (4 * k + 3)
        if max(np.max(np.abs(u)), np.max(np.abs(v))) < 1e-18:
            break
    return c, s


def _fresnel_cf(x):
    # C(x) + i S(x) = (1+i)/2 * (1 - erfc(z)),  z = sqrt(pi)/2 (1 - i) x,
    # with erfc(z) = exp(-z^2)/sqrt(pi) * K(z) and K the continued fraction
    # 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))), evaluated by modified Lentz.
    z = (_SQRT_PI / 2.0) * (1.0 - 1.0j) * x
    f = np.full(z.shape, _LENTZ_TINY, dtype=complex)
    cc = f.copy()
    dd = np.zeros_like(z)
    done = np.zeros(z.shape, dtype=bool)
    for j in range(1, _LENTZ_MAXIT + 1):
        a = 1.0 if j == 1 else 0.5 * (j - 1)
        dd = z + a * dd
        dd = np.where(dd == 0, _LENTZ_TINY, dd)
        cc = z + a / cc
        cc = np.where(cc == 0, _LENTZ_TINY, cc)
        dd = 1.0 / dd
        delta = cc * dd
        f = np.where(done, f, f * delta)
        done |= np.abs(delta - 1.0) < _LENTZ_EPS
        if np.all(done):
            break
    # z^2 = -i pi x^2 / 2, so exp(-z^2) is the pure phase exp(i pi x^2 / 2)
    phase = np.exp(0.5j * np.pi * x * x)
    erfc = phase * f / _SQRT_PI
    e = 0.5 * (1.0 + 1.0j) * (1.0 - erfc)
    return e.real, e.imag


# ---------------------------------------------------------------------------
# Barrier interior-point solver for one scaled power-allocation subproblem.
#
# Variables x = [w (nb), S (M), I (M)], all O(1) after the caller's scaling.
# maximize q.w subject to
#   1 - sum(w) >= 0                      (budget)
#   w_j >= 0                             (nb)
#   I_m - a_m.w - noise_m >= 0           (interference definition)
#   S_m * w_{id_beam[m]} - 1 >= 0        (hyperbolic received-power slack)
#   s_max_m - S_m >= 0                   (containment box)
#   i_max_m - I_m >= 0                   (containment box)
#   -(c_s.S + c_i.I) - rate_bound >= 0   (linearized rate, if has_rate)
# ---------------------------------------------------------------------------

_STATUS_OK = 0
_STATUS_ITER = 1
_STATUS_INFEASIBLE_START = 2
_STATUS_LINESEARCH = 3


def barrier_solve(
    q,
    id_beam,
    a_rows,
    noise_hat,
    c_s,
    c_i,
    rate_bound,
    has_rate,
    s_max,
    i_max,
    x0,
    t0=1.0,
    mu=20.0,
    gap_tol=1e-9,
    newton_tol=1e-11,
    max_newton=120,
    max_outer=60,
):
    """Log-barrier path following with Newton centering and backtracking.

    Returns (x, lam, gap, dual_res, n_outer, n_newton, status) where lam are
    the barrier dual multipliers 1/(t g_i) in constraint order [budget,
    nonneg, interference, hyperbolic, S box, I box, rate], gap = m/t is the
    duality gap bound, and dual_res the infinity norm of the scaled KKT
    stationarity residual.
    """
    q = np.asarray(q, dtype=float)
    id_beam = np.asarray(id_beam, dtype=np.intp)
    a_rows = np.asarray(a_rows, dtype=float).reshape(len(id_beam), -1) if len(id_beam) else np.zeros((0, len(q)))
    noise_hat = np.asarray(noise_hat, dtype=float)
    c_s = np.asarray(c_s, dtype=float)
    c_i = np.asarray(c_i, dtype=float)
    s_max = np.asarray(s_max, dtype=float)
    i_max = np.asarray(i_max, dtype=float)
    x = np.asarray(x0, dtype=float).copy()

    nb = q.shape[0]
    m = id_beam.shape[0]
    n_con = 1 + nb + 4 * m + (1 if has_rate else 0)

    data = (nb, m, q, id_beam, a_rows, noise_hat, c_s, c_i, rate_bound, has_rate, s_max, i_max)

    g = _con_values(x, data)
    if g.min() <= 0.0:
        lam = np.zeros(n_con)
        return x, lam, np.inf, np.inf, 0, 0, _STATUS_INFEASIBLE_START

    t = float(t0)
    status = _STATUS_OK
    n_outer = 0
    n_newton = 0
    while True:
        steps, stat = _center(x, t, data, newton_tol, max_newton)
        n_newton += steps
        n_outer += 1
        if stat != _STATUS_OK and status == _STATUS_OK:
            status = stat
        if n_con / t < gap_tol:
            break
        if n_outer >= max_outer:
            status = _STATUS_ITER
            break
        t *= mu

    # polish: drive the Newton decrement toward machine precision so the
    # stationarity residual is dominated by roundoff, not truncation
    steps, _ = _center(x, t, data, 1e-18, 25)
    n_newton += steps

    g = _con_values(x, data)
    lam = 1.0 / (t * g)
    grad, _ = _phi_derivs(x, t, data, g, want_hess=False)
    dual_res = float(np.max(np.abs(grad)) / t)
    gap = n_con / t
    return x, lam, gap, dual_res, n_outer, n_newton, status


def _con_values(x, data):
    nb, m, q, id_beam, a_rows, noise_hat, c_s, c_i, rate_bound, has_rate, s_max, i_max = data
    w = x[:nb]
    parts = [np.array([1.0 - w.sum()]), w]
    if m:
        s = x[nb : nb + m]
        i_ = x[nb + m : nb + 2 * m]
        parts.append(i_ - a_rows @ w - noise_hat)
        parts.append(s * w[id_beam] - 1.0)
        parts.append(s_max - s)
        parts.append(i_max - i_)
        if has_rate:
            parts.append(np.array([-(c_s @ s + c_i @ i_) - rate_bound]))
    return np.concatenate(parts)


def _phi_value(x, t, data, g):
    nb = data[0]
    q = data[2]
    return -t * float(q @ x[:nb]) - float(np.log(g).sum())


def _phi_derivs(x, t, data, g, want_hess=True):
    nb, m, q, id_beam, a_rows, noise_hat, c_s, c_i, rate_bound, has_rate, s_max, i_max = data
    n = nb + 2 * m
    grad = np.zeros(n)
    hess = np.zeros((n, n)) if want_hess else None
    w = x[:nb]
    s = x[nb : nb + m]

    grad[:nb] -= t * q

    gb = g[0]
    grad[:nb] += 1.0 / gb
    if want_hess:
        hess[:nb, :nb] += 1.0 / (gb * gb)

    gw = g[1 : 1 + nb]
    grad[:nb] -= 1.0 / gw
    if want_hess:
        idx = np.arange(nb)
        hess[idx, idx] += 1.0 / (gw * gw)

    base = 1 + nb
    for k in range(m):
        gi = g[base + k]
        a = a_rows[k]
        grad[:nb] += a / gi
        grad[nb + m + k] -= 1.0 / gi
        if want_hess:
            inv2 = 1.0 / (gi * gi)
            hess[:nb, :nb] += np.outer(a, a) * inv2
            hess[:nb, nb + m + k] -= a * inv2
            hess[nb + m + k, :nb] -= a * inv2
            hess[nb + m + k, nb + m + k] += inv2

    base += m
    for k in range(m):
        gh = g[base + k]
        j = id_beam[k]
        sk = s[k]
        wj = w[j]
        grad[nb + k] -= wj / gh
        grad[j] -= sk / gh
        if want_hess:
            inv2 = 1.0 / (gh * gh)
            hess[nb + k, nb + k] += wj * wj * inv2
            hess[j, j] += sk * sk * inv2
            cross = sk * wj * inv2 - 1.0 / gh
            hess[nb + k, j] += cross
            hess[j, nb + k] += cross

    base += m
    gs = g[base : base + m]
    grad[nb : nb + m] += 1.0 / gs
    if want_hess and m:
        idx = np.arange(nb, nb + m)
        hess[idx, idx] += 1.0 / (gs * gs)

    base += m
    gi_ = g[base : base + m]
    grad[nb + m : nb + 2 * m] += 1.0 / gi_
    if want_hess and m:
        idx = np.arange(nb + m, nb + 2 * m)
        hess[idx, idx] += 1.0 / (gi_ * gi_)

    if has_rate:
        gr = g[-1]
        grad[nb : nb + m] += c_s / gr
        grad[nb + m : nb + 2 * m] += c_i / gr
        if want_hess:
            v = np.concatenate([np.zeros(nb), c_s, c_i])
            hess += np.outer(v, v) / (gr * gr)

    return grad, hess


def _center(x, t, data, newton_tol, max_newton):
    """Newton centering at fixed t; mutates x in place."""
    steps = 0
    prev_dec2 = np.inf
    for _ in range(max_newton):
        g = _con_values(x, data)
        grad, hess = _phi_derivs(x, t, data, g)
        dx = _solve_newton(hess, -grad)
        if dx is None:
            return steps, _STATUS_LINESEARCH
        dec2 = float(-grad @ dx)
        if dec2 <= 2.0 * newton_tol:
            return steps, _STATUS_OK
        if dec2 < 1e-8 and dec2 >= prev_dec2:
            # roundoff floor: the decrement stopped improving
            return steps, _STATUS_OK
        prev_dec2 = dec2
        if dec2 <= 0.0625:
            # quadratic phase (lambda <= 0.25): full step, domain check only;
            # phi comparisons at large t drown in float roundoff here
            step = 1.0
            xn = x + dx
            while _con_values(xn, data).min() <= 0.0:
                step *= 0.5
                if step < 1e-20:
                    return steps, _STATUS_LINESEARCH
                xn = x + step * dx
            x[:] = xn
        else:
            step = _line_search(x, dx, t, data, g, grad)
            if step is None:
                return steps, _STATUS_LINESEARCH
            x += step * dx
        steps += 1
    return steps, _STATUS_ITER


def _solve_newton(hess, rhs):
    ridge = 0.0
    scale = float(np.max(np.diag(hess)))
    for attempt in range(12):
        try:
            cho = np.linalg.cholesky(hess + ridge * np.eye(hess.shape[0]) if ridge else hess)
        except np.linalg.LinAlgError:
            ridge = max(ridge * 100.0, 1e-14 * scale)
            continue
        y = np.linalg.solve(cho, rhs)
        return np.linalg.solve(cho.T, y)
    return None


def _line_search(x, dx, t, data, g, grad, alpha=0.25, beta=0.5):
    # works on phi differences: at large t the absolute phi value is huge and
    # a value-based Armijo test loses the decrease to roundoff
    slope = float(grad @ dx)
    nb = data[0]
    q = data[2]
    lin = -t * float(q @ dx[:nb])
    log_g0 = float(np.log(g).sum())
    step = 1.0
    for _ in range(100):
        xn = x + step * dx
        gn = _con_values(xn, data)
        if gn.min() > 0.0:
            dphi = lin * step - (float(np.log(gn).sum()) - log_g0)
            if dphi <= alpha * step * slope:
                return step
        step *= beta
    return None
