# cython: language_level=3
"""Compiled twin of the reference kernels in ``_ref.py``.

Same algorithms, same constants, same constraint ordering, same statuses.
Any semantic change must land in both files; ``_ref`` is the contract.
"""

import numpy as np

cimport cython
cimport numpy as cnp
from libc.math cimport INFINITY, cos, fabs, fmax, log, sin, sqrt

cnp.import_array()

cdef double _PI = 3.14159265358979323846
cdef double _SQRT_PI = 1.7724538509055160273
cdef double _SERIES_SPLIT = 2.5
cdef double _LENTZ_TINY = 1e-300
cdef double _LENTZ_EPS = 1e-15
cdef int _LENTZ_MAXIT = 220

_STATUS_OK = 0
_STATUS_ITER = 1
_STATUS_INFEASIBLE_START = 2
_STATUS_LINESEARCH = 3


@cython.cdivision(True)
cdef void _series_scalar(double x, double* c_out, double* s_out) noexcept:
    cdef double t = 0.5 * _PI * x * x
    cdef double ratio = -(t * t)
    cdef double u = x
    cdef double v = x * t
    cdef double c = u
    cdef double s = v / 3.0
    cdef int k
    for k in range(1, 60):
        u = u * ratio / ((2 * k - 1) * (2 * k))
        v = v * ratio / ((2 * k) * (2 * k + 1))
        c += u / (4 * k + 1)
        s += v / (4 * k + 3)
        if fmax(fabs(u), fabs(v)) < 1e-18:
            break
    c_out[0] = c
    s_out[0] = s


@cython.cdivision(True)
cdef void _cf_scalar(double x, double* c_out, double* s_out) noexcept:
    # C + iS = (1+i)/2 (1 - erfc(z)), z = sqrt(pi)/2 (1-i) x, erfc by
    # modified Lentz on 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    cdef double complex z = 0.5 * _SQRT_PI * (1.0 - 1.0j) * x
    cdef double complex f = _LENTZ_TINY
    cdef double complex cc = f
    cdef double complex dd = 0.0
    cdef double complex delta, phase, erfc, e
    cdef double a
    cdef int j
    for j in range(1, _LENTZ_MAXIT + 1):
        a = 1.0 if j == 1 else 0.5 * (j - 1)
        dd = z + a * dd
        if dd == 0.0:
            dd = _LENTZ_TINY
        cc = z + a / cc
        if cc == 0.0:
            cc = _LENTZ_TINY
        dd = 1.0 / dd
        delta = cc * dd
        f = f * delta
        if fabs(delta.real - 1.0) + fabs(delta.imag) < _LENTZ_EPS:
            break
    # z^2 = -i pi x^2 / 2, so exp(-z^2) is the pure phase exp(i pi x^2 / 2)
    phase = cos(0.5 * _PI * x * x) + 1.0j * sin(0.5 * _PI * x * x)
    erfc = phase * f / _SQRT_PI
    e = 0.5 * (1.0 + 1.0j) * (1.0 - erfc)
    c_out[0] = e.real
    s_out[0] = e.imag


def fresnel_cs(x):
    """Fresnel integrals C(x), S(x); see the reference twin for semantics."""
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr).ravel().copy()
    cdef double[::1] xv = flat
    c = np.empty_like(flat)
    s = np.empty_like(flat)
    cdef double[::1] cv = c
    cdef double[::1] sv = s
    cdef Py_ssize_t i
    cdef double ax, sign, ci, si
    for i in range(xv.shape[0]):
        ax = fabs(xv[i])
        sign = 1.0 if xv[i] > 0.0 else (-1.0 if xv[i] < 0.0 else 0.0)
        if ax <= _SERIES_SPLIT:
            _series_scalar(ax, &ci, &si)
        else:
            _cf_scalar(ax, &ci, &si)
        cv[i] = sign * ci
        sv[i] = sign * si
    if scalar:
        return float(c[0]), float(s[0])
    shape = np.atleast_1d(arr).shape
    return c.reshape(shape), s.reshape(shape)


# ---------------------------------------------------------------------------
# Barrier solver twin. Variable and constraint layout as in _ref:
# x = [w (nb), S (m), I (m)]; constraints [budget, nonneg, interference,
# hyperbolic, S box, I box, rate?].
# ---------------------------------------------------------------------------


@cython.boundscheck(False)
@cython.wraparound(False)
@cython.cdivision(True)
cdef void _con_values_c(
    double[::1] x,
    int nb,
    int m,
    cnp.intp_t[::1] id_beam,
    double[:, ::1] a_rows,
    double[::1] noise_hat,
    double[::1] c_s,
    double[::1] c_i,
    double rate_bound,
    bint has_rate,
    double[::1] s_max,
    double[::1] i_max,
    double[::1] g,
) noexcept:
    cdef Py_ssize_t j, k
    cdef double acc = 0.0
    cdef double dot, rate_acc
    for j in range(nb):
        acc += x[j]
        g[1 + j] = x[j]
    g[0] = 1.0 - acc
    if m == 0:
        return
    cdef int base = 1 + nb
    for k in range(m):
        dot = 0.0
        for j in range(nb):
            dot += a_rows[k, j] * x[j]
        g[base + k] = x[nb + m + k] - dot - noise_hat[k]
    base += m
    for k in range(m):
        g[base + k] = x[nb + k] * x[id_beam[k]] - 1.0
    base += m
    for k in range(m):
        g[base + k] = s_max[k] - x[nb + k]
    base += m
    for k in range(m):
        g[base + k] = i_max[k] - x[nb + m + k]
    if has_rate:
        rate_acc = 0.0
        for k in range(m):
            rate_acc += c_s[k] * x[nb + k] + c_i[k] * x[nb + m + k]
        g[base + m] = -rate_acc - rate_bound


@cython.boundscheck(False)
@cython.wraparound(False)
cdef double _min_of(double[::1] g) noexcept:
    cdef double lo = g[0]
    cdef Py_ssize_t i
    for i in range(1, g.shape[0]):
        if g[i] < lo:
            lo = g[i]
    return lo


@cython.boundscheck(False)
@cython.wraparound(False)
cdef double _log_sum(double[::1] g) noexcept:
    cdef double acc = 0.0
    cdef Py_ssize_t i
    for i in range(g.shape[0]):
        acc += log(g[i])
    return acc


@cython.boundscheck(False)
@cython.wraparound(False)
@cython.cdivision(True)
cdef void _phi_derivs_c(
    double[::1] x,
    double t,
    int nb,
    int m,
    double[::1] q,
    cnp.intp_t[::1] id_beam,
    double[:, ::1] a_rows,
    double[::1] c_s,
    double[::1] c_i,
    bint has_rate,
    double[::1] g,
    double[::1] grad,
    double[:, ::1] hess,
    bint want_hess,
) noexcept:
    cdef int n = nb + 2 * m
    cdef Py_ssize_t i, j, k
    cdef double gb, gw, gi, gh, gr, inv, inv2, sk, wj, cross, vi, vj

    for i in range(n):
        grad[i] = 0.0
        if want_hess:
            for j in range(n):
                hess[i, j] = 0.0

    gb = g[0]
    inv = 1.0 / gb
    inv2 = inv * inv
    for j in range(nb):
        grad[j] = -t * q[j] + inv
        if want_hess:
            for i in range(nb):
                hess[j, i] += inv2

    for j in range(nb):
        gw = g[1 + j]
        grad[j] -= 1.0 / gw
        if want_hess:
            hess[j, j] += 1.0 / (gw * gw)

    cdef int base = 1 + nb
    for k in range(m):
        gi = g[base + k]
        inv = 1.0 / gi
        inv2 = inv * inv
        for j in range(nb):
            grad[j] += a_rows[k, j] * inv
        grad[nb + m + k] -= inv
        if want_hess:
            for i in range(nb):
                for j in range(nb):
                    hess[i, j] += a_rows[k, i] * a_rows[k, j] * inv2
                hess[i, nb + m + k] -= a_rows[k, i] * inv2
                hess[nb + m + k, i] -= a_rows[k, i] * inv2
            hess[nb + m + k, nb + m + k] += inv2

    base += m
    for k in range(m):
        gh = g[base + k]
        j = id_beam[k]
        sk = x[nb + k]
        wj = x[j]
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
    for k in range(m):
        gr = g[base + k]
        grad[nb + k] += 1.0 / gr
        if want_hess:
            hess[nb + k, nb + k] += 1.0 / (gr * gr)

    base += m
    for k in range(m):
        gr = g[base + k]
        grad[nb + m + k] += 1.0 / gr
        if want_hess:
            hess[nb + m + k, nb + m + k] += 1.0 / (gr * gr)

    if has_rate:
        gr = g[base + m]
        inv = 1.0 / gr
        inv2 = inv * inv
        for k in range(m):
            grad[nb + k] += c_s[k] * inv
            grad[nb + m + k] += c_i[k] * inv
        if want_hess:
            for i in range(m):
                for j in range(m):
                    vi = c_s[i]
                    vj = c_s[j]
                    hess[nb + i, nb + j] += vi * vj * inv2
                    hess[nb + i, nb + m + j] += vi * c_i[j] * inv2
                    hess[nb + m + i, nb + j] += c_i[i] * vj * inv2
                    hess[nb + m + i, nb + m + j] += c_i[i] * c_i[j] * inv2


@cython.boundscheck(False)
@cython.wraparound(False)
@cython.cdivision(True)
cdef int _factor(double[:, ::1] hess, double[:, ::1] chol, int n, double ridge) noexcept:
    cdef Py_ssize_t i, j, k
    cdef double s
    for i in range(n):
        for j in range(i + 1):
            s = hess[i, j]
            if i == j:
                s += ridge
            for k in range(j):
                s -= chol[i, k] * chol[j, k]
            if i == j:
                if s <= 0.0:
                    return -1
                chol[i, i] = sqrt(s)
            else:
                chol[i, j] = s / chol[j, j]
    return 0


@cython.boundscheck(False)
@cython.wraparound(False)
@cython.cdivision(True)
cdef void _chol_solve(double[:, ::1] chol, double[::1] rhs, double[::1] out, int n) noexcept:
    cdef Py_ssize_t i, k
    cdef double s
    for i in range(n):
        s = rhs[i]
        for k in range(i):
            s -= chol[i, k] * out[k]
        out[i] = s / chol[i, i]
    for i in range(n - 1, -1, -1):
        s = out[i]
        for k in range(i + 1, n):
            s -= chol[k, i] * out[k]
        out[i] = s / chol[i, i]


@cython.boundscheck(False)
@cython.wraparound(False)
cdef int _solve_newton_c(
    double[:, ::1] hess, double[::1] rhs, double[::1] dx, double[:, ::1] chol, int n
) noexcept:
    cdef double ridge = 0.0
    cdef double scale = hess[0, 0]
    cdef Py_ssize_t i
    cdef int attempt
    for i in range(1, n):
        if hess[i, i] > scale:
            scale = hess[i, i]
    for attempt in range(12):
        if _factor(hess, chol, n, ridge) == 0:
            _chol_solve(chol, rhs, dx, n)
            return 0
        ridge = fmax(ridge * 100.0, 1e-14 * scale)
    return -1


@cython.boundscheck(False)
@cython.wraparound(False)
@cython.cdivision(True)
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
    double t0=1.0,
    double mu=20.0,
    double gap_tol=1e-9,
    double newton_tol=1e-11,
    int max_newton=120,
    int max_outer=60,
):
    """Log-barrier path following; see the reference twin for the contract."""
    q_arr = np.ascontiguousarray(q, dtype=float)
    id_arr = np.ascontiguousarray(id_beam, dtype=np.intp)
    cdef int nb = q_arr.shape[0]
    cdef int m = id_arr.shape[0]
    if m:
        a_arr = np.ascontiguousarray(a_rows, dtype=float).reshape(m, nb)
    else:
        a_arr = np.zeros((0, nb))
    noise_arr = np.ascontiguousarray(noise_hat, dtype=float)
    cs_arr = np.ascontiguousarray(c_s, dtype=float)
    ci_arr = np.ascontiguousarray(c_i, dtype=float)
    smax_arr = np.ascontiguousarray(s_max, dtype=float)
    imax_arr = np.ascontiguousarray(i_max, dtype=float)
    x_arr = np.array(x0, dtype=float).ravel().copy()

    cdef bint rate_flag = bool(has_rate)
    cdef double rb = float(rate_bound)
    cdef int n = nb + 2 * m
    cdef int n_con = 1 + nb + 4 * m + (1 if rate_flag else 0)

    cdef double[::1] qv = q_arr
    cdef cnp.intp_t[::1] idv = id_arr
    cdef double[:, ::1] av = a_arr
    cdef double[::1] nv = noise_arr
    cdef double[::1] csv = cs_arr
    cdef double[::1] civ = ci_arr
    cdef double[::1] smv = smax_arr
    cdef double[::1] imv = imax_arr
    cdef double[::1] x = x_arr

    g_arr = np.empty(n_con)
    gn_arr = np.empty(n_con)
    grad_arr = np.empty(n)
    hess_arr = np.empty((n, n))
    chol_arr = np.empty((n, n))
    dx_arr = np.empty(n)
    rhs_arr = np.empty(n)
    xn_arr = np.empty(n)
    cdef double[::1] g = g_arr
    cdef double[::1] gn = gn_arr
    cdef double[::1] grad = grad_arr
    cdef double[:, ::1] hess = hess_arr
    cdef double[:, ::1] chol = chol_arr
    cdef double[::1] dx = dx_arr
    cdef double[::1] rhs = rhs_arr
    cdef double[::1] xn = xn_arr

    _con_values_c(x, nb, m, idv, av, nv, csv, civ, rb, rate_flag, smv, imv, g)
    lam_arr = np.zeros(n_con)
    if _min_of(g) <= 0.0:
        return (
            x_arr,
            lam_arr,
            np.inf,
            np.inf,
            0,
            0,
            _STATUS_INFEASIBLE_START,
        )

    cdef double t = t0
    cdef int status = _STATUS_OK
    cdef int n_outer = 0
    cdef int n_newton = 0
    cdef int steps = 0
    cdef int stat = _STATUS_OK

    while True:
        stat = _center_c(
            x, t, nb, m, qv, idv, av, nv, csv, civ, rb, rate_flag, smv, imv,
            newton_tol, max_newton, g, gn, grad, hess, chol, dx, rhs, xn, &steps
        )
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

    # polish: drive the Newton decrement toward machine precision
    _center_c(
        x, t, nb, m, qv, idv, av, nv, csv, civ, rb, rate_flag, smv, imv,
        1e-18, 25, g, gn, grad, hess, chol, dx, rhs, xn, &steps
    )
    n_newton += steps

    _con_values_c(x, nb, m, idv, av, nv, csv, civ, rb, rate_flag, smv, imv, g)
    cdef Py_ssize_t i
    for i in range(n_con):
        lam_arr[i] = 1.0 / (t * g[i])
    _phi_derivs_c(x, t, nb, m, qv, idv, av, csv, civ, rate_flag, g, grad, hess, False)
    cdef double dual_res = 0.0
    for i in range(n):
        if fabs(grad[i]) > dual_res:
            dual_res = fabs(grad[i])
    dual_res /= t
    return (x_arr, lam_arr, n_con / t, dual_res, n_outer, n_newton, status)


@cython.boundscheck(False)
@cython.wraparound(False)
@cython.cdivision(True)
cdef int _center_c(
    double[::1] x,
    double t,
    int nb,
    int m,
    double[::1] q,
    cnp.intp_t[::1] id_beam,
    double[:, ::1] a_rows,
    double[::1] noise_hat,
    double[::1] c_s,
    double[::1] c_i,
    double rate_bound,
    bint has_rate,
    double[::1] s_max,
    double[::1] i_max,
    double newton_tol,
    int max_newton,
    double[::1] g,
    double[::1] gn,
    double[::1] grad,
    double[:, ::1] hess,
    double[:, ::1] chol,
    double[::1] dx,
    double[::1] rhs,
    double[::1] xn,
    int* steps_out,
) noexcept:
    cdef int steps = 0
    cdef double prev_dec2 = INFINITY
    cdef int n = nb + 2 * m
    cdef Py_ssize_t i, it, ls
    cdef double dec2, step, slope, lin, log_g0, dphi

    for it in range(max_newton):
        _con_values_c(x, nb, m, id_beam, a_rows, noise_hat, c_s, c_i,
                      rate_bound, has_rate, s_max, i_max, g)
        _phi_derivs_c(x, t, nb, m, q, id_beam, a_rows, c_s, c_i, has_rate,
                      g, grad, hess, True)
        for i in range(n):
            rhs[i] = -grad[i]
        if _solve_newton_c(hess, rhs, dx, chol, n) != 0:
            steps_out[0] = steps
            return _STATUS_LINESEARCH
        dec2 = 0.0
        for i in range(n):
            dec2 -= grad[i] * dx[i]
        if dec2 <= 2.0 * newton_tol:
            steps_out[0] = steps
            return _STATUS_OK
        if dec2 < 1e-8 and dec2 >= prev_dec2:
            # roundoff floor: the decrement stopped improving
            steps_out[0] = steps
            return _STATUS_OK
        prev_dec2 = dec2
        if dec2 <= 0.0625:
            # quadratic phase: full step, domain check only
            step = 1.0
            while True:
                for i in range(n):
                    xn[i] = x[i] + step * dx[i]
                _con_values_c(xn, nb, m, id_beam, a_rows, noise_hat, c_s, c_i,
                              rate_bound, has_rate, s_max, i_max, gn)
                if _min_of(gn) > 0.0:
                    break
                step *= 0.5
                if step < 1e-20:
                    steps_out[0] = steps
                    return _STATUS_LINESEARCH
            for i in range(n):
                x[i] = xn[i]
        else:
            # Armijo on phi differences, linear part taken analytically
            slope = 0.0
            lin = 0.0
            for i in range(n):
                slope += grad[i] * dx[i]
            for i in range(nb):
                lin -= t * q[i] * dx[i]
            log_g0 = _log_sum(g)
            step = 1.0
            for ls in range(100):
                for i in range(n):
                    xn[i] = x[i] + step * dx[i]
                _con_values_c(xn, nb, m, id_beam, a_rows, noise_hat, c_s, c_i,
                              rate_bound, has_rate, s_max, i_max, gn)
                if _min_of(gn) > 0.0:
                    dphi = lin * step - (_log_sum(gn) - log_g0)
                    if dphi <= 0.25 * step * slope:
                        break
                step *= 0.5
            else:
                steps_out[0] = steps
                return _STATUS_LINESEARCH
            for i in range(n):
                x[i] = xn[i]
        steps += 1

    steps_out[0] = steps
    return _STATUS_ITER
