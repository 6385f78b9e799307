"""Pure-numpy atom evaluation kernels (fallback backend).

Same contracts as kernels_numba: value kernels accumulate per-row values
into ``out`` (objective row last) and return the number of atom-domain
violations; gradient kernels accumulate unweighted per-row gradients into
``gc``; Hessian kernels accumulate row-weighted Hessians into ``h``.
"""

import numpy as np


def _seg_sums(off, contrib):
    if len(off) == 1:
        return np.zeros(0)
    return np.add.reduceat(contrib, off[:-1])


# -- affine -------------------------------------------------------------------

def affine_value(off, idx, w, const, row, z, out):
    vals = const + _seg_sums(off, w * z[idx])
    np.add.at(out, row, vals)
    return 0


def affine_grad(off, idx, w, row, z, gc):
    rows = np.repeat(row, np.diff(off))
    np.add.at(gc, (rows, idx), w)


# -- quad: alpha ||M z + c||^2 -----------------------------------------------

def quad_value(off, idx, moff, mflat, coff, cflat, mrows, alpha, row, z, out):
    for i in range(len(row)):
        d = off[i + 1] - off[i]
        m = mrows[i]
        mat = mflat[moff[i]:moff[i + 1]].reshape(m, d)
        u = mat @ z[idx[off[i]:off[i + 1]]] + cflat[coff[i]:coff[i + 1]]
        out[row[i]] += alpha[i] * (u @ u)
    return 0


def quad_grad(off, idx, moff, mflat, coff, cflat, mrows, alpha, row, z, gc):
    for i in range(len(row)):
        d = off[i + 1] - off[i]
        m = mrows[i]
        sub = idx[off[i]:off[i + 1]]
        mat = mflat[moff[i]:moff[i + 1]].reshape(m, d)
        u = mat @ z[sub] + cflat[coff[i]:coff[i + 1]]
        gc[row[i], sub] += 2.0 * alpha[i] * (mat.T @ u)


def quad_hess(off, idx, mtmoff, mtm, alpha, row, roww, h):
    for i in range(len(row)):
        wgt = roww[row[i]]
        if wgt == 0.0:
            continue
        d = off[i + 1] - off[i]
        sub = idx[off[i]:off[i + 1]]
        block = mtm[mtmoff[i]:mtmoff[i + 1]].reshape(d, d)
        h[np.ix_(sub, sub)] += (2.0 * alpha[i] * wgt) * block


# -- normcube: alpha ||M z + c||^3 (2-row map) ---------------------------------

def normcube_value(off, idx, moff, mflat, coff, cflat, mrows, alpha, row, z,
                   out):
    for i in range(len(row)):
        d = off[i + 1] - off[i]
        mat = mflat[moff[i]:moff[i + 1]].reshape(2, d)
        u = mat @ z[idx[off[i]:off[i + 1]]] + cflat[coff[i]:coff[i + 1]]
        out[row[i]] += alpha[i] * np.linalg.norm(u) ** 3
    return 0


def normcube_grad(off, idx, moff, mflat, coff, cflat, mrows, alpha, row, z,
                  gc):
    for i in range(len(row)):
        d = off[i + 1] - off[i]
        sub = idx[off[i]:off[i + 1]]
        mat = mflat[moff[i]:moff[i + 1]].reshape(2, d)
        u = mat @ z[sub] + cflat[coff[i]:coff[i + 1]]
        gc[row[i], sub] += 3.0 * alpha[i] * np.linalg.norm(u) * (mat.T @ u)


def normcube_hess(off, idx, moff, mflat, mtmoff, mtm, coff, cflat, alpha,
                  row, roww, z, h):
    for i in range(len(row)):
        wgt = roww[row[i]]
        if wgt == 0.0:
            continue
        d = off[i + 1] - off[i]
        sub = idx[off[i]:off[i + 1]]
        mat = mflat[moff[i]:moff[i + 1]].reshape(2, d)
        u = mat @ z[sub] + cflat[coff[i]:coff[i + 1]]
        nu = np.linalg.norm(u)
        if nu == 0.0:
            continue
        block = mtm[mtmoff[i]:mtmoff[i + 1]].reshape(d, d)
        t = mat.T @ u
        h[np.ix_(sub, sub)] += (3.0 * alpha[i] * wgt) * (
            nu * block + np.outer(t, t) / nu)


# -- qol: alpha (1 + ||M z + c||^2 / g2) / tau ---------------------------------

def qol_value(off, idx, moff, mflat, coff, cflat, tidx, alpha, g2, row, z,
              out):
    bad = 0
    for i in range(len(row)):
        tau = z[tidx[i]]
        if tau <= 0.0:
            bad += 1
            continue
        d = off[i + 1] - off[i]
        mat = mflat[moff[i]:moff[i + 1]].reshape(2, d)
        u = mat @ z[idx[off[i]:off[i + 1]]] + cflat[coff[i]:coff[i + 1]]
        out[row[i]] += alpha[i] * (1.0 + (u @ u) / g2[i]) / tau
    return bad


def qol_grad(off, idx, moff, mflat, coff, cflat, tidx, alpha, g2, row, z, gc):
    for i in range(len(row)):
        tau = z[tidx[i]]
        d = off[i + 1] - off[i]
        sub = idx[off[i]:off[i + 1]]
        mat = mflat[moff[i]:moff[i + 1]].reshape(2, d)
        u = mat @ z[sub] + cflat[coff[i]:coff[i + 1]]
        gc[row[i], sub] += 2.0 * alpha[i] / (g2[i] * tau) * (mat.T @ u)
        gc[row[i], tidx[i]] += -alpha[i] * (1.0 + (u @ u) / g2[i]) / tau ** 2


def qol_hess(off, idx, moff, mflat, mtmoff, mtm, coff, cflat, tidx, alpha,
             g2, row, roww, z, h):
    for i in range(len(row)):
        wgt = roww[row[i]]
        if wgt == 0.0:
            continue
        tau = z[tidx[i]]
        d = off[i + 1] - off[i]
        sub = idx[off[i]:off[i + 1]]
        mat = mflat[moff[i]:moff[i + 1]].reshape(2, d)
        u = mat @ z[sub] + cflat[coff[i]:coff[i + 1]]
        block = mtm[mtmoff[i]:mtmoff[i + 1]].reshape(d, d)
        t = mat.T @ u
        ti = tidx[i]
        h[np.ix_(sub, sub)] += (2.0 * alpha[i] * wgt / (g2[i] * tau)) * block
        cross = -(2.0 * alpha[i] * wgt / (g2[i] * tau ** 2)) * t
        h[sub, ti] += cross
        h[ti, sub] += cross
        h[ti, ti] += 2.0 * alpha[i] * wgt * (1.0 + (u @ u) / g2[i]) / tau ** 3


# -- cube: alpha (w z + b)^3 on w z + b >= 0 -----------------------------------

def cube_value(off, idx, w, const, alpha, row, z, out):
    s = const + _seg_sums(off, w * z[idx])
    bad = int(np.sum(s < 0.0))
    s = np.where(s < 0.0, 0.0, s)
    np.add.at(out, row, alpha * s ** 3)
    return bad


def cube_grad(off, idx, w, const, alpha, row, z, gc):
    s = const + _seg_sums(off, w * z[idx])
    coef = 3.0 * alpha * s ** 2
    rows = np.repeat(row, np.diff(off))
    np.add.at(gc, (rows, idx), np.repeat(coef, np.diff(off)) * w)


def cube_hess(off, idx, w, const, alpha, row, roww, z, h):
    s = const + _seg_sums(off, w * z[idx])
    for i in range(len(row)):
        wgt = roww[row[i]]
        if wgt == 0.0:
            continue
        sub = idx[off[i]:off[i + 1]]
        wi = w[off[i]:off[i + 1]]
        h[np.ix_(sub, sub)] += (6.0 * alpha[i] * s[i] * wgt) * np.outer(wi, wi)


# -- neglog: -alpha log(w z + b), w z + b > 0 ----------------------------------

def neglog_value(off, idx, w, const, alpha, row, z, out):
    s = const + _seg_sums(off, w * z[idx])
    bad = int(np.sum(s <= 0.0))
    safe = np.where(s <= 0.0, 1.0, s)
    np.add.at(out, row, -alpha * np.log(safe))
    return bad


def neglog_grad(off, idx, w, const, alpha, row, z, gc):
    s = const + _seg_sums(off, w * z[idx])
    coef = -alpha / s
    rows = np.repeat(row, np.diff(off))
    np.add.at(gc, (rows, idx), np.repeat(coef, np.diff(off)) * w)


def neglog_hess(off, idx, w, const, alpha, row, roww, z, h):
    s = const + _seg_sums(off, w * z[idx])
    for i in range(len(row)):
        wgt = roww[row[i]]
        if wgt == 0.0:
            continue
        sub = idx[off[i]:off[i + 1]]
        wi = w[off[i]:off[i + 1]]
        h[np.ix_(sub, sub)] += (alpha[i] * wgt / s[i] ** 2) * np.outer(wi, wi)


# -- logsuminv: alpha log(a0 + sum c_j / (z_j + h_j)) --------------------------

def logsuminv_value(off, idx, cj, hj, a0, alpha, row, z, out):
    bad = 0
    for i in range(len(row)):
        x = z[idx[off[i]:off[i + 1]]] + hj[off[i]:off[i + 1]]
        if np.any(x <= 0.0):
            bad += 1
            continue
        s = a0[i] + np.sum(cj[off[i]:off[i + 1]] / x)
        out[row[i]] += alpha[i] * np.log(s)
    return bad


def logsuminv_grad(off, idx, cj, hj, a0, alpha, row, z, gc):
    for i in range(len(row)):
        sub = idx[off[i]:off[i + 1]]
        x = z[sub] + hj[off[i]:off[i + 1]]
        c = cj[off[i]:off[i + 1]]
        s = a0[i] + np.sum(c / x)
        gc[row[i], sub] += alpha[i] * (-c / x ** 2) / s


def logsuminv_hess(off, idx, cj, hj, a0, alpha, row, roww, z, h):
    for i in range(len(row)):
        wgt = roww[row[i]]
        if wgt == 0.0:
            continue
        sub = idx[off[i]:off[i + 1]]
        x = z[sub] + hj[off[i]:off[i + 1]]
        c = cj[off[i]:off[i + 1]]
        s = a0[i] + np.sum(c / x)
        d = -c / x ** 2
        block = (np.diag(2.0 * c / x ** 3 / s) - np.outer(d, d) / s ** 2)
        h[np.ix_(sub, sub)] += (alpha[i] * wgt) * block


# -- barrier rank-one terms ----------------------------------------------------

def rank1_hess(gc, w2, con_off, con_idx, h):
    for c in range(len(con_off) - 1):
        if w2[c] == 0.0:
            continue
        sub = con_idx[con_off[c]:con_off[c + 1]]
        g = gc[c, sub]
        h[np.ix_(sub, sub)] += w2[c] * np.outer(g, g)
