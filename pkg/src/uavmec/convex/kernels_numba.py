"""Numba-compiled atom evaluation kernels (default backend).

Loop-oriented twins of kernels_numpy with identical signatures and
accumulation order; compiled nopython with the GIL released so parallel
sweep cells can overlap.
"""

import math

import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True, fastmath=False)


@njit(**_JIT)
def affine_value(off, idx, w, const, row, z, out):
    for i in range(len(row)):
        s = const[i]
        for j in range(off[i], off[i + 1]):
            s += w[j] * z[idx[j]]
        out[row[i]] += s
    return 0


@njit(**_JIT)
def affine_grad(off, idx, w, row, z, gc):
    for i in range(len(row)):
        r = row[i]
        for j in range(off[i], off[i + 1]):
            gc[r, idx[j]] += w[j]


@njit(**_JIT)
def quad_value(off, idx, moff, mflat, coff, cflat, mrows, alpha, row, z, out):
    for i in range(len(row)):
        d = off[i + 1] - off[i]
        m = mrows[i]
        acc = 0.0
        for r in range(m):
            u = cflat[coff[i] + r]
            base = moff[i] + r * d
            for j in range(d):
                u += mflat[base + j] * z[idx[off[i] + j]]
            acc += u * u
        out[row[i]] += alpha[i] * acc
    return 0


@njit(**_JIT)
def quad_grad(off, idx, moff, mflat, coff, cflat, mrows, alpha, row, z, gc):
    for i in range(len(row)):
        d = off[i + 1] - off[i]
        m = mrows[i]
        ri = row[i]
        for r in range(m):
            u = cflat[coff[i] + r]
            base = moff[i] + r * d
            for j in range(d):
                u += mflat[base + j] * z[idx[off[i] + j]]
            coef = 2.0 * alpha[i] * u
            for j in range(d):
                gc[ri, idx[off[i] + j]] += coef * mflat[base + j]


@njit(**_JIT)
def quad_hess(off, idx, mtmoff, mtm, alpha, row, roww, h):
    for i in range(len(row)):
        wgt = roww[row[i]]
        if wgt == 0.0:
            continue
        d = off[i + 1] - off[i]
        coef = 2.0 * alpha[i] * wgt
        base = mtmoff[i]
        for a in range(d):
            ia = idx[off[i] + a]
            for b in range(d):
                h[ia, idx[off[i] + b]] += coef * mtm[base + a * d + b]


@njit(**_JIT)
def normcube_value(off, idx, moff, mflat, coff, cflat, mrows, alpha, row, z,
                   out):
    for i in range(len(row)):
        d = off[i + 1] - off[i]
        u0 = cflat[coff[i]]
        u1 = cflat[coff[i] + 1]
        for j in range(d):
            u0 += mflat[moff[i] + j] * z[idx[off[i] + j]]
            u1 += mflat[moff[i] + d + j] * z[idx[off[i] + j]]
        nu = math.sqrt(u0 * u0 + u1 * u1)
        out[row[i]] += alpha[i] * nu * nu * nu
    return 0


@njit(**_JIT)
def normcube_grad(off, idx, moff, mflat, coff, cflat, mrows, alpha, row, z,
                  gc):
    for i in range(len(row)):
        d = off[i + 1] - off[i]
        ri = row[i]
        u0 = cflat[coff[i]]
        u1 = cflat[coff[i] + 1]
        for j in range(d):
            u0 += mflat[moff[i] + j] * z[idx[off[i] + j]]
            u1 += mflat[moff[i] + d + j] * z[idx[off[i] + j]]
        nu = math.sqrt(u0 * u0 + u1 * u1)
        coef = 3.0 * alpha[i] * nu
        for j in range(d):
            t = mflat[moff[i] + j] * u0 + mflat[moff[i] + d + j] * u1
            gc[ri, idx[off[i] + j]] += coef * t


@njit(**_JIT)
def normcube_hess(off, idx, moff, mflat, mtmoff, mtm, coff, cflat, alpha,
                  row, roww, z, h):
    for i in range(len(row)):
        wgt = roww[row[i]]
        if wgt == 0.0:
            continue
        d = off[i + 1] - off[i]
        u0 = cflat[coff[i]]
        u1 = cflat[coff[i] + 1]
        for j in range(d):
            u0 += mflat[moff[i] + j] * z[idx[off[i] + j]]
            u1 += mflat[moff[i] + d + j] * z[idx[off[i] + j]]
        nu = math.sqrt(u0 * u0 + u1 * u1)
        if nu == 0.0:
            continue
        t = np.empty(d)
        for j in range(d):
            t[j] = mflat[moff[i] + j] * u0 + mflat[moff[i] + d + j] * u1
        c1 = 3.0 * alpha[i] * wgt * nu
        c2 = 3.0 * alpha[i] * wgt / nu
        base = mtmoff[i]
        for a in range(d):
            ia = idx[off[i] + a]
            for b in range(d):
                h[ia, idx[off[i] + b]] += (c1 * mtm[base + a * d + b]
                                           + c2 * t[a] * t[b])


@njit(**_JIT)
def qol_value(off, idx, moff, mflat, coff, cflat, tidx, alpha, g2, row, z,
              out):
    bad = 0
    for i in range(len(row)):
        tau = z[tidx[i]]
        if tau <= 0.0:
            bad += 1
            continue
        d = off[i + 1] - off[i]
        u0 = cflat[coff[i]]
        u1 = cflat[coff[i] + 1]
        for j in range(d):
            u0 += mflat[moff[i] + j] * z[idx[off[i] + j]]
            u1 += mflat[moff[i] + d + j] * z[idx[off[i] + j]]
        out[row[i]] += alpha[i] * (1.0 + (u0 * u0 + u1 * u1) / g2[i]) / tau
    return bad


@njit(**_JIT)
def qol_grad(off, idx, moff, mflat, coff, cflat, tidx, alpha, g2, row, z, gc):
    for i in range(len(row)):
        tau = z[tidx[i]]
        d = off[i + 1] - off[i]
        ri = row[i]
        u0 = cflat[coff[i]]
        u1 = cflat[coff[i] + 1]
        for j in range(d):
            u0 += mflat[moff[i] + j] * z[idx[off[i] + j]]
            u1 += mflat[moff[i] + d + j] * z[idx[off[i] + j]]
        coef = 2.0 * alpha[i] / (g2[i] * tau)
        for j in range(d):
            t = mflat[moff[i] + j] * u0 + mflat[moff[i] + d + j] * u1
            gc[ri, idx[off[i] + j]] += coef * t
        gc[ri, tidx[i]] += -alpha[i] * (1.0 + (u0 * u0 + u1 * u1) / g2[i]) \
            / (tau * tau)


@njit(**_JIT)
def qol_hess(off, idx, moff, mflat, mtmoff, mtm, coff, cflat, tidx, alpha,
             g2, row, roww, z, h):
    for i in range(len(row)):
        wgt = roww[row[i]]
        if wgt == 0.0:
            continue
        tau = z[tidx[i]]
        d = off[i + 1] - off[i]
        ti = tidx[i]
        u0 = cflat[coff[i]]
        u1 = cflat[coff[i] + 1]
        for j in range(d):
            u0 += mflat[moff[i] + j] * z[idx[off[i] + j]]
            u1 += mflat[moff[i] + d + j] * z[idx[off[i] + j]]
        usq = u0 * u0 + u1 * u1
        t = np.empty(d)
        for j in range(d):
            t[j] = mflat[moff[i] + j] * u0 + mflat[moff[i] + d + j] * u1
        czz = 2.0 * alpha[i] * wgt / (g2[i] * tau)
        base = mtmoff[i]
        for a in range(d):
            ia = idx[off[i] + a]
            for b in range(d):
                h[ia, idx[off[i] + b]] += czz * mtm[base + a * d + b]
        ct = -2.0 * alpha[i] * wgt / (g2[i] * tau * tau)
        for a in range(d):
            ia = idx[off[i] + a]
            h[ia, ti] += ct * t[a]
            h[ti, ia] += ct * t[a]
        h[ti, ti] += 2.0 * alpha[i] * wgt * (1.0 + usq / g2[i]) \
            / (tau * tau * tau)


@njit(**_JIT)
def cube_value(off, idx, w, const, alpha, row, z, out):
    bad = 0
    for i in range(len(row)):
        s = const[i]
        for j in range(off[i], off[i + 1]):
            s += w[j] * z[idx[j]]
        if s < 0.0:
            bad += 1
            continue
        out[row[i]] += alpha[i] * s * s * s
    return bad


@njit(**_JIT)
def cube_grad(off, idx, w, const, alpha, row, z, gc):
    for i in range(len(row)):
        s = const[i]
        for j in range(off[i], off[i + 1]):
            s += w[j] * z[idx[j]]
        coef = 3.0 * alpha[i] * s * s
        ri = row[i]
        for j in range(off[i], off[i + 1]):
            gc[ri, idx[j]] += coef * w[j]


@njit(**_JIT)
def cube_hess(off, idx, w, const, alpha, row, roww, z, h):
    for i in range(len(row)):
        wgt = roww[row[i]]
        if wgt == 0.0:
            continue
        s = const[i]
        for j in range(off[i], off[i + 1]):
            s += w[j] * z[idx[j]]
        coef = 6.0 * alpha[i] * s * wgt
        for a in range(off[i], off[i + 1]):
            ia = idx[a]
            for b in range(off[i], off[i + 1]):
                h[ia, idx[b]] += coef * w[a] * w[b]


@njit(**_JIT)
def neglog_value(off, idx, w, const, alpha, row, z, out):
    bad = 0
    for i in range(len(row)):
        s = const[i]
        for j in range(off[i], off[i + 1]):
            s += w[j] * z[idx[j]]
        if s <= 0.0:
            bad += 1
            continue
        out[row[i]] += -alpha[i] * math.log(s)
    return bad


@njit(**_JIT)
def neglog_grad(off, idx, w, const, alpha, row, z, gc):
    for i in range(len(row)):
        s = const[i]
        for j in range(off[i], off[i + 1]):
            s += w[j] * z[idx[j]]
        coef = -alpha[i] / s
        ri = row[i]
        for j in range(off[i], off[i + 1]):
            gc[ri, idx[j]] += coef * w[j]


@njit(**_JIT)
def neglog_hess(off, idx, w, const, alpha, row, roww, z, h):
    for i in range(len(row)):
        wgt = roww[row[i]]
        if wgt == 0.0:
            continue
        s = const[i]
        for j in range(off[i], off[i + 1]):
            s += w[j] * z[idx[j]]
        coef = alpha[i] * wgt / (s * s)
        for a in range(off[i], off[i + 1]):
            ia = idx[a]
            for b in range(off[i], off[i + 1]):
                h[ia, idx[b]] += coef * w[a] * w[b]


@njit(**_JIT)
def logsuminv_value(off, idx, cj, hj, a0, alpha, row, z, out):
    bad = 0
    for i in range(len(row)):
        s = a0[i]
        ok = True
        for j in range(off[i], off[i + 1]):
            x = z[idx[j]] + hj[j]
            if x <= 0.0:
                ok = False
                break
            s += cj[j] / x
        if not ok:
            bad += 1
            continue
        out[row[i]] += alpha[i] * math.log(s)
    return bad


@njit(**_JIT)
def logsuminv_grad(off, idx, cj, hj, a0, alpha, row, z, gc):
    for i in range(len(row)):
        s = a0[i]
        for j in range(off[i], off[i + 1]):
            s += cj[j] / (z[idx[j]] + hj[j])
        ri = row[i]
        for j in range(off[i], off[i + 1]):
            x = z[idx[j]] + hj[j]
            gc[ri, idx[j]] += alpha[i] * (-cj[j] / (x * x)) / s


@njit(**_JIT)
def logsuminv_hess(off, idx, cj, hj, a0, alpha, row, roww, z, h):
    for i in range(len(row)):
        wgt = roww[row[i]]
        if wgt == 0.0:
            continue
        d = off[i + 1] - off[i]
        s = a0[i]
        for j in range(off[i], off[i + 1]):
            s += cj[j] / (z[idx[j]] + hj[j])
        dvec = np.empty(d)
        for j in range(d):
            x = z[idx[off[i] + j]] + hj[off[i] + j]
            dvec[j] = -cj[off[i] + j] / (x * x)
        for a in range(d):
            ia = idx[off[i] + a]
            xa = z[ia] + hj[off[i] + a]
            h[ia, ia] += alpha[i] * wgt * 2.0 * cj[off[i] + a] / (xa ** 3 * s)
            for b in range(d):
                h[ia, idx[off[i] + b]] += -alpha[i] * wgt * dvec[a] * dvec[b] \
                    / (s * s)


@njit(**_JIT)
def rank1_hess(gc, w2, con_off, con_idx, h):
    for c in range(len(con_off) - 1):
        wgt = w2[c]
        if wgt == 0.0:
            continue
        for a in range(con_off[c], con_off[c + 1]):
            ia = con_idx[a]
            ga = gc[c, ia]
            if ga == 0.0:
                continue
            for b in range(con_off[c], con_off[c + 1]):
                h[ia, con_idx[b]] += wgt * ga * gc[c, con_idx[b]]
