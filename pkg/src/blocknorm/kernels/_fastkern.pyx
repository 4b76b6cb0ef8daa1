# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Fused C loops for the dense block-value kernel at arity 2 and 3.

Semantics mirror blocknorm.kernels.reference exactly: the innermost index is
gated by the block-membership mask, the outer levels reduce over their full
ranges, and a sup level over a fully masked (empty) fiber contributes 0.
Fusing the contraction, the codomain norm and the reductions avoids the
per-call array allocations that dominate at desk-scale dimensions.
"""

from libc.math cimport fabs, pow

import numpy as np

STRONG = 0
SUP = 1

cdef enum:
    KIND_SUP = 1


cdef inline double _close(int kind, double acc, double q) noexcept nogil:
    if kind == KIND_SUP:
        return acc
    return pow(acc, 1.0 / q)


def block_value_2(const double[:, :, ::1] tensor, const double[:, ::1] s1, const double[:, ::1] s2,
                  const unsigned char[:, ::1] mask, int kind1, double q1,
                  int kind2, double q2, double f_p, bint f_inf):
    cdef Py_ssize_t k1 = s1.shape[0], k2 = s2.shape[0]
    cdef Py_ssize_t m1 = tensor.shape[0], m2 = tensor.shape[1], mf = tensor.shape[2]
    if k1 == 0 or k2 == 0:
        return 0.0
    cdef double[:, ::1] part = np.empty((m2, mf))
    cdef Py_ssize_t j1, j2, i1, i2, f
    cdef double outer = 0.0
    cdef double inner, w, vf, nrm, acc
    for j1 in range(k1):
        for i2 in range(m2):
            for f in range(mf):
                part[i2, f] = 0.0
        for i1 in range(m1):
            w = s1[j1, i1]
            if w == 0.0:
                continue
            for i2 in range(m2):
                for f in range(mf):
                    part[i2, f] += w * tensor[i1, i2, f]
        inner = 0.0
        for j2 in range(k2):
            if not mask[j1, j2]:
                continue
            if f_inf:
                nrm = 0.0
                for f in range(mf):
                    vf = 0.0
                    for i2 in range(m2):
                        vf += s2[j2, i2] * part[i2, f]
                    if fabs(vf) > nrm:
                        nrm = fabs(vf)
            else:
                acc = 0.0
                for f in range(mf):
                    vf = 0.0
                    for i2 in range(m2):
                        vf += s2[j2, i2] * part[i2, f]
                    acc += pow(fabs(vf), f_p)
                nrm = pow(acc, 1.0 / f_p)
            if kind2 == KIND_SUP:
                if nrm > inner:
                    inner = nrm
            else:
                inner += pow(nrm, q2)
        inner = _close(kind2, inner, q2)
        if kind1 == KIND_SUP:
            if inner > outer:
                outer = inner
        else:
            outer += pow(inner, q1)
    return _close(kind1, outer, q1)


def block_value_3(const double[:, :, :, ::1] tensor, const double[:, ::1] s1,
                  const double[:, ::1] s2, const double[:, ::1] s3,
                  const unsigned char[:, :, ::1] mask, int kind1, double q1,
                  int kind2, double q2, int kind3, double q3,
                  double f_p, bint f_inf):
    cdef Py_ssize_t k1 = s1.shape[0], k2 = s2.shape[0], k3 = s3.shape[0]
    cdef Py_ssize_t m1 = tensor.shape[0], m2 = tensor.shape[1]
    cdef Py_ssize_t m3 = tensor.shape[2], mf = tensor.shape[3]
    if k1 == 0 or k2 == 0 or k3 == 0:
        return 0.0
    cdef double[:, :, ::1] part1 = np.empty((m2, m3, mf))
    cdef double[:, ::1] part2 = np.empty((m3, mf))
    cdef Py_ssize_t j1, j2, j3, i1, i2, i3, f
    cdef double lvl1 = 0.0
    cdef double lvl2, lvl3, w, vf, nrm, acc
    for j1 in range(k1):
        for i2 in range(m2):
            for i3 in range(m3):
                for f in range(mf):
                    part1[i2, i3, f] = 0.0
        for i1 in range(m1):
            w = s1[j1, i1]
            if w == 0.0:
                continue
            for i2 in range(m2):
                for i3 in range(m3):
                    for f in range(mf):
                        part1[i2, i3, f] += w * tensor[i1, i2, i3, f]
        lvl2 = 0.0
        for j2 in range(k2):
            for i3 in range(m3):
                for f in range(mf):
                    part2[i3, f] = 0.0
            for i2 in range(m2):
                w = s2[j2, i2]
                if w == 0.0:
                    continue
                for i3 in range(m3):
                    for f in range(mf):
                        part2[i3, f] += w * part1[i2, i3, f]
            lvl3 = 0.0
            for j3 in range(k3):
                if not mask[j1, j2, j3]:
                    continue
                if f_inf:
                    nrm = 0.0
                    for f in range(mf):
                        vf = 0.0
                        for i3 in range(m3):
                            vf += s3[j3, i3] * part2[i3, f]
                        if fabs(vf) > nrm:
                            nrm = fabs(vf)
                else:
                    acc = 0.0
                    for f in range(mf):
                        vf = 0.0
                        for i3 in range(m3):
                            vf += s3[j3, i3] * part2[i3, f]
                        acc += pow(fabs(vf), f_p)
                    nrm = pow(acc, 1.0 / f_p)
                if kind3 == KIND_SUP:
                    if nrm > lvl3:
                        lvl3 = nrm
                else:
                    lvl3 += pow(nrm, q3)
            lvl3 = _close(kind3, lvl3, q3)
            if kind2 == KIND_SUP:
                if lvl3 > lvl2:
                    lvl2 = lvl3
            else:
                lvl2 += pow(lvl3, q2)
        lvl2 = _close(kind2, lvl2, q2)
        if kind1 == KIND_SUP:
            if lvl2 > lvl1:
                lvl1 = lvl2
        else:
            lvl1 += pow(lvl2, q1)
    return _close(kind1, lvl1, q1)
