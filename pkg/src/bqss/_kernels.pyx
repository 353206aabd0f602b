# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_kernels_py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport cos, sin, sqrt
from numpy.random cimport bitgen_t

cnp.import_array()

cdef const char *_CAPSULE_NAME = "BitGenerator"


def count_outcomes(rng, double[::1] cdf, Py_ssize_t n):
    cdef bitgen_t *bg
    cdef Py_ssize_t i
    cdef double u, e0, e1, e2
    cdef cnp.int64_t c[4]
    bit_gen = rng.bit_generator
    capsule = bit_gen.capsule
    if not PyCapsule_IsValid(capsule, _CAPSULE_NAME):
        raise ValueError("invalid bit generator capsule")
    bg = <bitgen_t *> PyCapsule_GetPointer(capsule, _CAPSULE_NAME)
    e0 = cdf[0]
    e1 = cdf[1]
    e2 = cdf[2]
    c[0] = c[1] = c[2] = c[3] = 0
    with bit_gen.lock, nogil:
        for i in range(n):
            u = bg.next_double(bg.state)
            # branchless: outcomes are random, so a compare chain mispredicts
            c[(u >= e0) + (u >= e1) + (u >= e2)] += 1
    return np.array([c[0], c[1], c[2], c[3]], dtype=np.int64)


cdef inline double _tangle_sq(double complex c1, double complex c2, double complex c3,
                              double complex c4, double complex p1, double complex p2,
                              double complex p3, double complex p4) nogil:
    cdef double h = 0.7071067811865476
    cdef double complex a1 = p1 * c1
    cdef double complex a2 = p2 * (c2 + c3) * h
    cdef double complex a3 = p3 * (c2 - c3) * h
    cdef double complex a4 = p4 * c4
    cdef double complex r = a1 * a4 - 0.5 * (a2 * a2 - a3 * a3)
    return r.real * r.real + r.imag * r.imag


cdef inline double complex _expi(double g) nogil:
    return cos(g) + 1j * sin(g)


def unmixed_tangles(const double complex[:, ::1] states, const double[::1] gamma):
    cdef Py_ssize_t b, nb = states.shape[0]
    cdef double complex p1 = _expi(gamma[0]), p2 = _expi(gamma[1])
    cdef double complex p3 = _expi(gamma[2]), p4 = _expi(gamma[3])
    out = np.empty(nb, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for b in range(nb):
            o[b] = sqrt(_tangle_sq(states[b, 0], states[b, 1], states[b, 2], states[b, 3],
                                   p1, p2, p3, p4))
    return out


def unmix_cost(const double complex[:, ::1] states, const double[::1] gamma):
    cdef Py_ssize_t b, nb = states.shape[0]
    cdef double acc = 0.0
    cdef double complex p1 = _expi(gamma[0]), p2 = _expi(gamma[1])
    cdef double complex p3 = _expi(gamma[2]), p4 = _expi(gamma[3])
    with nogil:
        for b in range(nb):
            acc += _tangle_sq(states[b, 0], states[b, 1], states[b, 2], states[b, 3],
                              p1, p2, p3, p4)
    return acc / nb
