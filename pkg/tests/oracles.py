"""Independent reference computations for the tests.

Nothing here imports from ``twophoton``.  States are plain length-4 lists
of complex numbers in (VV, VH, HV, HH) order; operators are nested lists.
"""
import cmath
import math


def kron2(m, n):
    """Dense 4x4 Kronecker product, written out element by element."""
    out = [[0j] * 4 for _ in range(4)]
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    out[2 * i + k][2 * j + l] = m[i][j] * n[k][l]
    return out


def matvec(m, v):
    return [sum(m[r][c] * v[c] for c in range(len(v))) for r in range(len(m))]


IDENTITY = [[1, 0], [0, 1]]


def apply_on_arm(m, arm, v):
    big = kron2(m, IDENTITY) if arm == "A" else kron2(IDENTITY, m)
    return matvec(big, v)


def born_table(v, a0, a1, b0, b1):
    """p[i][j] = |<a_i b_j|v>|^2 by explicit summation over components."""
    avecs, bvecs = (a0, a1), (b0, b1)
    table = [[0.0, 0.0], [0.0, 0.0]]
    for i in range(2):
        for j in range(2):
            amp = 0j
            for x in range(2):
                for y in range(2):
                    amp += avecs[i][x].conjugate() * bvecs[j][y].conjugate() * v[2 * x + y]
            table[i][j] = abs(amp) ** 2
    return table


def coordinates(v, a0, a1, b0, b1):
    """Amplitudes of v in the product basis {a_i b_j}, row-major."""
    out = []
    for av in (a0, a1):
        for bv in (b0, b1):
            out.append(sum(av[x].conjugate() * bv[y].conjugate() * v[2 * x + y]
                           for x in range(2) for y in range(2)))
    return out


def concurrence_det(v):
    """Pure-state concurrence 2|ad - bc|."""
    return 2 * abs(v[0] * v[3] - v[1] * v[2])


def singlet_correlation(theta_a, theta_b):
    return -math.cos(2 * (theta_a - theta_b))


def binomial_sigma(p, n):
    return math.sqrt(p * (1 - p) / n)


def phase_of(z):
    return cmath.phase(z)
