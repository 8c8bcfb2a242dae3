"""Independent brute-force constructions used only by the tests."""

import numpy as np
from scipy.linalg import expm

from stellarank.fock_algebra import build_ladder, gaussian_unitary_oracle


def quadratures(dim):
    a, ad = build_ladder(dim)
    x = (a + ad) / np.sqrt(2)
    p = (a - ad) / (np.sqrt(2) * 1j)
    return x, p


def expm_displacement(alpha, dim):
    a, ad = build_ladder(dim)
    return expm(alpha * ad - np.conj(alpha) * a)


def bare_witness(family, dim):
    """Unconjugated witness operator built from truncated quadratures or exponentials."""
    a, ad = build_ladder(dim)
    n = ad @ a
    eye = np.eye(dim)
    if family.kind == "cubic":
        x, p = quadratures(dim)
        return x + p @ p
    if family.kind == "gkp":
        x, p = quadratures(dim)
        cx = expm(2j * family.fx * x)
        cp = expm(2j * family.fp * p)
        return 2 * eye - 0.5 * (cx + cx.conj().T) - 0.5 * (cp + cp.conj().T)
    if family.kind == "cat":
        al = family.alpha
        left = ad @ ad - np.conj(al) ** 2 * eye
        right = a @ a - al**2 * eye
        parity = np.diag((-1.0) ** np.arange(dim))
        return left @ right + eye - family.parity_sign * parity
    return (n - family.k * eye) @ (n - family.k * eye)


def conjugate(op, params, dim, theta=0.0):
    g = gaussian_unitary_oracle(params, theta, dim)
    return g.conj().T @ op @ g


def oracle_conjugated(family, params, dim):
    return conjugate(bare_witness(family, dim), params, dim)


def oracle_block(family, params, dim, block, theta=0.0):
    """Leading ``block x block`` corner of ``G^dag W G`` via the column oracle."""
    cols = gaussian_unitary_oracle(params, theta, dim, columns=block)
    return cols.conj().T @ bare_witness(family, dim) @ cols
