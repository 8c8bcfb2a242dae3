"""Normal-ordered quadratic forms in the ladder operators and their squares.

A quadratic form is stored by its six coefficients::

    Q = A n + B a^2 + C ad^2 + D a + E ad + F

Fields may be scalars or equally shaped numpy arrays; in the latter case
every function here works elementwise and the realized matrices carry the
batch shape in front of the two matrix axes.
"""

from dataclasses import dataclass, fields

import numpy as np

from .errors import ContractViolation
from .fock_algebra import CONJUGATE_PAIRS, MONOMIAL_TAGS, SELF_ADJOINT_TAGS, build_monomials

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class GaussianParams:
    """Gaussian unitary ``F(vartheta) D(z) S(r)`` with the right phase dropped."""

    vartheta: float = 0.0
    z: complex = 0j
    r: float = 0.0

    @property
    def mu(self):
        return np.cosh(self.r)

    @property
    def nu(self):
        return np.sinh(self.r)

    @property
    def g(self):
        return np.exp(1j * np.asarray(self.vartheta))

    def as_tuple(self):
        return (float(self.vartheta), complex(self.z), float(self.r))


@dataclass(frozen=True)
class QuadraticForm:
    A: complex = 0.0
    B: complex = 0.0
    C: complex = 0.0
    D: complex = 0.0
    E: complex = 0.0
    F: complex = 0.0

    def shifted(self, constant):
        """Same form with ``constant`` added to ``F``."""
        return QuadraticForm(self.A, self.B, self.C, self.D, self.E, self.F + constant)

    def scaled(self, s):
        return QuadraticForm(*(s * getattr(self, f.name) for f in fields(self)))

    def is_hermitian(self, tol=HERMITIAN_TOL):
        def close(x, y):
            x, y = np.asarray(x), np.asarray(y)
            return np.all(np.abs(x - y) <= tol * (1.0 + np.abs(x) + np.abs(y)))

        return bool(
            close(np.imag(self.A), 0)
            and close(np.imag(self.F), 0)
            and close(self.C, np.conj(self.B))
            and close(self.E, np.conj(self.D))
        )


@dataclass(frozen=True)
class QuarticCoefficients:
    """Coefficients of a squared quadratic form, keyed by monomial tag."""

    terms: dict

    def __getitem__(self, tag):
        return self.terms[tag]

    def is_conjugate_paired(self, tol=HERMITIAN_TOL):
        t = self.terms
        scale = 1.0 + sum(np.abs(np.asarray(v)) for v in t.values())
        for tag in SELF_ADJOINT_TAGS:
            if np.any(np.abs(np.imag(t[tag])) > tol * scale):
                return False
        for x, y in CONJUGATE_PAIRS:
            if np.any(np.abs(np.asarray(t[x]) - np.conj(t[y])) > tol * scale):
                return False
        return True


def square_quadratic(form):
    """Normal-ordered coefficients of ``Q^2`` for a quadratic form ``Q``."""
    A, B, C, D, E, F = (np.asarray(getattr(form, f.name), dtype=complex) for f in fields(form))
    terms = {
        "1": F * F + D * E + 2 * B * C,
        "n": 2 * (A * F + D * E + B * C),
        "n2": A * A + 2 * B * C,
        "a": A * D + 2 * (B * E + D * F),
        "a2": D * D + 2 * B * (A + F),
        "a3": 2 * B * D,
        "a4": B * B,
        "ad": A * E + 2 * (D * C + E * F),
        "ad2": E * E + 2 * C * (A + F),
        "ad3": 2 * C * E,
        "ad4": C * C,
        "na": 2 * (A * D + B * E),
        "na2": 2 * A * B,
        "adn": 2 * (A * E + C * D),
        "ad2n": 2 * A * C,
    }
    return QuarticCoefficients(terms)


_MONOMIAL_CACHE = {}


def _monomial_stack(dim):
    stack = _MONOMIAL_CACHE.get(dim)
    if stack is None:
        mono = build_monomials(dim)
        stack = np.stack([mono[t] for t in MONOMIAL_TAGS])
        _MONOMIAL_CACHE[dim] = stack
    return stack


def realize_terms(coeffs, dim):
    """Sum of coefficient * monomial matrix over all tags (batched)."""
    stack = _monomial_stack(dim)
    c = np.stack(np.broadcast_arrays(*(np.asarray(coeffs.get(t, 0.0), dtype=complex) for t in MONOMIAL_TAGS)), axis=-1)
    out = np.einsum("...k,kij->...ij", c, stack)
    return 0.5 * (out + np.conj(np.swapaxes(out, -1, -2)))


def realize_quadratic(form, dim):
    """Matrix of ``A n + B a^2 + C ad^2 + D a + E ad + F`` at truncation ``dim``."""
    if not form.is_hermitian():
        raise ContractViolation("quadratic form is not Hermitian (need A, F real, C = conj B, E = conj D)")
    coeffs = {"n": form.A, "a2": form.B, "ad2": form.C, "a": form.D, "ad": form.E, "1": form.F}
    return realize_terms(coeffs, dim)


def realize_quartic(coeffs, dim):
    """Matrix of a squared form given its coefficients from :func:`square_quadratic`."""
    if not coeffs.is_conjugate_paired():
        raise ContractViolation("quartic coefficients are not conjugate paired")
    return realize_terms(coeffs.terms, dim)
