"""Witness operator families and their Gaussian-conjugated matrices.

Four families are supported:

* ``cubic``: variance witness of ``Q = x + p^2`` (``sqrt(2) x = a + ad``);
* ``gkp``: ``2 - [cos(2 fx x) + cos(2 fp p)]`` written with displacements;
* ``cat``: ``(ad^2 - conj(alpha)^2)(a^2 - alpha^2) + (1 -/+ Parity)``;
* ``fock``: ``(n - k)^2``.

For a Gaussian unitary ``G = F(vartheta) D(z) S(r)`` the conjugated
operator ``G^dag Q G`` is assembled from closed-form coefficients, never by
conjugating truncated matrices, so its leading Fock block is exact at any
truncation that contains it.  All ``GaussianParams`` fields may be arrays
of a common shape; the returned matrices then have that batch shape.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .fock_algebra import displacement_matrix, parity_matrix
from .gaussian_transform import (
    GaussianParams,
    QuadraticForm,
    realize_terms,
    realize_quartic,
    square_quadratic,
)

KINDS = ("cubic", "gkp", "cat", "fock")


@dataclass(frozen=True)
class WitnessFamily:
    kind: str
    kappa: float = None
    fx: float = None
    fp: float = None
    alpha: complex = None
    parity_sign: int = None
    k: int = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ContractViolation(f"unknown witness family {self.kind!r}")
        if self.kind == "cubic" and self.kappa != 1:
            raise ContractViolation("cubic family is implemented at kappa = 1 only")
        if self.kind == "cat" and self.parity_sign not in (1, -1):
            raise ContractViolation("cat family needs parity_sign +1 (even) or -1 (odd)")
        if self.kind == "fock" and (self.k is None or int(self.k) != self.k or self.k < 0):
            raise ContractViolation("fock family needs a non-negative integer k")

    @classmethod
    def cubic(cls, kappa=1.0):
        return cls("cubic", kappa=kappa)

    @classmethod
    def gkp(cls, fx=np.sqrt(np.pi) / 2, fp=np.sqrt(np.pi)):
        return cls("gkp", fx=float(fx), fp=float(fp))

    @classmethod
    def cat(cls, alpha=2.0, parity_sign=1):
        return cls("cat", alpha=complex(alpha), parity_sign=int(parity_sign))

    @classmethod
    def fock(cls, k):
        return cls("fock", k=int(k))

    @property
    def is_variance(self):
        return self.kind == "cubic"

    @property
    def witness_kind(self):
        return "variance" if self.is_variance else "expectation"

    @property
    def real_in_fock_basis(self):
        """True when the bare witness has a real matrix in the Fock basis.

        Complex conjugation then maps ``(vartheta, z, r)`` to
        ``(-vartheta, conj(z), r)`` without changing any projected spectrum.
        """
        return self.kind != "cat" or self.alpha.imag == 0

    @property
    def n_params(self):
        """Number of Gaussian parameters optimized (the phase is dropped for Fock)."""
        return 3 if self.kind == "fock" else 4

    @property
    def label(self):
        if self.kind == "cubic":
            return f"cubic(kappa={self.kappa:g})"
        if self.kind == "gkp":
            return f"gkp(fx={self.fx:.6g},fp={self.fp:.6g})"
        if self.kind == "cat":
            tau = "+" if self.parity_sign > 0 else "-"
            return f"cat(alpha={self.alpha.real:g}{self.alpha.imag:+g}j,tau{tau})"
        return f"fock(k={self.k})"

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind == "cubic":
            d["kappa"] = self.kappa
        elif self.kind == "gkp":
            d.update(fx=self.fx, fp=self.fp)
        elif self.kind == "cat":
            d.update(alpha=[self.alpha.real, self.alpha.imag], parity_sign=self.parity_sign)
        else:
            d["k"] = self.k
        return d

    @classmethod
    def from_dict(cls, d):
        kind = d["kind"]
        if kind == "cubic":
            return cls.cubic(d.get("kappa", 1.0))
        if kind == "gkp":
            return cls.gkp(d["fx"], d["fp"])
        if kind == "cat":
            re, im = d["alpha"]
            return cls.cat(complex(re, im), d["parity_sign"])
        return cls.fock(d["k"])


def _unpack(params):
    g = np.exp(1j * np.asarray(params.vartheta, dtype=float))
    z = np.asarray(params.z, dtype=complex)
    r = np.asarray(params.r, dtype=float)
    return g, z, np.cosh(r), np.sinh(r)


def cubic_conjugated_form(params):
    """Coefficients of ``G^dag (x + p^2) G``."""
    g, z, mu, nu = _unpack(params)
    gc, zc = np.conj(g), np.conj(z)
    g2, gc2 = g * g, gc * gc
    s2 = np.sqrt(2.0)
    A = (g2 + gc2) * mu * nu + mu**2 + nu**2
    B = -0.5 * (g2 * mu**2 + gc2 * nu**2) - mu * nu
    C = -0.5 * (g2 * nu**2 + gc2 * mu**2) - mu * nu
    D = gc2 * nu * zc - g2 * mu * z + mu * zc - nu * z + (g * mu - gc * nu) / s2
    E = g2 * nu * z - gc2 * mu * zc + mu * z - nu * zc + (gc * mu - g * nu) / s2
    F = (
        0.5 * ((g2 + gc2) * mu * nu + mu**2 + nu**2 - (g2 * z**2 + gc2 * zc**2))
        + (g * z + gc * zc) / s2
        + np.abs(z) ** 2
    )
    return QuadraticForm(A.real, B, C, D, E, F.real)


def number_conjugated_form(params):
    """Coefficients of ``G^dag n G``; the outer phase drops out."""
    _, z, mu, nu = _unpack(params)
    zc = np.conj(z)
    A = mu**2 + nu**2
    B = -mu * nu + 0j
    return QuadraticForm(A, B, B, mu * zc - nu * z, mu * z - nu * zc, nu**2 + np.abs(z) ** 2)


def cat_quadratic_form(params, alpha):
    """Coefficients of ``G^dag (n + conj(alpha)^2 a^2 + alpha^2 ad^2) G``."""
    g, z, mu, nu = _unpack(params)
    gc, zc = np.conj(g), np.conj(z)
    g2, gc2 = g * g, gc * gc
    u = g2 * np.conj(alpha) ** 2
    uc = gc2 * alpha**2
    A = mu**2 + nu**2 - 2 * mu * nu * (u + uc)
    B = -mu * nu + mu**2 * u + nu**2 * uc
    C = -mu * nu + nu**2 * u + mu**2 * uc
    D = -nu * z + mu * zc + 2 * mu * z * u - 2 * nu * zc * uc
    E = -nu * zc + mu * z - 2 * nu * z * u + 2 * mu * zc * uc
    F = nu**2 + np.abs(z) ** 2 - mu * nu * (u + uc) + z**2 * u + zc**2 * uc
    return QuadraticForm(A.real, B, C, D, E, F.real)


def _quadratic_terms(form, scale=1.0):
    return {"n": scale * form.A, "a2": scale * form.B, "ad2": scale * form.C,
            "a": scale * form.D, "ad": scale * form.E, "1": scale * form.F}


def _merge(*dicts):
    out = {}
    for d in dicts:
        for tag, v in d.items():
            out[tag] = out.get(tag, 0.0) + np.asarray(v, dtype=complex)
    return out


def gkp_amplitudes(family):
    """Displacement amplitudes for the x and p cosine terms."""
    return np.sqrt(2.0) * family.fp, 1j * np.sqrt(2.0) * family.fx


def gkp_conjugated_matrix(params, family, dim):
    """``G^dag W G`` for ``W = 2 - (1/2) sum_j [D(l_j) + D(l_j)^dag]``.

    Each displacement conjugates to ``D(conj(g) mu l + g nu conj(l))``
    times the phase ``exp(conj(g) conj(z) l - g z conj(l))``.
    """
    g, z, mu, nu = _unpack(params)
    gc, zc = np.conj(g), np.conj(z)
    out = 2.0 * np.eye(dim, dtype=complex)
    for lam in gkp_amplitudes(family):
        beta = gc * mu * lam + g * nu * np.conj(lam)
        phase = np.exp(gc * zc * lam - g * z * np.conj(lam))
        dm = displacement_matrix(beta, dim) * phase[..., None, None]
        out = out - 0.5 * (dm + np.conj(np.swapaxes(dm, -1, -2)))
    return out


def parity_conjugated_matrix(params, dim):
    """``G^dag Parity G = D(y) Parity`` with ``y = -2 (mu z + nu conj(z))``."""
    _, z, mu, nu = _unpack(params)
    y = -2.0 * (mu * z + nu * np.conj(z))
    return displacement_matrix(y, dim) @ parity_matrix(dim)


def cat_conjugated_matrix(params, family, dim):
    """``G^dag Q G`` for ``Q = n^2 - (n + conj(a)^2 a^2 + a^2 ad^2) + |a|^4 + 1 -/+ Parity``."""
    alpha = family.alpha
    n_sq = square_quadratic(number_conjugated_form(params))
    quad = cat_quadratic_form(params, alpha)
    const = abs(alpha) ** 4 + 1.0
    terms = _merge(n_sq.terms, _quadratic_terms(quad, -1.0), {"1": const})
    poly = realize_terms(terms, dim)
    par = parity_conjugated_matrix(params, dim)
    par = 0.5 * (par + np.conj(np.swapaxes(par, -1, -2)))
    return poly - family.parity_sign * par


def fock_conjugated_matrix(params, family, dim):
    """``G^dag (n - k)^2 G`` as the square of the shifted number form."""
    if family.kind != "fock":
        raise ContractViolation("fock_conjugated_matrix needs a fock family")
    return realize_quartic(square_quadratic(number_conjugated_form(params).shifted(-family.k)), dim)


def surrogate_matrix(base, lam, dim):
    """``(Q - lam)^2`` for a conjugated quadratic form ``Q``."""
    lam = np.asarray(lam, dtype=float)
    return realize_quartic(square_quadratic(base.shifted(-lam)), dim)


def conjugated_matrix(family, params, dim, lam=None):
    """Dispatch to the family's conjugated witness matrix.

    For the variance family the returned matrix is the surrogate
    ``(G^dag Q G - lam)^2`` and ``lam`` is required.
    """
    if family.kind == "cubic":
        if lam is None:
            raise ContractViolation("variance witness needs a lambda value")
        return surrogate_matrix(cubic_conjugated_form(params), lam, dim)
    if family.kind == "gkp":
        return gkp_conjugated_matrix(params, family, dim)
    if family.kind == "cat":
        return cat_conjugated_matrix(params, family, dim)
    return fock_conjugated_matrix(params, family, dim)


def identity_params():
    return GaussianParams(0.0, 0j, 0.0)
