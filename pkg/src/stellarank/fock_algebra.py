"""Dense operator matrices on a truncated single-mode Fock space.

Everything here is built in the number basis ``|0>, ..., |dim-1>``.  The
ladder matrices are the usual truncations, so products that are normal
ordered (all creation operators to the left) are exact entry by entry;
anti-normal products are wrong only in their last rows and columns.
"""

import numpy as np
from scipy import sparse
from scipy.linalg import expm
from scipy.sparse.linalg import expm_multiply
from scipy.special import eval_genlaguerre, gammaln

from .errors import InvalidDimensionError, NumericOverflowError

#: Monomials needed to write the square of a normal-ordered quadratic form.
#: The order of the ladder factors in each tag is the order of the product.
MONOMIAL_TAGS = (
    "1", "n", "n2",
    "a", "a2", "a3", "a4",
    "ad", "ad2", "ad3", "ad4",
    "na", "na2", "adn", "ad2n",
)

#: Pairs of tags whose operators are Hermitian conjugates of each other.
CONJUGATE_PAIRS = (
    ("a", "ad"), ("a2", "ad2"), ("a3", "ad3"), ("a4", "ad4"),
    ("na", "adn"), ("na2", "ad2n"),
)
SELF_ADJOINT_TAGS = ("1", "n", "n2")


def _check_dim(dim):
    if int(dim) != dim or dim < 1:
        raise InvalidDimensionError(f"Fock dimension must be a positive integer, got {dim!r}")
    return int(dim)


def build_ladder(dim):
    """Return the truncated annihilation and creation matrices.

    Parameters
    ----------
    dim : int
        Number of Fock states kept.

    Returns
    -------
    (a, ad) : tuple of ndarray
        Complex ``dim x dim`` matrices with ``a[n-1, n] = sqrt(n)`` and
        ``ad = a.conj().T``.
    """
    dim = _check_dim(dim)
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
    return a, a.conj().T


def number_matrix(dim):
    dim = _check_dim(dim)
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def build_monomials(dim):
    """Matrices of the fifteen monomials listed in :data:`MONOMIAL_TAGS`.

    Each matrix is the literal product of truncated ladder matrices in the
    order written in its tag, e.g. ``"adn"`` is ``ad @ ad @ a``.
    """
    dim = _check_dim(dim)
    a, ad = build_ladder(dim)
    n = ad @ a
    mp = np.linalg.matrix_power
    return {
        "1": np.eye(dim, dtype=complex),
        "n": n,
        "n2": n @ n,
        "a": a,
        "a2": mp(a, 2),
        "a3": mp(a, 3),
        "a4": mp(a, 4),
        "ad": ad,
        "ad2": mp(ad, 2),
        "ad3": mp(ad, 3),
        "ad4": mp(ad, 4),
        "na": n @ a,
        "na2": n @ a @ a,
        "adn": ad @ n,
        "ad2n": ad @ ad @ n,
    }


def displacement_matrix(alpha, dim):
    """Matrix elements ``<m|D(alpha)|n>`` from the Laguerre closed form.

    For ``m >= n``::

        <m|D|n> = sqrt(n!/m!) alpha^(m-n) exp(-|alpha|^2/2) L_n^(m-n)(|alpha|^2)

    and the upper triangle follows from ``alpha -> -conj(alpha)``.  Every
    entry is exact up to rounding, independent of ``dim``.

    ``alpha`` may be an array, in which case the result has shape
    ``alpha.shape + (dim, dim)``.
    """
    dim = _check_dim(dim)
    alpha = np.asarray(alpha, dtype=complex)
    amp = np.abs(alpha)[..., None, None]
    phase = np.angle(alpha)[..., None, None]
    x = amp ** 2

    row = np.arange(dim)[:, None]
    col = np.arange(dim)[None, :]
    lo = np.minimum(row, col)
    k = np.abs(row - col)

    lag = eval_genlaguerre(lo, k, x)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        log_amp = np.where(k == 0, 0.0, k * np.log(amp))
        log_mag = -x / 2 + 0.5 * (gammaln(lo + 1) - gammaln(lo + k + 1)) + log_amp
        mag = np.sign(lag) * np.exp(log_mag + np.log(np.abs(lag)))
    mag = np.where(lag == 0, 0.0, mag)
    ph = np.where(row >= col, np.exp(1j * k * phase), (-1.0) ** k * np.exp(-1j * k * phase))
    out = mag * ph
    if not np.all(np.isfinite(out)):
        raise NumericOverflowError(
            f"displacement matrix elements overflow at dim={dim} for |alpha| up to "
            f"{float(np.max(amp)):.3g}; lower |alpha| or the truncation dimension"
        )
    return out


def parity_matrix(dim):
    dim = _check_dim(dim)
    return np.diag((-1.0) ** np.arange(dim)).astype(complex)


def phase_matrix(phi, dim):
    """``F(phi) = exp(i phi n)``, diagonal in the Fock basis."""
    dim = _check_dim(dim)
    return np.diag(np.exp(1j * phi * np.arange(dim)))


def gaussian_unitary_oracle(params, theta, dim, columns=None):
    """Brute-force ``F(vartheta) D(z) S(r) F(theta)`` by matrix exponentials.

    Only intended as a test oracle: the truncated generators make the
    result unreliable near the truncation edge, so ``dim`` should be well
    above the block that is compared.  With ``columns`` set, only the first
    ``columns`` columns are returned, obtained by applying the exponentials
    of the sparse generators to basis vectors.
    """
    dim = _check_dim(dim)
    z = complex(params.z)
    if columns is None:
        a, ad = build_ladder(dim)
        disp = expm(z * ad - np.conj(z) * a)
        squeeze = expm(0.5 * params.r * (a @ a - ad @ ad))
        return phase_matrix(params.vartheta, dim) @ disp @ squeeze @ phase_matrix(theta, dim)

    a = sparse.diags(np.sqrt(np.arange(1, dim, dtype=float)), 1, format="csr").astype(complex)
    ad = a.conj().T.tocsr()
    cols = np.eye(dim, columns, dtype=complex) * np.exp(1j * theta * np.arange(columns))
    cols = expm_multiply(0.5 * params.r * (a @ a - ad @ ad), cols)
    cols = expm_multiply(z * ad - np.conj(z) * a, cols)
    return np.exp(1j * params.vartheta * np.arange(dim))[:, None] * cols
