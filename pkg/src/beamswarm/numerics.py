"""Dense complex-matrix primitives shared by the transceiver designs.

Every matrix handled here is small (a few antennas or streams per side), so
the emphasis is on tight contracts rather than raw speed: full SVDs with
checked unitarity, Cholesky-based solves that refuse indefinite inputs, and
factorization-based log-determinants that never form a determinant directly.
Heavy lifting is delegated to numpy/scipy; this module owns the error
translation and the invariants.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "NumericalFailure",
    "SingularMatrixError",
    "SvdFactors",
    "svd",
    "hpd_solve",
    "logdet_hpd",
]

# Relative tolerance for the Hermitian-input check on hpd_solve/logdet_hpd.
_HERMITIAN_RTOL = 1e-10


class NumericalFailure(Exception):
    """A numerical routine failed to produce a trustworthy result."""


class SingularMatrixError(NumericalFailure):
    """A matrix that must be Hermitian positive definite was not."""


@dataclass(frozen=True)
class SvdFactors:
    """Full singular value decomposition ``a = u @ diag(sigma) @ v^H``.

    Attributes
    ----------
    u : ndarray, shape (m, m)
        Left singular vectors, unitary.
    sigma : ndarray, shape (min(m, n),)
        Singular values, non-negative and non-increasing.
    v : ndarray, shape (n, n)
        Right singular vectors, unitary (not conjugated: ``a @ v[:, i] ==
        sigma[i] * u[:, i]`` for ``i < min(m, n)``).
    """

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def compose(self):
        """Rebuild the decomposed matrix, shape (m, n)."""
        r = self.sigma.shape[0]
        return (self.u[:, :r] * self.sigma) @ self.v[:, :r].conj().T


def svd(a):
    """Full SVD of a complex matrix with checked output contracts.

    Parameters
    ----------
    a : array_like, shape (m, n)
        Matrix to decompose. Must be finite.

    Returns
    -------
    SvdFactors

    Raises
    ------
    ValueError
        If ``a`` is not a finite 2-D matrix.
    NumericalFailure
        If the backend SVD does not converge; the message names the
        matrix dimensions.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError("svd expects a 2-D matrix, got ndim=%d" % a.ndim)
    if not np.all(np.isfinite(a)):
        raise ValueError("svd input contains non-finite entries")
    try:
        u, sigma, vh = np.linalg.svd(a, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(
            "SVD did not converge for a %dx%d matrix" % a.shape
        ) from exc
    return SvdFactors(u=u, sigma=sigma, v=vh.conj().T)


def _require_hermitian(a, who):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("%s expects a square matrix, got shape %r" % (who, a.shape))
    if not np.all(np.isfinite(a)):
        raise ValueError("%s input contains non-finite entries" % who)
    scale = max(1.0, float(np.linalg.norm(a)))
    if float(np.linalg.norm(a - a.conj().T)) > _HERMITIAN_RTOL * scale:
        raise ValueError("%s expects a Hermitian matrix" % who)
    return a


def hpd_solve(a, b):
    """Solve ``a @ x = b`` for Hermitian positive definite ``a``.

    Uses a Cholesky factorization; never forms an explicit inverse.

    Parameters
    ----------
    a : array_like, shape (n, n)
        Hermitian positive definite matrix.
    b : array_like, shape (n,) or (n, m)
        Right-hand side.

    Returns
    -------
    ndarray
        Solution with the shape of ``b``.

    Raises
    ------
    ValueError
        If ``a`` is not square Hermitian.
    SingularMatrixError
        If the Cholesky factorization hits a non-positive pivot.
    """
    a = _require_hermitian(a, "hpd_solve")
    b = np.asarray(b, dtype=np.complex128)
    try:
        factor = scipy.linalg.cho_factor(a, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(
            "matrix of size %d is not positive definite" % a.shape[0]
        ) from exc
    return scipy.linalg.cho_solve(factor, b, check_finite=False)


def logdet_hpd(a):
    """Natural-log determinant of a Hermitian positive definite matrix.

    Computed from the Cholesky factor diagonal, so it stays accurate for
    the nearly singular covariances that appear at low noise power.

    Raises
    ------
    ValueError
        If ``a`` is not square Hermitian.
    SingularMatrixError
        If ``a`` is not positive definite.
    """
    a = _require_hermitian(a, "logdet_hpd")
    try:
        lower = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(
            "matrix of size %d is not positive definite" % a.shape[0]
        ) from exc
    return 2.0 * float(np.sum(np.log(np.real(np.diag(lower)))))
