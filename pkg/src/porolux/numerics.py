"""Shared numerical kernels.

Sparse matrices are ``scipy.sparse`` CSR arrays; everything else here (CG with
an optional null-space projector, the Thomas solve, quadrature and
finite-difference oracles, order estimation) is plain numpy.  All reductions
run in a fixed order so repeated calls on identical inputs are bit-identical.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp


class ConvergenceError(RuntimeError):
    """An iterative solve stopped without reaching its tolerance."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class PivotError(ZeroDivisionError):
    pass


@dataclass
class SolveReport:
    iterations: int
    residual: float
    converged: bool
    wall_time: float
    history: list = field(default_factory=list, repr=False)


def as_csr(A) -> sp.csr_array:
    """CSR copy of ``A`` with sorted, de-duplicated column indices."""
    A = sp.csr_array(A, dtype=float)
    A.sum_duplicates()
    A.sort_indices()
    return A


def is_symmetric(A, tol=1e-14) -> bool:
    A = as_csr(A)
    diff = abs(A - A.T)
    scale = max(abs(A).max(), np.finfo(float).tiny) if A.nnz else 1.0
    return diff.nnz == 0 or diff.max() <= tol * scale


def mean_projector(weights=None) -> Callable[[np.ndarray], np.ndarray]:
    """Orthogonal projector removing the (weighted) mean, i.e. the constant null space."""
    if weights is None:
        return lambda v: v - v.mean()
    w = np.asarray(weights, dtype=float)
    wsum = w.sum()
    return lambda v: v - (w @ v) / wsum


def cg_solve(A, rhs, tol=1e-10, maxit=None, projector=None, x0=None, precondition=True):
    """Conjugate gradients for symmetric positive (semi)definite ``A``.

    Parameters
    ----------
    A : sparse matrix or LinearOperator-like object with ``@``
    rhs : ndarray
    tol : float
        Stop once ``||rhs - A x|| <= tol * ||rhs||`` (2-norms, after projection).
    maxit : int, optional
        Defaults to ``10 * n``.
    projector : callable, optional
        Orthogonal projector onto the complement of the null space of ``A``.
        It is applied to the right-hand side and to every residual, so the
        iterates never pick up a null-space component.
    precondition : bool
        Jacobi scaling when ``A`` exposes a diagonal.

    Returns
    -------
    x, SolveReport
        ``report.converged`` is False when ``maxit`` is hit or the
        recurrence breaks down; raising is left to the caller.
    """
    t0 = time.perf_counter()
    b = np.array(rhs, dtype=float)
    n = b.shape[0]
    if maxit is None:
        maxit = 10 * n
    P = projector if projector is not None else (lambda v: v)
    b = P(b)
    bnorm = float(np.linalg.norm(b))

    inv_diag = None
    if precondition and hasattr(A, "diagonal"):
        d = np.asarray(A.diagonal(), dtype=float)
        if np.all(d > 0):
            inv_diag = 1.0 / d

    def M(v):
        z = v * inv_diag if inv_diag is not None else v.copy()
        return P(z)

    x = np.zeros(n) if x0 is None else P(np.array(x0, dtype=float))
    if bnorm == 0.0:
        return np.zeros(n), SolveReport(0, 0.0, True, time.perf_counter() - t0, [0.0])

    r = P(b - A @ x) if x0 is not None else b.copy()
    history = [float(np.linalg.norm(r)) / bnorm]
    z = M(r)
    p = z.copy()
    rz = float(r @ z)
    it = 0
    converged = history[-1] <= tol
    replacements = 0
    while not converged and it < maxit:
        Ap = A @ p
        pAp = float(p @ Ap)
        if not (pAp > 0.0) or not math.isfinite(pAp):
            break
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        r = P(r)
        it += 1
        history.append(float(np.linalg.norm(r)) / bnorm)
        if history[-1] <= tol:
            # the recurrence drifts from the true residual; restart from it a few times
            r = P(b - A @ x)
            if float(np.linalg.norm(r)) / bnorm <= tol or replacements >= 5:
                converged = True
                break
            replacements += 1
            z = M(r)
            p = z.copy()
            rz = float(r @ z)
            continue
        z = M(r)
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new

    true_res = float(np.linalg.norm(P(b - A @ x))) / bnorm
    report = SolveReport(it, true_res, converged and true_res <= tol,
                         time.perf_counter() - t0, history)
    return x, report


def tridiag_solve(lower, diag, upper, rhs):
    """Thomas algorithm for a tridiagonal system.

    ``lower[i]`` multiplies ``x[i-1]`` in row ``i`` (``lower[0]`` ignored);
    ``upper[i]`` multiplies ``x[i+1]`` (``upper[-1]`` ignored).  No pivoting:
    a zero pivot raises :class:`PivotError`.
    """
    a = np.asarray(lower, dtype=float)
    b = np.asarray(diag, dtype=float)
    c = np.asarray(upper, dtype=float)
    d = np.asarray(rhs, dtype=float)
    n = b.shape[0]
    cp = np.empty(n)
    dp = np.empty(n)
    if b[0] == 0.0:
        raise PivotError("zero pivot in row 0")
    cp[0] = c[0] / b[0] if n > 1 else 0.0
    dp[0] = d[0] / b[0]
    for i in range(1, n):
        piv = b[i] - a[i] * cp[i - 1]
        if piv == 0.0:
            raise PivotError(f"zero pivot in row {i}")
        cp[i] = c[i] / piv if i < n - 1 else 0.0
        dp[i] = (d[i] - a[i] * dp[i - 1]) / piv
    x = np.empty(n)
    x[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


def richardson_order(e1, e2, e3, exact_reference=True):
    """Observed order from errors at resolutions ``n``, ``2n``, ``4n``.

    With ``exact_reference`` the errors are distances to an exact solution
    and the order is ``log2(e2/e3)`` (checked for consistency with
    ``log2(e1/e2)``); otherwise they are successive quantities and
    ``log2((e1-e2)/(e2-e3))`` is used.  Returns ``nan`` when the sequence
    is not strictly monotone.
    """
    e1, e2, e3 = float(e1), float(e2), float(e3)
    if exact_reference:
        if not (e1 > e2 > e3 > 0.0):
            return math.nan
        return math.log2(e2 / e3)
    d1, d2 = e1 - e2, e2 - e3
    if d1 == 0.0 or d2 == 0.0 or (d1 > 0) != (d2 > 0) or abs(d2) >= abs(d1):
        return math.nan
    return math.log2(d1 / d2)


def observed_orders(errors):
    """Pairwise ``log2(e_i / e_{i+1})`` for a dyadic refinement sequence."""
    e = np.asarray(errors, dtype=float)
    return np.log2(e[:-1] / e[1:])


# -- quadrature and finite differences --------------------------------------

def trapezoid(values, dx):
    v = np.asarray(values, dtype=float)
    return dx * (0.5 * v[..., 0] + v[..., 1:-1].sum(axis=-1) + 0.5 * v[..., -1])


def cumulative_trapezoid(values, dx):
    """Running trapezoid integral from the first sample; same length as input."""
    v = np.asarray(values, dtype=float)
    out = np.zeros_like(v)
    out[..., 1:] = np.cumsum(0.5 * dx * (v[..., 1:] + v[..., :-1]), axis=-1)
    return out


def nested_trapezoid(values, dx):
    """``int_0^z int_0^tau f(s) ds dtau`` at every sample point."""
    return cumulative_trapezoid(cumulative_trapezoid(values, dx), dx)


def midpoint_norm(values, cell_volume, q=2.0):
    """Discrete L^q norm with one midpoint sample per cell."""
    v = np.abs(np.asarray(values, dtype=float)).ravel()
    return float((cell_volume * np.sum(v ** q)) ** (1.0 / q))


def central_second_difference(f: Callable, z, dz):
    return (f(z + dz) - 2.0 * f(z) + f(z - dz)) / dz ** 2


def central_difference(f: Callable, z, dz):
    return (f(z + dz) - f(z - dz)) / (2.0 * dz)


def fd_weights(offsets, deriv=1):
    """Finite-difference weights for ``d^deriv f`` from samples at ``offsets`` (unit spacing)."""
    offsets = np.asarray(offsets, dtype=float)
    n = offsets.shape[0]
    V = np.vander(offsets, n, increasing=True).T
    rhs = np.zeros(n)
    rhs[deriv] = math.factorial(deriv)
    return np.linalg.solve(V, rhs)


def forward_difference(f: Callable, z, dz, order=2):
    """One-sided first derivative at ``z`` from ``z, z+dz, ..., z+order*dz``."""
    if order < 1:
        raise ValueError(f"unsupported order {order}")
    w = fd_weights(np.arange(order + 1), 1)
    return sum(wi * f(z + i * dz) for i, wi in enumerate(w)) / dz


def backward_difference(f: Callable, z, dz, order=2):
    """One-sided first derivative at ``z`` from ``z, z-dz, ..., z-order*dz``."""
    return forward_difference(f, z, -dz, order)
