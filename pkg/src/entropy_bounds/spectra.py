"""Hermitian eigenvalues, density-matrix entropies and Schmidt coefficients.

Eigenvalues come from a cyclic complex Jacobi iteration.  The solver works on
a stack of matrices at once (shape ``(n, d, d)``) so that Monte Carlo sampling
can push thousands of random density matrices through it per call.
"""

from __future__ import annotations

import json

import numpy as np

from .exceptions import (
    NoConvergenceError,
    NotDensityMatrixError,
    NotHermitianError,
    NotNormalizedError,
)
from .measures import EntropyMeasure, eval_sum
from .simplex import ProbVec, make_probvec

HERMITIAN_TOL = 1e-10
DENSITY_TOL = 1e-10
OFFDIAG_TOL = 1e-12
MAX_SWEEPS = 100


def as_matrix(A) -> np.ndarray:
    """Coerce to a square complex array (a single matrix or a stack)."""
    A = np.asarray(A, dtype=complex)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {A.shape}")
    return A


def check_hermitian(A) -> np.ndarray:
    A = as_matrix(A)
    scale = np.max(np.abs(A), axis=(-2, -1))
    asym = np.max(np.abs(A - np.conj(np.swapaxes(A, -1, -2))), axis=(-2, -1))
    bad = asym > HERMITIAN_TOL * scale
    if np.any(bad):
        raise NotHermitianError(
            f"||A - A^H||_max = {float(np.max(asym)):.3e} exceeds "
            f"{HERMITIAN_TOL:g} * ||A||_max"
        )
    return A


def eigenvalues_batch(A, *, tol=OFFDIAG_TOL, max_sweeps=MAX_SWEEPS,
                      check=True) -> np.ndarray:
    """Eigenvalues of a stack of Hermitian matrices, each row descending.

    Each sweep visits every pair ``(p, q)`` once and applies the complex
    rotation that zeroes ``A[p, q]`` in every still-unconverged matrix.  A
    matrix is converged once its off-diagonal Frobenius norm is at most
    ``tol * ||A||_F``.
    """
    A = as_matrix(A)
    if check:
        check_hermitian(A)
    single = A.ndim == 2
    stack = A.reshape(-1, A.shape[-1], A.shape[-1])
    n, d, _ = stack.shape
    # Batch index last: rows and columns of the stack are contiguous blocks.
    work = np.ascontiguousarray(np.transpose(stack, (1, 2, 0)))
    # Hermitize so round-off asymmetry cannot stall the iteration.
    work = 0.5 * (work + np.conj(np.swapaxes(work, 0, 1)))
    fro = np.sqrt(np.sum(np.abs(work) ** 2, axis=(0, 1)))
    out = np.empty((n, d))
    active = np.arange(n)
    pairs = [(p, q) for p in range(d - 1) for q in range(p + 1, d)]
    offmask = ~np.eye(d, dtype=bool)

    for _ in range(max_sweeps + 1):
        off = np.sqrt(np.sum(np.abs(work[offmask]) ** 2, axis=0))
        done = off <= tol * fro[active]
        if np.any(done):
            out[active[done]] = np.real(np.diagonal(work[:, :, done]))
            keep = ~done
            work, active = np.ascontiguousarray(work[:, :, keep]), active[keep]
        if active.size == 0:
            break
        for p, q in pairs:
            _rotate(work, p, q)
    else:
        raise NoConvergenceError(
            f"{active.size} matrices unconverged after {max_sweeps} Jacobi sweeps"
        )
    out = -np.sort(-out, axis=1)
    return out[0] if single else out.reshape(A.shape[:-1])


def _rotate(A, p, q):
    """Zero A[p, q, :] in place by a unitary acting on rows/columns p and q.

    ``A`` has shape ``(d, d, n)``: one Hermitian matrix per trailing index.
    """
    apq = A[p, q]
    b = np.abs(apq)
    nz = b > 0
    if not np.any(nz):
        return
    app = A[p, p].real
    aqq = A[q, q].real
    safe_b = np.where(nz, b, 1.0)
    phase = np.where(nz, apq / safe_b, 1.0)
    theta = (aqq - app) / (2.0 * safe_b)
    t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
    t = np.where(nz, t, 0.0)
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    # U = diag(1, conj(phase)) @ [[c, s], [-s, c]]
    ph = np.conj(phase)
    u_qp, u_qq = -s * ph, c * ph

    colp = A[:, p].copy()
    colq = A[:, q].copy()
    A[:, p] = colp * c + colq * u_qp
    A[:, q] = colp * s + colq * u_qq
    rowp = A[p].copy()
    rowq = A[q].copy()
    A[p] = rowp * c + rowq * np.conj(u_qp)
    A[q] = rowp * s + rowq * np.conj(u_qq)
    A[p, q] = 0.0
    A[q, p] = 0.0
    A[p, p] = A[p, p].real
    A[q, q] = A[q, q].real


def eigenvalues(A) -> np.ndarray:
    """Eigenvalues of one Hermitian matrix, sorted descending."""
    A = as_matrix(A)
    if A.ndim != 2:
        raise ValueError("eigenvalues() takes a single matrix; use eigenvalues_batch")
    return eigenvalues_batch(A)


def _clip_spectrum(lam):
    # Eigenvalues in [-DENSITY_TOL, 0) are round-off of a valid density matrix.
    return np.where((lam < 0) & (lam >= -DENSITY_TOL), 0.0, lam)


def density_spectrum(rho) -> ProbVec:
    """Eigenvalues of a density matrix as a :class:`ProbVec`."""
    rho = check_hermitian(rho)
    if rho.ndim != 2:
        raise ValueError("density_spectrum() takes a single matrix")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > DENSITY_TOL:
        raise NotDensityMatrixError(f"trace {tr!r} differs from 1 by more than {DENSITY_TOL:g}")
    lam = eigenvalues(rho)
    if lam[-1] < -DENSITY_TOL:
        raise NotDensityMatrixError(f"negative eigenvalue {lam[-1]!r}")
    return make_probvec(_clip_spectrum(lam))


def density_entropy(m: EntropyMeasure, rho) -> float:
    """``S_f(rho) = sum_i f(lambda_i)`` over the eigenvalues of ``rho``."""
    return eval_sum(m, density_spectrum(rho))


def schmidt_probs(psi) -> ProbVec:
    """Squared Schmidt coefficients of a bipartite pure state.

    ``psi`` is the ``(d_A, d_B)`` amplitude matrix.  The result has
    ``min(d_A, d_B)`` entries: the spectrum of ``psi @ psi^H``.
    """
    C = np.asarray(psi, dtype=complex)
    if C.ndim != 2:
        raise ValueError(f"amplitude matrix must be 2-D, got shape {C.shape}")
    norm = float(np.sum(np.abs(C) ** 2))
    if abs(norm - 1.0) > DENSITY_TOL:
        raise NotNormalizedError(f"sum |C_jk|^2 = {norm!r}, expected 1")
    lam = eigenvalues_batch(C @ C.conj().T)
    r = min(C.shape)
    return make_probvec(_clip_spectrum(lam[:r]))


def entanglement(m: EntropyMeasure, psi) -> float:
    return eval_sum(m, schmidt_probs(psi))


# --- JSON wire formats --------------------------------------------------------


def _complex_from(obj, rows, cols, what):
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{what}: need numeric 're' (and optional 'im') arrays") from exc
    if re.shape != (rows, cols) or im.shape != (rows, cols):
        raise ValueError(f"{what}: expected {rows}x{cols} arrays, got {re.shape} / {im.shape}")
    return re + 1j * im


def matrix_from_json(obj) -> np.ndarray:
    """Parse ``{"d": n, "re": [[...]], "im": [[...]]}``."""
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    try:
        d = int(obj["d"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError("matrix JSON needs an integer 'd'") from exc
    return _complex_from(obj, d, d, "matrix JSON")


def bipartite_from_json(obj) -> np.ndarray:
    """Parse ``{"da": a, "db": b, "re": [[...]], "im": [[...]]}``."""
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    try:
        da, db = int(obj["da"]), int(obj["db"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError("bipartite JSON needs integer 'da' and 'db'") from exc
    return _complex_from(obj, da, db, "bipartite JSON")


def matrix_to_json(A) -> dict:
    A = as_matrix(A)
    return {"d": A.shape[0], "re": A.real.tolist(), "im": A.imag.tolist()}
