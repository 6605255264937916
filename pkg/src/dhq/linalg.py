"""Dense complex linear algebra: state vectors, projectors, Hamiltonians.

All operators are dense complex128 matrices.  Algebraic identities
(Hermiticity, idempotency, completeness) are enforced at an absolute
max-norm tolerance TOL_ALG, far above double-precision noise for the
dimensions in scope (<= a few hundred) and far below any physical signal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSpan, DimensionMismatch, NotHermitian

TOL_ALG = 1e-10

# Norm tolerance for vectors flagged as normalized.
TOL_NORM = 1e-12


def _as_complex_matrix(m) -> np.ndarray:
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got array of ndim {a.ndim}")
    if not np.all(np.isfinite(a.view(np.float64))):
        raise ValueError("matrix entries must be finite")
    a.setflags(write=False)
    return a


def _as_complex_vector(v) -> np.ndarray:
    a = np.array(v, dtype=np.complex128).reshape(-1)
    if a.size == 0:
        raise DimensionMismatch("empty vector")
    if not np.all(np.isfinite(a.view(np.float64))):
        raise ValueError("vector entries must be finite")
    a.setflags(write=False)
    return a


def max_abs(a: np.ndarray) -> float:
    """Max-norm of an array (0.0 for empty input)."""
    return float(np.max(np.abs(a))) if a.size else 0.0


@dataclass(frozen=True)
class StateVector:
    """Complex amplitude vector; flagged normalized for initial states."""

    amplitudes: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _as_complex_vector(self.amplitudes))
        if self.normalized:
            n = self.norm()
            if abs(n - 1.0) > TOL_NORM:
                raise ValueError(f"state flagged normalized has norm {n!r}")

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class Projector:
    """Hermitian idempotent matrix with an integer rank and a label."""

    matrix: np.ndarray
    rank: int = field(default=-1)
    name: str = "P"

    def __post_init__(self):
        m = _as_complex_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"projector matrix must be square, got {m.shape}")
        object.__setattr__(self, "matrix", m)
        herm = max_abs(m - m.conj().T)
        if herm > TOL_ALG:
            raise NotHermitian(f"projector {self.name!r}: ||P - P^dag|| = {herm:.3e}")
        idem = max_abs(m @ m - m)
        if idem > TOL_ALG:
            raise ValueError(f"projector {self.name!r}: ||P^2 - P|| = {idem:.3e}")
        tr = float(np.trace(m).real)
        r = int(round(tr))
        if abs(tr - r) > TOL_ALG:
            raise ValueError(f"projector {self.name!r}: trace {tr!r} is not near an integer")
        if self.rank >= 0 and self.rank != r:
            raise ValueError(f"projector {self.name!r}: declared rank {self.rank} != trace {r}")
        object.__setattr__(self, "rank", r)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Hamiltonian:
    """Hermitian generator of evolution; energy units with hbar = 1."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _as_complex_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"Hamiltonian must be square, got {m.shape}")
        herm = max_abs(m - m.conj().T)
        if herm > TOL_ALG:
            raise NotHermitian(f"||H - H^dag|| = {herm:.3e}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_zero(self) -> bool:
        return max_abs(self.matrix) == 0.0

    @classmethod
    def zero(cls, dim: int) -> "Hamiltonian":
        return cls(np.zeros((dim, dim), dtype=np.complex128))


def projector_from_span(vectors, name: str = "P") -> Projector:
    """Orthogonal projector onto the span of the given state vectors.

    Raises DegenerateSpan when the vectors are linearly dependent at
    TOL_ALG (relative singular-value test), DimensionMismatch when their
    dimensions differ.
    """
    vecs = [v.amplitudes if isinstance(v, StateVector) else _as_complex_vector(v) for v in vectors]
    if not vecs:
        raise DegenerateSpan("empty span")
    dim = vecs[0].size
    if any(v.size != dim for v in vecs):
        raise DimensionMismatch("spanning vectors have mixed dimensions")
    if len(vecs) > dim:
        raise DegenerateSpan(f"{len(vecs)} vectors cannot be independent in dimension {dim}")
    a = np.column_stack(vecs)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s[0] == 0.0 or s[-1] <= TOL_ALG * s[0]:
        raise DegenerateSpan(
            f"numerical rank below vector count (smallest/largest singular value "
            f"= {s[-1] / max(s[0], 1e-300):.3e})"
        )
    q = u[:, : len(vecs)]
    return Projector(q @ q.conj().T, rank=len(vecs), name=name)


def basis_projector(dim: int, indices, name: str = "P") -> Projector:
    """Projector onto the span of the listed canonical basis vectors."""
    m = np.zeros((dim, dim), dtype=np.complex128)
    idx = sorted(set(int(i) for i in indices))
    for i in idx:
        m[i, i] = 1.0
    return Projector(m, rank=len(idx), name=name)


def complement(p: Projector, name: str | None = None) -> Projector:
    """I - P ('not P')."""
    eye = np.eye(p.dim, dtype=np.complex128)
    return Projector(eye - p.matrix, rank=p.dim - p.rank, name=name or f"~{p.name}")


def hermitian_eig(h: Hamiltonian) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition H = U diag(w) U^dag with deterministic conventions.

    Eigenvalues ascending; each eigenvector's largest-magnitude component
    (first among near-ties) is made real positive so reports are
    bit-reproducible across runs.
    """
    w, u = np.linalg.eigh(h.matrix)
    u = u.copy()
    for k in range(u.shape[1]):
        col = u[:, k]
        mags = np.abs(col)
        i = int(np.argmax(mags > mags.max() * (1 - 1e-12)))
        ph = col[i]
        if abs(ph) > 0:
            u[:, k] = col * (abs(ph) / ph)
    return w, u


def evolve_heisenberg(p: Projector, h: Hamiltonian, t: float) -> Projector:
    """Heisenberg evolution P(t) = e^{+iHt} P e^{-iHt}, hbar = 1.

    The exponential goes through the Hermitian eigendecomposition (exact
    up to roundoff; unconditionally stable at these dimensions).
    """
    if p.dim != h.dim:
        raise DimensionMismatch(f"projector dim {p.dim} != Hamiltonian dim {h.dim}")
    if t == 0.0 or h.is_zero:
        return p
    w, u = hermitian_eig(h)
    phases = np.exp(1j * w * t)
    # e^{+iHt} = U diag(e^{+i w t}) U^dag
    expp = (u * phases) @ u.conj().T
    m = expp @ p.matrix @ expp.conj().T
    # Re-symmetrize to keep the Projector constructor's checks sharp.
    m = 0.5 * (m + m.conj().T)
    return Projector(m, rank=p.rank, name=p.name)
