"""Time-indexed alternative sets, history enumeration, class operators.

A history grid holds one exhaustive set of exclusive alternatives per time
(strictly increasing times), a Hamiltonian, and a normalized initial state.
Projectors are stored in the Schroedinger picture and Heisenberg-evolved on
demand, with the evolved matrices memoized per (set, time).
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, GridTooLarge
from .linalg import TOL_ALG, Hamiltonian, Projector, StateVector, evolve_heisenberg, max_abs

HISTORY_CAP = 10**6

# A history is a plain tuple of per-time alternative indices.
HistoryIndex = tuple[int, ...]


@dataclass(frozen=True)
class AlternativeSet:
    """Exhaustive set of exclusive alternatives {P_a} at one time.

    Invariants: sum_a P_a = I and P_a P_b = delta_ab P_a, both at TOL_ALG.
    `provenance` is filled by refinement joins to remember which pair of
    parent alternatives each product projector came from.
    """

    time: float
    projectors: tuple[Projector, ...]
    label: str = ""
    provenance: tuple[tuple[int | None, int | None], ...] | None = None

    def __post_init__(self):
        ps = tuple(self.projectors)
        if not ps:
            raise ValueError(f"alternative set {self.label!r}: no projectors")
        object.__setattr__(self, "projectors", ps)
        dim = ps[0].dim
        if any(p.dim != dim for p in ps):
            raise DimensionMismatch(f"alternative set {self.label!r}: mixed dimensions")
        total = sum(p.matrix for p in ps)
        comp = max_abs(total - np.eye(dim))
        if comp > TOL_ALG:
            raise ValueError(
                f"alternative set {self.label!r}: completeness violated, ||sum P - I|| = {comp:.3e}"
            )
        for i, p in enumerate(ps):
            for q in ps[i + 1 :]:
                x = max_abs(p.matrix @ q.matrix)
                if x > TOL_ALG:
                    raise ValueError(
                        f"alternative set {self.label!r}: projectors {p.name!r} and "
                        f"{q.name!r} are not exclusive, ||P Q|| = {x:.3e}"
                    )
        if self.provenance is not None and len(self.provenance) != len(ps):
            raise ValueError(f"alternative set {self.label!r}: provenance length mismatch")

    @property
    def dim(self) -> int:
        return self.projectors[0].dim

    @property
    def size(self) -> int:
        return len(self.projectors)

    def names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.projectors)

    def index_of(self, name: str) -> int:
        for i, p in enumerate(self.projectors):
            if p.name == name:
                return i
        raise KeyError(f"no projector named {name!r} in set {self.label!r}")


class HistoryGrid:
    """Ordered times t_1 < ... < t_n with one AlternativeSet each.

    Immutable after construction; evolved-projector memoization is guarded
    by a lock so concurrent readers compute each key at most once.
    """

    def __init__(self, sets, hamiltonian: Hamiltonian, initial_state: StateVector):
        sets = tuple(sets)
        if not sets:
            raise ValueError("grid needs at least one alternative set")
        times = tuple(float(s.time) for s in sets)
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise ValueError(f"times must be strictly increasing, got {times}")
        dim = sets[0].dim
        if any(s.dim != dim for s in sets):
            raise DimensionMismatch("alternative sets have mixed dimensions")
        if hamiltonian.dim != dim:
            raise DimensionMismatch(f"Hamiltonian dim {hamiltonian.dim} != grid dim {dim}")
        if initial_state.dim != dim:
            raise DimensionMismatch(f"initial state dim {initial_state.dim} != grid dim {dim}")
        if not initial_state.normalized:
            initial_state = StateVector(initial_state.amplitudes, normalized=True)
        self.sets = sets
        self.times = times
        self.hamiltonian = hamiltonian
        self.initial_state = initial_state
        self._evolved: dict[tuple[int, int], np.ndarray] = {}
        self._lock = threading.Lock()

    @property
    def dim(self) -> int:
        return self.sets[0].dim

    @property
    def n_times(self) -> int:
        return len(self.sets)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(s.size for s in self.sets)

    def history_count(self) -> int:
        n = 1
        for s in self.sets:
            n *= s.size
        return n

    def evolved(self, k: int, a: int) -> np.ndarray:
        """Heisenberg-picture matrix of alternative a of set k at time t_k."""
        key = (k, a)
        cached = self._evolved.get(key)
        if cached is not None:
            return cached
        with self._lock:
            cached = self._evolved.get(key)
            if cached is None:
                p = self.sets[k].projectors[a]
                cached = evolve_heisenberg(p, self.hamiltonian, self.times[k]).matrix
                self._evolved[key] = cached
        return cached

    def history_label(self, h: HistoryIndex) -> str:
        """Chain notation: projector names, latest time leftmost."""
        return ",".join(self.sets[k].projectors[h[k]].name for k in reversed(range(len(h))))

    def set_at(self, time: float) -> AlternativeSet:
        for s in self.sets:
            if s.time == time:
                return s
        raise KeyError(f"no alternative set at time {time!r}")

    def validate_index(self, h: HistoryIndex) -> None:
        if len(h) != self.n_times:
            raise ValueError(f"history {h} has length {len(h)}, grid has {self.n_times} times")
        for k, a in enumerate(h):
            if not 0 <= a < self.sets[k].size:
                raise ValueError(f"history {h}: index {a} out of range at time {self.times[k]}")


def enumerate_histories(grid: HistoryGrid, cap: int = HISTORY_CAP) -> list[HistoryIndex]:
    """All histories in lexicographic order, first time slowest-varying."""
    n = grid.history_count()
    if n > cap:
        raise GridTooLarge(f"{n} histories exceed the cap of {cap}")
    return list(itertools.product(*(range(s.size) for s in grid.sets)))


def class_operator(grid: HistoryGrid, h: HistoryIndex) -> np.ndarray:
    """Chain of Heisenberg projections, latest time leftmost."""
    grid.validate_index(h)
    m = grid.evolved(0, h[0])
    for k in range(1, grid.n_times):
        m = grid.evolved(k, h[k]) @ m
    return m


def branch_vector(grid: HistoryGrid, h: HistoryIndex) -> np.ndarray:
    """Unnormalized branch state: the class operator applied to the initial state.

    Its squared norm is the history's candidate probability.
    """
    grid.validate_index(h)
    v = grid.initial_state.amplitudes
    for k in range(grid.n_times):
        v = grid.evolved(k, h[k]) @ v
    return v


def branch_matrix(grid: HistoryGrid, histories=None, cap: int = HISTORY_CAP) -> np.ndarray:
    """Stack of branch vectors, one row per history (enumeration order)."""
    if histories is None:
        histories = enumerate_histories(grid, cap=cap)
    out = np.empty((len(histories), grid.dim), dtype=np.complex128)
    for i, h in enumerate(histories):
        out[i] = branch_vector(grid, h)
    return out
