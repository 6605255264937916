"""Coarse-graining, refinement joins, realm compatibility, conditioning.

A realm is a decoherent set of histories.  Compatibility of two realms is
decided through the canonical commuting refinement join: if the join exists
and decoheres the realms are compatible (the join is the witness); if it
exists but fails decoherence they are incompatible (the failing report is
the witness); if the sets at a shared time do not commute the verdict is
`undetermined`, since the product join is a sufficient construction, not a
necessary one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .decoherence import (
    TOL_DEC_DEFAULT,
    DecoherenceReport,
    decoherence_functional,
    normalized_offdiag,
    probabilities,
    validate_partition,
)
from .errors import (
    ConditionOnNull,
    DimensionMismatch,
    InvalidPartition,
    NonCommutingSets,
    NotDecoherent,
)
from .histories import (
    AlternativeSet,
    HistoryGrid,
    branch_matrix,
    class_operator,
    enumerate_histories,
)
from .linalg import TOL_ALG, Projector, max_abs

# Products with norm below this are dropped from refinement joins, and
# conditioning on data less probable than this is an error rather than 0/0.
ZERO_PRODUCT_NORM = 1e-12
P_FLOOR = 1e-12


@dataclass(frozen=True)
class Partition:
    """Disjoint nonempty classes of histories covering a grid."""

    classes: tuple[frozenset, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        classes = tuple(frozenset(map(tuple, c)) for c in self.classes)
        object.__setattr__(self, "classes", classes)
        if len(self.labels) != len(classes):
            raise InvalidPartition("one label per class required")

    @classmethod
    def singletons(cls, histories) -> "Partition":
        hs = [tuple(h) for h in histories]
        return cls(tuple(frozenset([h]) for h in hs), tuple(str(h) for h in hs))

    @classmethod
    def from_lists(cls, classes, labels=None) -> "Partition":
        classes = tuple(frozenset(map(tuple, c)) for c in classes)
        if labels is None:
            labels = tuple(f"class{i}" for i in range(len(classes)))
        return cls(classes, tuple(labels))


@dataclass(frozen=True)
class Realm:
    """A history grid together with its passing decoherence report."""

    grid: HistoryGrid
    report: DecoherenceReport

    def __post_init__(self):
        if not self.report.decoherent:
            raise NotDecoherent(
                "a realm must decohere at its construction tolerance", self.report
            )

    @classmethod
    def from_grid(cls, grid: HistoryGrid, tol_dec: float = TOL_DEC_DEFAULT) -> "Realm":
        return cls(grid, decoherence_functional(grid, tol_dec=tol_dec))


@dataclass(frozen=True)
class CompatibilityVerdict:
    status: str  # compatible | incompatible | undetermined
    witness_grid: HistoryGrid | None = None
    witness_report: DecoherenceReport | None = None
    detail: str = ""


@dataclass(frozen=True)
class CoarseGraining:
    """Summed class operators of a partition plus the coarse report."""

    partition: Partition
    class_operators: tuple[np.ndarray, ...]
    report: DecoherenceReport


def coarse_grain(
    grid: HistoryGrid, partition: Partition, tol_dec: float = TOL_DEC_DEFAULT
) -> CoarseGraining:
    """Coarse-grain by summing class operators over each partition class."""
    histories = enumerate_histories(grid)
    validate_partition(partition.classes, histories)
    fine = decoherence_functional(grid, tol_dec=tol_dec)
    order = {h: i for i, h in enumerate(histories)}
    bm = branch_matrix(grid, histories)
    coarse_branches = np.empty((len(partition.classes), grid.dim), dtype=np.complex128)
    ops = []
    for i, cls in enumerate(partition.classes):
        rows = sorted(order[h] for h in cls)
        coarse_branches[i] = bm[rows].sum(axis=0)
        op = None
        for r in rows:
            c = class_operator(grid, histories[r])
            op = c if op is None else op + c
        ops.append(op)
    gram = coarse_branches.conj() @ coarse_branches.T
    gram = 0.5 * (gram + gram.conj().T)
    worst = normalized_offdiag(gram)
    report = DecoherenceReport(
        histories=tuple((i,) for i in range(len(partition.classes))),
        labels=tuple(partition.labels),
        gram=gram,
        probabilities=gram.diagonal().real.copy(),
        max_offdiag_normalized=worst,
        decoherent=worst <= tol_dec,
        tol_used=float(tol_dec),
    )
    if fine.decoherent and not report.decoherent:
        raise AssertionError(
            "coarse-graining of a decoherent set failed decoherence "
            f"({report.max_offdiag_normalized:.3e} > {tol_dec:.3e})"
        )
    return CoarseGraining(partition=partition, class_operators=tuple(ops), report=report)


def _join_sets(sa: AlternativeSet, sb: AlternativeSet, time: float) -> AlternativeSet:
    """Product set {P_a Q_b} at a shared time, zero products dropped."""
    worst = 0.0
    for p in sa.projectors:
        for q in sb.projectors:
            worst = max(worst, max_abs(p.matrix @ q.matrix - q.matrix @ p.matrix))
    if worst > TOL_ALG:
        raise NonCommutingSets(
            f"sets {sa.label!r} and {sb.label!r} at time {time} do not commute "
            f"(max commutator norm {worst:.3e})",
            worst,
        )
    projectors = []
    provenance = []
    for ia, p in enumerate(sa.projectors):
        for ib, q in enumerate(sb.projectors):
            m = p.matrix @ q.matrix
            if max_abs(m) < ZERO_PRODUCT_NORM:
                continue
            m = 0.5 * (m + m.conj().T)
            name = p.name if p.name == q.name else f"{p.name}&{q.name}"
            projectors.append(Projector(m, name=name))
            provenance.append((ia, ib))
    return AlternativeSet(
        time=time,
        projectors=tuple(projectors),
        label=f"{sa.label}&{sb.label}" if sa.label != sb.label else sa.label,
        provenance=tuple(provenance),
    )


def refine_join(a: HistoryGrid, b: HistoryGrid) -> HistoryGrid:
    """Common fine-graining of two grids over the same H and initial state.

    Shared times get the commuting product set; non-shared times keep the
    original set (tagged with one-sided provenance) and interleave.
    """
    if a.dim != b.dim:
        raise DimensionMismatch(f"grid dimensions differ: {a.dim} vs {b.dim}")
    if max_abs(a.hamiltonian.matrix - b.hamiltonian.matrix) > TOL_ALG:
        raise ValueError("grids have different Hamiltonians")
    if max_abs(a.initial_state.amplitudes - b.initial_state.amplitudes) > TOL_ALG:
        raise ValueError("grids have different initial states")
    by_time_a = {s.time: s for s in a.sets}
    by_time_b = {s.time: s for s in b.sets}
    sets = []
    for t in sorted(set(by_time_a) | set(by_time_b)):
        sa, sb = by_time_a.get(t), by_time_b.get(t)
        if sa is not None and sb is not None:
            sets.append(_join_sets(sa, sb, t))
        elif sa is not None:
            sets.append(
                AlternativeSet(
                    time=t,
                    projectors=sa.projectors,
                    label=sa.label,
                    provenance=tuple((i, None) for i in range(sa.size)),
                )
            )
        else:
            sets.append(
                AlternativeSet(
                    time=t,
                    projectors=sb.projectors,
                    label=sb.label,
                    provenance=tuple((None, i) for i in range(sb.size)),
                )
            )
    return HistoryGrid(sets, a.hamiltonian, a.initial_state)


def marginal_partition(joined: HistoryGrid, side: int) -> Partition:
    """Partition of a joined grid's histories by one parent's alternatives.

    side 0 groups by the first parent's indices, side 1 by the second's.
    Requires the provenance tags written by refine_join.
    """
    if side not in (0, 1):
        raise ValueError("side must be 0 or 1")
    histories = enumerate_histories(joined)
    groups: dict[tuple, list] = {}
    for h in histories:
        key = []
        for k, a in enumerate(h):
            prov = joined.sets[k].provenance
            if prov is None:
                raise ValueError("grid lacks join provenance")
            parent = prov[a][side]
            if parent is not None:
                key.append(parent)
        groups.setdefault(tuple(key), []).append(h)
    keys = sorted(groups)
    return Partition.from_lists([groups[k] for k in keys], [str(k) for k in keys])


def check_compatibility(
    a: Realm, b: Realm, tol_dec: float = TOL_DEC_DEFAULT
) -> CompatibilityVerdict:
    """Decide realm compatibility through the commuting refinement join."""
    try:
        joined = refine_join(a.grid, b.grid)
    except NonCommutingSets as err:
        return CompatibilityVerdict(
            status="undetermined",
            detail=f"join construction unavailable: {err}",
        )
    report = decoherence_functional(joined, tol_dec=tol_dec)
    if report.decoherent:
        return CompatibilityVerdict(
            status="compatible",
            witness_grid=joined,
            witness_report=report,
            detail="common fine-graining decoheres",
        )
    return CompatibilityVerdict(
        status="incompatible",
        witness_grid=joined,
        witness_report=report,
        detail=(
            "common fine-graining fails decoherence "
            f"(max normalized off-diagonal {report.max_offdiag_normalized:.3e})"
        ),
    )


def conditional_probability(
    grid: HistoryGrid, target, given, tol_dec: float = TOL_DEC_DEFAULT
) -> float:
    """p(target | given) over a decoherent set of histories."""
    probs = dict(probabilities(grid, tol_dec=tol_dec))
    target = {tuple(h) for h in target}
    given = {tuple(h) for h in given}
    for h in target | given:
        if h not in probs:
            raise ValueError(f"unknown history {h}")
    p_given = sum(probs[h] for h in given)
    if p_given <= P_FLOOR:
        raise ConditionOnNull(f"conditioning probability {p_given:.3e} <= {P_FLOOR:.0e}")
    p_joint = sum(probs[h] for h in target & given)
    return p_joint / p_given


def _data_set_index(grid: HistoryGrid, data_name: str, data_time: float) -> tuple[int, int]:
    for k, s in enumerate(grid.sets):
        if s.time == data_time:
            return k, s.index_of(data_name)
    raise KeyError(f"no alternative set at time {data_time!r}")


def _conditioned_family(grid, data_name, data_time, *, future: bool, tol_dec: float):
    """Shared machinery for predict/retrodict per the chain-order rules.

    Builds the sub-grid of the data set plus the alternatives strictly on
    the requested side of the data time, verifies its decoherence, then
    returns the conditional probabilities from the explicit chain formula.
    """
    k_d, i_d = _data_set_index(grid, data_name, data_time)
    if future:
        side = [k for k in range(grid.n_times) if grid.times[k] > data_time]
    else:
        side = [k for k in range(grid.n_times) if grid.times[k] < data_time]
    if not side:
        raise ValueError(
            f"no alternative sets {'after' if future else 'before'} the data time {data_time}"
        )
    sub_sets = [grid.sets[k] for k in sorted(side + [k_d])]
    sub = HistoryGrid(sub_sets, grid.hamiltonian, grid.initial_state)
    report = decoherence_functional(sub, tol_dec=tol_dec)
    if not report.decoherent:
        raise NotDecoherent(
            "the set of the data projector together with the conditioned "
            "alternatives fails decoherence "
            f"({report.max_offdiag_normalized:.3e} > {tol_dec:.3e})",
            report,
        )
    p_d = grid.evolved(k_d, i_d) @ grid.initial_state.amplitudes
    denom = float(np.vdot(p_d, p_d).real)
    if denom <= P_FLOOR:
        raise ConditionOnNull(f"data probability {denom:.3e} <= {P_FLOOR:.0e}")
    sub_kd = sorted(side + [k_d]).index(k_d)
    side_positions = [p for p in range(sub.n_times) if p != sub_kd]
    results = []
    for combo in itertools.product(*(range(sub.sets[p].size) for p in side_positions)):
        if future:
            # ||C_fut P_d |Psi>||^2 / ||P_d |Psi>||^2
            v = p_d
            for p, alt in zip(side_positions, combo):
                v = sub.evolved(p, alt) @ v
        else:
            # ||P_d C_pst |Psi>||^2 / ||P_d |Psi>||^2
            v = sub.initial_state.amplitudes
            for p, alt in zip(side_positions, combo):
                v = sub.evolved(p, alt) @ v
            v = sub.evolved(sub_kd, i_d) @ v
        num = float(np.vdot(v, v).real)
        label = ",".join(
            sub.sets[p].projectors[alt].name
            for p, alt in sorted(zip(side_positions, combo), reverse=True)
        )
        results.append((combo, label, num / denom))
    return results


def predict(grid: HistoryGrid, data_name: str, data_time: float, tol_dec: float = TOL_DEC_DEFAULT):
    """Conditional probabilities of the future alternatives given the data."""
    return _conditioned_family(grid, data_name, data_time, future=True, tol_dec=tol_dec)


def retrodict(
    grid: HistoryGrid, data_name: str, data_time: float, tol_dec: float = TOL_DEC_DEFAULT
):
    """Conditional probabilities of the past alternatives given the data."""
    return _conditioned_family(grid, data_name, data_time, future=False, tol_dec=tol_dec)
