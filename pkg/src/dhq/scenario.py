"""Scenario files: JSON ingestion and dumping, schema "dhq-scenario/1".

Complex scalars serialize as two-element arrays [re, im]; matrices as
row-major nested arrays.  Projectors may be given as explicit matrices or
as lists of spanning vectors.  Validation failures carry JSON-path-like
locations (e.g. "/alternative_sets/1/projectors/0/matrix").
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DhqError, ParseError, ValidationError
from .histories import AlternativeSet, HistoryGrid
from .linalg import Hamiltonian, Projector, StateVector, projector_from_span
from .realms import Partition

SCHEMA = "dhq-scenario/1"


@dataclass(frozen=True)
class Scenario:
    """A parsed scenario: the grid plus named extras from the file."""

    grid: HistoryGrid
    partitions: dict[str, Partition] = field(default_factory=dict)
    data_name: str | None = None
    data_time: float | None = None

    @property
    def has_data(self) -> bool:
        return self.data_name is not None


def _complex_scalar(v, loc) -> complex:
    if (
        not isinstance(v, (list, tuple))
        or len(v) != 2
        or not all(isinstance(c, (int, float)) for c in v)
    ):
        raise ParseError("complex scalars must be [re, im] pairs", loc)
    return complex(float(v[0]), float(v[1]))


def _vector(v, loc) -> np.ndarray:
    if not isinstance(v, list) or not v:
        raise ParseError("expected a nonempty list of [re, im] pairs", loc)
    return np.array([_complex_scalar(c, f"{loc}/{i}") for i, c in enumerate(v)])


def _matrix(m, loc) -> np.ndarray:
    if not isinstance(m, list) or not m:
        raise ParseError("expected a nonempty row-major nested array", loc)
    rows = [_vector(row, f"{loc}/{r}") for r, row in enumerate(m)]
    if len({row.size for row in rows}) != 1:
        raise ParseError("ragged matrix rows", loc)
    return np.vstack(rows)


def encode_complex(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def encode_vector(v: np.ndarray) -> list:
    return [encode_complex(complex(c)) for c in np.asarray(v).reshape(-1)]


def encode_matrix(m: np.ndarray) -> list:
    return [encode_vector(row) for row in np.asarray(m)]


def parse_data_ref(ref, loc) -> tuple[str, float]:
    if not isinstance(ref, str) or "@" not in ref:
        raise ParseError("data projector reference must look like 'name@time'", loc)
    name, _, t = ref.rpartition("@")
    try:
        return name, float(t)
    except ValueError:
        raise ParseError(f"bad time in data projector reference {ref!r}", loc) from None


def scenario_from_dict(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ParseError("scenario document must be a JSON object", "/")
    schema = doc.get("schema")
    if schema != SCHEMA:
        raise ParseError(f"unsupported schema {schema!r}, expected {SCHEMA!r}", "/schema")
    try:
        dim = int(doc["dimension"])
    except (KeyError, TypeError, ValueError):
        raise ParseError("missing or invalid 'dimension'", "/dimension") from None

    ham_doc = doc.get("hamiltonian", "zero")
    if ham_doc == "zero":
        ham = Hamiltonian.zero(dim)
    else:
        m = _matrix(ham_doc, "/hamiltonian")
        try:
            ham = Hamiltonian(m)
        except DhqError as err:
            raise ValidationError(str(err), "/hamiltonian") from None

    try:
        psi = StateVector(_vector(doc["initial_state"], "/initial_state"), normalized=True)
    except KeyError:
        raise ParseError("missing 'initial_state'", "/initial_state") from None
    except ValueError as err:
        raise ValidationError(str(err), "/initial_state") from None

    sets_doc = doc.get("alternative_sets")
    if not isinstance(sets_doc, list) or not sets_doc:
        raise ParseError("'alternative_sets' must be a nonempty list", "/alternative_sets")
    sets = []
    for k, sdoc in enumerate(sets_doc):
        loc = f"/alternative_sets/{k}"
        if not isinstance(sdoc, dict):
            raise ParseError("alternative set must be an object", loc)
        try:
            time = float(sdoc["time"])
        except (KeyError, TypeError, ValueError):
            raise ParseError("missing or invalid 'time'", f"{loc}/time") from None
        label = str(sdoc.get("label", f"set{k}"))
        pdocs = sdoc.get("projectors")
        if not isinstance(pdocs, list) or not pdocs:
            raise ParseError("'projectors' must be a nonempty list", f"{loc}/projectors")
        projs = []
        for i, pdoc in enumerate(pdocs):
            ploc = f"{loc}/projectors/{i}"
            if not isinstance(pdoc, dict) or "name" not in pdoc:
                raise ParseError("projector needs a 'name'", ploc)
            name = str(pdoc["name"])
            try:
                if "matrix" in pdoc:
                    projs.append(Projector(_matrix(pdoc["matrix"], f"{ploc}/matrix"), name=name))
                elif "span" in pdoc:
                    span = pdoc["span"]
                    if not isinstance(span, list) or not span:
                        raise ParseError("'span' must be a nonempty list of vectors", f"{ploc}/span")
                    vecs = [_vector(v, f"{ploc}/span/{j}") for j, v in enumerate(span)]
                    projs.append(projector_from_span(vecs, name=name))
                else:
                    raise ParseError("projector needs 'matrix' or 'span'", ploc)
            except (DhqError, ValueError) as err:
                if isinstance(err, ParseError):
                    raise
                raise ValidationError(str(err), ploc) from None
        try:
            sets.append(AlternativeSet(time=time, projectors=tuple(projs), label=label))
        except (DhqError, ValueError) as err:
            raise ValidationError(str(err), loc) from None

    try:
        grid = HistoryGrid(sets, ham, psi)
    except (DhqError, ValueError) as err:
        raise ValidationError(str(err), "/alternative_sets") from None

    partitions: dict[str, Partition] = {}
    for n, pdoc in enumerate(doc.get("partitions", []) or []):
        loc = f"/partitions/{n}"
        if not isinstance(pdoc, dict) or "name" not in pdoc or "classes" not in pdoc:
            raise ParseError("partition needs 'name' and 'classes'", loc)
        classes, labels = [], []
        for c, cdoc in enumerate(pdoc["classes"]):
            cloc = f"{loc}/classes/{c}"
            if not isinstance(cdoc, dict) or "histories" not in cdoc:
                raise ParseError("class needs 'histories'", cloc)
            try:
                classes.append([tuple(int(i) for i in h) for h in cdoc["histories"]])
            except (TypeError, ValueError):
                raise ParseError("histories must be lists of integers", cloc) from None
            labels.append(str(cdoc.get("label", f"class{c}")))
        partitions[str(pdoc["name"])] = Partition.from_lists(classes, labels)

    data_name = data_time = None
    if doc.get("data_projector") is not None:
        data_name, data_time = parse_data_ref(doc["data_projector"], "/data_projector")
        try:
            grid.set_at(data_time).index_of(data_name)
        except KeyError as err:
            raise ValidationError(str(err), "/data_projector") from None

    return Scenario(grid=grid, partitions=partitions, data_name=data_name, data_time=data_time)


def parse_scenario(path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as err:
        raise ParseError(f"cannot read scenario file: {err}", str(p)) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"malformed JSON: {err}", str(p)) from None
    return scenario_from_dict(doc)


def scenario_to_dict(
    grid: HistoryGrid,
    partitions: dict[str, Partition] | None = None,
    data: tuple[str, float] | None = None,
) -> dict:
    doc = {
        "schema": SCHEMA,
        "dimension": grid.dim,
        "hamiltonian": "zero" if grid.hamiltonian.is_zero else encode_matrix(grid.hamiltonian.matrix),
        "initial_state": encode_vector(grid.initial_state.amplitudes),
        "alternative_sets": [
            {
                "time": s.time,
                "label": s.label,
                "projectors": [
                    {"name": p.name, "matrix": encode_matrix(p.matrix)} for p in s.projectors
                ],
            }
            for s in grid.sets
        ],
    }
    if partitions:
        doc["partitions"] = [
            {
                "name": name,
                "classes": [
                    {"label": label, "histories": [list(h) for h in sorted(cls)]}
                    for label, cls in zip(part.labels, part.classes)
                ],
            }
            for name, part in sorted(partitions.items())
        ]
    if data is not None:
        doc["data_projector"] = f"{data[0]}@{float(data[1])!r}"
    return doc


def dump_scenario(
    grid: HistoryGrid,
    path=None,
    partitions: dict[str, Partition] | None = None,
    data: tuple[str, float] | None = None,
) -> str:
    text = json.dumps(scenario_to_dict(grid, partitions, data), indent=2, sort_keys=True)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text
