"""Relations, indexed tables, NA-augmented states, versioned tables, snapshots.

The four structure maps live here:

* ``extend_state`` / ``restrict_state`` move a state assignment between nested
  column sets, padding with NA or dropping columns.
* ``restrict_table`` applies the state restriction row-wise; it never changes
  the set of indices or versions in use.
* ``summarize`` turns a table into a relation by summing values over equal
  complete states, skipping every row with an NA in the requested columns
  (available-case analysis).
* ``restrict_relation`` marginalizes a relation: lift to a table, restrict,
  then summarize with the identity morphism.

Storage is sparse everywhere; a relation is semantically total with default
zero.  All objects are immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Hashable, Iterable, Iterator, Mapping, Sequence

from .causet import UnknownVersion, VersionPoset
from .semiring import Kind, KindError, SemiringMorphism, SemiringValue, add, apply_morphism, zero


class ColumnError(ValueError):
    """A column set is not nested the way the operation requires."""


class SnapshotConflict(ValueError):
    """Some index has two incomparable maximal versions in the past cone."""

    def __init__(self, indices: Sequence[Hashable]):
        self.indices = tuple(indices)
        super().__init__(f"incomparable maximal versions for indices {list(self.indices)!r}")


class _NAType:
    """Singleton marker for a missing (unknown / uncollected) state."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NA"


NA = _NAType()


def is_na(x: Any) -> bool:
    return x is NA


@dataclass(frozen=True)
class Schema:
    """Ordered variables with finite per-variable state spaces.

    Declaration order is kept for display; internally every column subset is
    canonicalized to sorted-by-name order so state assignments compare
    structurally without a schema in hand.
    """

    variables: tuple[str, ...]
    states: tuple[tuple[Any, ...], ...]

    def __post_init__(self) -> None:
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")
        if len(self.states) != len(self.variables):
            raise ValueError("one state space required per variable")
        for var, sts in zip(self.variables, self.states):
            if not sts:
                raise ValueError(f"variable {var!r} has an empty state space")
            if len(set(sts)) != len(sts):
                raise ValueError(f"variable {var!r} has duplicate states")

    @classmethod
    def binary(cls, *variables: str) -> "Schema":
        return cls(tuple(variables), tuple((0, 1) for _ in variables))

    def states_of(self, var: str) -> tuple[Any, ...]:
        try:
            return self.states[self.variables.index(var)]
        except ValueError:
            raise ColumnError(f"unknown variable {var!r}") from None

    def state_index(self, var: str, label: Any) -> int:
        sts = self.states_of(var)
        try:
            return sts.index(label)
        except ValueError:
            raise ValueError(f"{label!r} is not a state of {var!r}") from None

    def columns(self, cols: Iterable[str]) -> tuple[str, ...]:
        out = tuple(sorted(set(cols)))
        for c in out:
            if c not in self.variables:
                raise ColumnError(f"unknown variable {c!r}")
        return out

    def assignment(self, mapping: Mapping[str, Any]) -> "StateAssignment":
        sigma = StateAssignment.of(mapping)
        self.validate_state(sigma)
        return sigma

    def validate_state(self, sigma: "StateAssignment") -> None:
        for col, val in zip(sigma.columns, sigma.values):
            if is_na(val):
                continue
            if val not in self.states_of(col):
                raise ValueError(f"{val!r} is not a state of {col!r}")

    def all_states(self, cols: Iterable[str]) -> Iterator["StateAssignment"]:
        """Every NA-free assignment on cols, lexicographic in declared state
        order (last column varies fastest)."""
        cols = self.columns(cols)
        spaces = [self.states_of(c) for c in cols]

        def rec(i: int, acc: list[Any]) -> Iterator[StateAssignment]:
            if i == len(cols):
                yield StateAssignment(cols, tuple(acc))
                return
            for s in spaces[i]:
                acc.append(s)
                yield from rec(i + 1, acc)
                acc.pop()

        yield from rec(0, [])

    def lex_key(self, sigma: "StateAssignment"):
        return tuple(
            len(self.states_of(c)) if is_na(v) else self.state_index(c, v)
            for c, v in zip(sigma.columns, sigma.values)
        )


@dataclass(frozen=True)
class StateAssignment:
    """A (possibly partial, possibly NA-bearing) joint state on a column set."""

    columns: tuple[str, ...]
    values: tuple[Any, ...]

    def __post_init__(self) -> None:
        if len(self.columns) != len(self.values):
            raise ValueError("columns and values differ in length")
        if tuple(sorted(set(self.columns))) != self.columns:
            raise ValueError("columns must be unique and name-sorted; use StateAssignment.of")

    @classmethod
    def of(cls, mapping: Mapping[str, Any]) -> "StateAssignment":
        cols = tuple(sorted(mapping))
        return cls(cols, tuple(mapping[c] for c in cols))

    def get(self, var: str) -> Any:
        try:
            return self.values[self.columns.index(var)]
        except ValueError:
            raise ColumnError(f"variable {var!r} not in state") from None

    def as_dict(self) -> dict[str, Any]:
        return dict(zip(self.columns, self.values))

    @property
    def has_na(self) -> bool:
        return any(is_na(v) for v in self.values)

    def restrict(self, cols: Iterable[str]) -> "StateAssignment":
        return restrict_state(self, cols)

    def extend(self, cols: Iterable[str]) -> "StateAssignment":
        return extend_state(self, cols)

    def __repr__(self) -> str:
        body = ", ".join(f"{c}={v!r}" for c, v in zip(self.columns, self.values))
        return f"({body})"


def extend_state(sigma: StateAssignment, cols: Iterable[str]) -> StateAssignment:
    """Pad sigma with NA in every slot of cols it does not cover."""
    target = tuple(sorted(set(cols)))
    if not set(sigma.columns) <= set(target):
        raise ColumnError(f"{sigma.columns} is not a subset of {target}")
    have = sigma.as_dict()
    return StateAssignment(target, tuple(have.get(c, NA) for c in target))


def restrict_state(sigma: StateAssignment, cols: Iterable[str]) -> StateAssignment:
    """Keep only the columns in cols (NA values are preserved verbatim)."""
    target = tuple(sorted(set(cols)))
    if not set(target) <= set(sigma.columns):
        raise ColumnError(f"{target} is not a subset of {sigma.columns}")
    have = sigma.as_dict()
    return StateAssignment(target, tuple(have[c] for c in target))


@dataclass(frozen=True)
class Row:
    """One indexed record.  ``version`` is annotation only on plain tables."""

    index: Hashable
    state: StateAssignment
    value: SemiringValue
    version: Hashable = None


class Table:
    """An indexed collection of (state, value) records; indices are unique.

    Version annotations on rows (e.g. from a snapshot) are display metadata
    and do not participate in equality.
    """

    def __init__(self, schema: Schema, columns: Iterable[str], rows: Iterable[Row],
                 kind: Kind | None = None):
        self.schema = schema
        self.columns = schema.columns(columns)
        self.rows = tuple(rows)
        seen = set()
        for row in self.rows:
            if row.index in seen:
                raise ValueError(f"duplicate index {row.index!r}")
            seen.add(row.index)
            _check_row(schema, self.columns, row, kind)
        if kind is None:
            kind = self.rows[0].value.kind if self.rows else Kind.NATURAL
        self.kind = kind

    def without_versions(self) -> "Table":
        return Table(self.schema, self.columns,
                     [Row(r.index, r.state, r.value) for r in self.rows], self.kind)

    def row_tuples(self) -> tuple[tuple[Hashable, Hashable, StateAssignment, SemiringValue], ...]:
        """(version, index, state, value) per row, in table order."""
        return tuple((r.version, r.index, r.state, r.value) for r in self.rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Table):
            return NotImplemented
        return (self.schema == other.schema and self.columns == other.columns
                and self.kind == other.kind
                and frozenset((r.index, r.state, r.value) for r in self.rows)
                == frozenset((r.index, r.state, r.value) for r in other.rows))

    def __len__(self) -> int:
        return len(self.rows)

    def __repr__(self) -> str:
        return f"Table(columns={list(self.columns)!r}, rows={len(self.rows)}, kind={self.kind})"


class VersionedTable:
    """Records carrying versions from a poset; (version, index) pairs are
    unique, so each commit is an ordinary table of changed rows."""

    def __init__(self, schema: Schema, columns: Iterable[str], poset: VersionPoset,
                 rows: Iterable[Row], kind: Kind | None = None):
        self.schema = schema
        self.columns = schema.columns(columns)
        self.poset = poset
        self.rows = tuple(rows)
        seen = set()
        for row in self.rows:
            poset.require(row.version)
            key = (row.version, row.index)
            if key in seen:
                raise ValueError(f"duplicate (version, index) pair {key!r}")
            seen.add(key)
            _check_row(schema, self.columns, row, kind)
        if kind is None:
            kind = self.rows[0].value.kind if self.rows else Kind.NATURAL
        self.kind = kind

    def versions_used(self) -> tuple[Hashable, ...]:
        out, seen = [], set()
        for r in self.rows:
            if r.version not in seen:
                seen.add(r.version)
                out.append(r.version)
        return tuple(out)

    def commit(self, v: Hashable) -> Table:
        """The change set at version v, as a plain table."""
        self.poset.require(v)
        return Table(self.schema, self.columns,
                     [r for r in self.rows if r.version == v], self.kind)

    def snapshot(self, v: Hashable) -> Table:
        return snapshot(self, v)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, VersionedTable):
            return NotImplemented
        return (self.schema == other.schema and self.columns == other.columns
                and self.kind == other.kind and self.poset == other.poset
                and frozenset((r.version, r.index, r.state, r.value) for r in self.rows)
                == frozenset((r.version, r.index, r.state, r.value) for r in other.rows))

    def __len__(self) -> int:
        return len(self.rows)

    def __repr__(self) -> str:
        return (f"VersionedTable(columns={list(self.columns)!r}, rows={len(self.rows)}, "
                f"versions={len(self.poset.versions)}, kind={self.kind})")


def _check_row(schema: Schema, columns: tuple[str, ...], row: Row, kind: Kind | None) -> None:
    if row.state.columns != columns:
        raise ColumnError(f"row {row.index!r} has columns {row.state.columns}, table has {columns}")
    schema.validate_state(row.state)
    if kind is not None and row.value.kind is not kind:
        raise KindError(f"row {row.index!r} has kind {row.value.kind}, table has {kind}")


def restrict_table(t: Table | VersionedTable, cols: Iterable[str]):
    """Row-wise state restriction; indices, versions, and values untouched."""
    target = t.schema.columns(cols)
    if not set(target) <= set(t.columns):
        raise ColumnError(f"{target} is not a subset of {t.columns}")
    rows = [Row(r.index, r.state.restrict(target), r.value, r.version) for r in t.rows]
    if isinstance(t, VersionedTable):
        return VersionedTable(t.schema, target, t.poset, rows, t.kind)
    return Table(t.schema, target, rows, t.kind)


def snapshot(t: VersionedTable, v: Hashable) -> Table:
    """The latest version of every data item in the inclusive past of v.

    Each surviving row keeps the version it was taken from as annotation.
    Raises SnapshotConflict when some index has several incomparable maximal
    versions in the past cone, and UnknownVersion for a version outside the
    poset.
    """
    t.poset.require(v)
    ideal = t.poset.down_set(v)
    order: list[Hashable] = []
    per_index: dict[Hashable, dict[Hashable, Row]] = {}
    for row in t.rows:
        if row.version not in ideal:
            continue
        if row.index not in per_index:
            per_index[row.index] = {}
            order.append(row.index)
        per_index[row.index][row.version] = row
    conflicted = []
    out: list[Row] = []
    for i in order:
        maxima = t.poset.maximal(per_index[i].keys())
        if len(maxima) > 1:
            conflicted.append(i)
            continue
        (u,) = maxima
        r = per_index[i][u]
        out.append(Row(i, r.state, r.value, version=u))
    if conflicted:
        raise SnapshotConflict(conflicted)
    return Table(t.schema, t.columns, out, t.kind)


class Relation:
    """A total map from NA-free joint states to semiring values, stored
    sparsely: absent states are zero."""

    def __init__(self, schema: Schema, columns: Iterable[str], kind: Kind,
                 cells: Mapping[StateAssignment, SemiringValue] | Iterable[tuple[StateAssignment, SemiringValue]] = ()):
        self.schema = schema
        self.columns = schema.columns(columns)
        self.kind = kind
        items = cells.items() if isinstance(cells, Mapping) else cells
        store: dict[StateAssignment, SemiringValue] = {}
        for sigma, val in items:
            if sigma.columns != self.columns:
                raise ColumnError(f"cell columns {sigma.columns} != relation columns {self.columns}")
            if sigma.has_na:
                raise ValueError("relation states cannot contain NA")
            schema.validate_state(sigma)
            if val.kind is not kind:
                raise KindError(f"cell value kind {val.kind} != relation kind {kind}")
            if sigma in store:
                raise ValueError(f"duplicate cell for state {sigma!r}")
            if not val.is_zero():
                store[sigma] = val
        self._cells = store

    @classmethod
    def from_pairs(cls, schema: Schema, columns: Iterable[str], kind: Kind,
                   pairs: Iterable[tuple[Mapping[str, Any], SemiringValue]]) -> "Relation":
        return cls(schema, columns, kind,
                   [(StateAssignment.of(dict(m)), v) for m, v in pairs])

    def value(self, sigma: StateAssignment) -> SemiringValue:
        if sigma.columns != self.columns:
            raise ColumnError(f"state columns {sigma.columns} != relation columns {self.columns}")
        return self._cells.get(sigma, zero(self.kind))

    def cells(self) -> Iterator[tuple[StateAssignment, SemiringValue]]:
        """Nonzero cells in lexicographic state order."""
        for sigma in sorted(self._cells, key=self.schema.lex_key):
            yield sigma, self._cells[sigma]

    def support(self) -> int:
        return len(self._cells)

    def total(self) -> SemiringValue:
        out = zero(self.kind)
        for _, v in self._cells.items():
            out = add(out, v)
        return out

    def restrict(self, cols: Iterable[str]) -> "Relation":
        return restrict_relation(self, cols)

    def map_values(self, phi: SemiringMorphism) -> "Relation":
        return Relation(self.schema, self.columns, phi.target,
                        [(s, apply_morphism(phi, v)) for s, v in self._cells.items()])

    def normalized(self) -> "Relation":
        """Divide every cell by the total, exactly."""
        from .semiring import DegenerateTotal, rational

        total = self.total()
        if self.kind is Kind.NATURAL:
            return self.map_values(SemiringMorphism.normalize_by_total(total.payload))
        if self.kind is Kind.NONNEG_RATIONAL:
            if total.payload == 0:
                raise DegenerateTotal("cannot normalize a zero relation")
            return Relation(self.schema, self.columns, self.kind,
                            [(s, rational(v.payload / total.payload)) for s, v in self._cells.items()])
        raise KindError(f"cannot normalize kind {self.kind}")

    def __add__(self, other: "Relation") -> "Relation":
        if not isinstance(other, Relation):
            return NotImplemented
        if self.columns != other.columns or self.kind is not other.kind:
            raise KindError("can only add relations on the same columns and kind")
        out = dict(self._cells)
        for s, v in other._cells.items():
            out[s] = add(out[s], v) if s in out else v
        return Relation(self.schema, self.columns, self.kind, out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Relation):
            return NotImplemented
        return (self.schema == other.schema and self.columns == other.columns
                and self.kind == other.kind and self._cells == other._cells)

    def __repr__(self) -> str:
        body = ", ".join(f"{s!r}: {v!r}" for s, v in self.cells())
        return f"Relation({list(self.columns)!r}, {{{body}}})"


def summarize(t: Table, phi: SemiringMorphism) -> Relation:
    """Sum phi(value) over rows with equal complete states; rows with an NA
    anywhere in the table's columns contribute nothing."""
    if isinstance(t, VersionedTable):
        raise TypeError("summarize a commit or snapshot, not a raw versioned table "
                        "(indices repeat across versions)")
    if phi.source is not t.kind:
        raise KindError(f"morphism expects {phi.source}, table has {t.kind}")
    acc: dict[StateAssignment, SemiringValue] = {}
    for row in t.rows:
        if row.state.has_na:
            continue
        v = apply_morphism(phi, row.value)
        acc[row.state] = add(acc[row.state], v) if row.state in acc else v
    return Relation(t.schema, t.columns, phi.target, acc)


def skipped_row_count(t: Table, cols: Iterable[str] | None = None) -> int:
    """How many rows available-case analysis drops for the given columns."""
    target = t.schema.columns(cols) if cols is not None else t.columns
    return sum(1 for r in t.rows if r.state.restrict(target).has_na)


def lift(r: Relation) -> Table:
    """Index the nonzero states of a relation, in lexicographic state order,
    starting at 1."""
    rows = [Row(i, sigma, val) for i, (sigma, val) in enumerate(r.cells(), start=1)]
    return Table(r.schema, r.columns, rows, r.kind)


def restrict_relation(r: Relation, cols: Iterable[str]) -> Relation:
    """Marginalize: lift to a table, restrict, summarize with the identity
    (an OR for the Boolean kind)."""
    lifted = lift(r)
    restricted = restrict_table(lifted, cols)
    return summarize(restricted, SemiringMorphism.identity(r.kind))
