"""CNF formulas, assignment enumeration, and the brute-force ground-truth solver.

Everything downstream (oracle construction, solvers, experiments) leans on one
shared convention: assignments are enumerated in canonical order, where the
assignment with index e in [0, 2^k) is the k-bit little-endian reading of e
(bit j of e gives the value of literal j). Oracle builders and the solvers
that run against them must agree on "the next unexamined assignment", so the
order is fixed here and nowhere else.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass
from string import ascii_lowercase
from typing import Iterator

from .errors import CapacityError, DimensionError

Assignment = tuple[bool, ...]
Clause = tuple[tuple[int, bool], ...]

DEFAULT_ENUMERATION_CAP = 20
DEFAULT_NEGATION_CLAUSE_CAP = 100_000


def enumeration_cap() -> int:
    """Active cap on literal counts for exhaustive work (RELATIVIZE_CAP overrides)."""
    return int(os.environ.get("RELATIVIZE_CAP", DEFAULT_ENUMERATION_CAP))


def check_enumerable(k: int, cap: int | None = None) -> int:
    limit = enumeration_cap() if cap is None else cap
    if k > limit:
        raise CapacityError(f"k={k} exceeds the enumeration cap of {limit} (2^{k} assignments)")
    return k


def default_literals(k: int) -> tuple[str, ...]:
    """Literal names a, b, c, ... (xN beyond 26)."""
    if k <= 26:
        return tuple(ascii_lowercase[:k])
    return tuple(f"x{j}" for j in range(k))


@dataclass(frozen=True)
class Formula:
    """A CNF formula: a conjunction of disjunctive clauses over k named literals.

    Clauses hold (literal index, polarity) pairs; polarity True is the positive
    literal. An empty clause list is the trivially true formula. `id` is the
    formula's corpus index and plays no part in its structure.
    """

    id: int
    literals: tuple[str, ...]
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        object.__setattr__(self, "literals", tuple(str(name) for name in self.literals))
        object.__setattr__(
            self,
            "clauses",
            tuple(tuple((int(i), bool(p)) for i, p in clause) for clause in self.clauses),
        )
        k = len(self.literals)
        if k < 1:
            raise ValueError("a formula needs at least one literal")
        if len(set(self.literals)) != k:
            raise ValueError("literal names must be distinct")
        for clause in self.clauses:
            if not clause:
                raise ValueError("clauses must be nonempty")
            if len(set(clause)) != len(clause):
                raise ValueError(f"duplicate (index, polarity) pair in clause {clause}")
            for i, _ in clause:
                if not 0 <= i < k:
                    raise ValueError(f"literal index {i} out of range for k={k}")

    @property
    def k(self) -> int:
        return len(self.literals)

    def accepts(self, a: Assignment) -> bool:
        """True iff the formula evaluates true under the assignment."""
        return evaluate(self, a)

    def canonical_key(self) -> str:
        """Deterministic structural serialization: sorted clauses, then literal names.

        Formulas differing only in clause order share a key; any structural
        difference (including literal names) changes it.
        """
        clauses = sorted(tuple(sorted(clause)) for clause in self.clauses)
        return json.dumps([clauses, list(self.literals)], separators=(",", ":"))


def evaluate(f: Formula, a: Assignment) -> bool:
    """CNF semantics: every clause has at least one literal matching the assignment."""
    if len(a) != f.k:
        raise DimensionError(f"assignment has {len(a)} values, formula {f.id} has k={f.k}")
    return all(any(a[i] == pol for i, pol in clause) for clause in f.clauses)


def assignment_from_index(e: int, k: int) -> Assignment:
    """Assignment number e in canonical order: bit j of e is the value of literal j."""
    return tuple(bool((e >> j) & 1) for j in range(k))


def assignment_index(a: Assignment) -> int:
    """Inverse of assignment_from_index."""
    return sum(1 << j for j, v in enumerate(a) if v)


def enumerate_assignments(f, cap: int | None = None) -> Iterator[Assignment]:
    """All 2^k assignments of f in canonical order.

    Deterministic and identical across every call; any problem object exposing
    `k` can be enumerated.
    """
    k = check_enumerable(f.k, cap)
    for e in range(1 << k):
        yield assignment_from_index(e, k)


def true_count(a: Assignment) -> int:
    """Number of true positions in the assignment."""
    return sum(a)


def partition(f, t: int, cap: int | None = None) -> list[Assignment]:
    """All assignments of f with exactly t true literals, in canonical order.

    The k+1 blocks for t = 0..k partition the full assignment space.
    """
    if not 0 <= t <= f.k:
        raise ValueError(f"true-count {t} out of range [0, {f.k}]")
    return [a for a in enumerate_assignments(f, cap) if true_count(a) == t]


@dataclass(frozen=True)
class SatVerdict:
    """Ground-truth record from the exhaustive solver."""

    satisfiable: bool
    witness: Assignment | None
    satisfying_count: int
    assignments_examined: int


def brute_force_sat(f, cap: int | None = None) -> SatVerdict:
    """Exhaustive satisfiability check: first witness in canonical order, exact model count.

    Always examines all 2^k assignments; this is the independent oracle every
    experiment is verified against. Works for any problem exposing `k` and
    `accepts`.
    """
    witness: Assignment | None = None
    count = 0
    examined = 0
    for a in enumerate_assignments(f, cap):
        examined += 1
        if f.accepts(a):
            count += 1
            if witness is None:
                witness = a
    return SatVerdict(count > 0, witness, count, examined)


def negate(f: Formula, new_id: int | None = None, clause_cap: int = DEFAULT_NEGATION_CLAUSE_CAP) -> Formula:
    """CNF complement of f over the same literal list.

    Expands the negation by distributing over the clause product (one literal
    picked from each clause, all picks negated), so the result can grow as the
    product of clause sizes; `clause_cap` bounds that product. Tautological
    product clauses are dropped and duplicates collapsed. The literal list is
    preserved deliberately: f and its complement stay positionally aligned.
    """
    fid = f.id if new_id is None else new_id
    if not f.clauses:
        # complement of the trivially true formula: a canonical contradiction
        return Formula(fid, f.literals, (((0, True),), ((0, False),)))
    size = 1
    for clause in f.clauses:
        size *= len(clause)
        if size > clause_cap:
            raise CapacityError(f"negation expansion exceeds {clause_cap} clauses")
    clauses: list[Clause] = []
    seen: set[Clause] = set()
    for picks in itertools.product(*f.clauses):
        negated = {(i, not p) for i, p in picks}
        if any((i, not p) in negated for i, p in negated):
            continue  # tautological: always satisfied
        clause = tuple(sorted(negated))
        if clause not in seen:
            seen.add(clause)
            clauses.append(clause)
    return Formula(fid, f.literals, tuple(clauses))


def conjoin(f: Formula, g: Formula, new_id: int | None = None) -> Formula:
    """CNF conjunction of f and g (clause concatenation).

    Literal lists are unified by name; literals present in only one side are
    unconstrained padding for the other. An unsatisfiable f forces an
    unsatisfiable result no matter what g is.
    """
    fid = f.id if new_id is None else new_id
    if f.literals == g.literals:
        return Formula(fid, f.literals, f.clauses + g.clauses)
    names = f.literals + tuple(n for n in g.literals if n not in f.literals)
    position = {name: j for j, name in enumerate(names)}
    remapped = tuple(
        tuple((position[g.literals[i]], p) for i, p in clause) for clause in g.clauses
    )
    return Formula(fid, names, f.clauses + remapped)
