"""The oracle-set constructions over a finite problem corpus.

Eight sets are built here (A, B, C, C_bar, D, D_bar, E, F), each by its own
staged algorithm: problems are processed in corpus order, and any machine
simulated during a stage sees only the members placed so far. Every member
carries provenance (problem id plus the construction step responsible), so the
dysfunction demonstrations can point at the exact code that caused a wrong
verdict.

Two encodings appear as members: block codes (true-count paired with the
problem's structural number) for A, E, and F's direct side; input codes
(problem id, assignment, padding) for B, C, C_bar, D, D_bar, and F's
complement side. F tags its two sides by pairing each code with 0 or 1.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
from dataclasses import dataclass, field

from .encoding import decode_input_code, input_code, pair, partition_code
from .errors import ConfigurationError, OracleFileError
from .formula import assignment_from_index, enumerate_assignments, true_count
from .machine import Budget, search_limit, solve_with_A, solve_with_B, solve_with_C

logger = logging.getLogger(__name__)

KINDS = ("A", "B", "C", "C_bar", "D", "D_bar", "E", "F")

Provenance = dict[int, tuple[int, str]]


@dataclass(frozen=True)
class OracleSet:
    """An immutable finite membership set, tagged with the construction that
    produced it and the corpus it was built over."""

    kind: str
    members: frozenset[int]
    provenance: Provenance
    corpus_ids: frozenset[int]
    corpus_hash: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown oracle kind {self.kind!r}")

    def __contains__(self, code: int) -> bool:
        return code in self.members

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class TaggedOracleView:
    """Membership view of one tagged side of a union set: a query for code c
    is answered by looking up pair(tag, c) in the base set."""

    base: OracleSet
    tag: int

    def __contains__(self, code: int) -> bool:
        return pair(self.tag, code) in self.base.members

    @property
    def kind(self) -> str:
        return f"{self.base.kind}[{'np' if self.tag == 0 else 'co'}]"

    @property
    def corpus_ids(self) -> frozenset[int]:
        return self.base.corpus_ids


def tagged_view(oracle: OracleSet, tag: int) -> TaggedOracleView:
    return TaggedOracleView(oracle, tag)


@dataclass(frozen=True)
class _StageView:
    """Members placed so far, dressed up as an oracle for staged machines."""

    kind: str
    members: frozenset[int]

    def __contains__(self, code: int) -> bool:
        return code in self.members


@dataclass(frozen=True)
class Corpus:
    """The finite slice of problems an experiment quantifies over, in stage
    order, with a step budget per problem.

    Ids must be dense 1..n in order: constructions and file formats both key
    on them. Any problem family exposing id, k, accepts and canonical_key
    works, not just CNF formulas.
    """

    formulas: tuple
    budgets: dict[int, Budget] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "formulas", tuple(self.formulas))
        ids = [f.id for f in self.formulas]
        if ids != list(range(1, len(ids) + 1)):
            raise ValueError("corpus ids must be dense 1..n in order")
        missing = [i for i in ids if i not in self.budgets]
        if missing:
            raise ValueError(f"no budget for problems {missing}")

    def __len__(self) -> int:
        return len(self.formulas)

    def __iter__(self):
        return iter(self.formulas)

    def by_id(self, fid: int):
        return self.formulas[fid - 1]

    def budget_for(self, fid: int) -> Budget:
        return self.budgets[fid]

    def ids(self) -> frozenset[int]:
        return frozenset(f.id for f in self.formulas)

    def digest(self) -> str:
        """Stable hash over problem structure and budgets."""
        doc = [
            [f.id, f.canonical_key(), self.budgets[f.id].coefficient, self.budgets[f.id].exponent]
            for f in self.formulas
        ]
        blob = json.dumps(doc, separators=(",", ":")).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()


def _has_accepting(f, cap=None) -> bool:
    return any(f.accepts(a) for a in enumerate_assignments(f, cap))


def _finish(kind, members, prov, corpus) -> OracleSet:
    return OracleSet(kind, frozenset(members), dict(prov), corpus.ids(), corpus.digest())


def kappa_ids(corpus: Corpus, cap=None) -> frozenset[int]:
    """Ids of problems whose pointwise complement is also in the corpus.

    Two problems are complements when they share an input length and disagree
    on every assignment; detection compares whole truth tables, folded into
    2^k-bit integers so the scan stays linear in the corpus.
    """
    tables: dict[tuple[int, int], list[int]] = {}
    masks: dict[int, tuple[int, int]] = {}
    for f in corpus.formulas:
        table = 0
        for e, a in enumerate(enumerate_assignments(f, cap)):
            if f.accepts(a):
                table |= 1 << e
        tables.setdefault((f.k, table), []).append(f.id)
        masks[f.id] = (f.k, table)
    kappa = set()
    for fid, (k, table) in masks.items():
        complement = table ^ ((1 << (1 << k)) - 1)
        if (k, complement) in tables:
            kappa.add(fid)
    return frozenset(kappa)


def build_A(corpus: Corpus, cap=None) -> OracleSet:
    """Functional construction: one code per (problem, true-count block) that
    contains at least one accepting assignment.

    Walks every assignment of every problem in canonical order and records the
    block code of each accepting one. The resulting set is exactly the
    accepting-block characterization, so it can be re-derived per block by
    independent brute force; unsatisfiable problems contribute nothing.
    """
    members: set[int] = set()
    prov: Provenance = {}
    for f in corpus.formulas:
        for e, a in enumerate(enumerate_assignments(f, cap)):
            if f.accepts(a):
                pc = partition_code(f, true_count(a))
                if pc.code not in members:
                    members.add(pc.code)
                    prov[pc.code] = (
                        f.id,
                        f"step 3: block t={pc.true_count} first accepted at assignment {e}",
                    )
    return _finish("A", members, prov, corpus)


def build_B(corpus: Corpus, cap=None) -> OracleSet:
    """Adversarial staged construction.

    At each stage the budgeted deterministic searcher runs against the members
    placed so far; if it rejects, the code of the next unexamined assignment
    joins the set -- whether or not that assignment satisfies the problem.
    Acceptance at a stage adds nothing, and a search that covered the whole
    space leaves nothing unexamined to add.
    """
    members: set[int] = set()
    prov: Provenance = {}
    for f in corpus.formulas:
        budget = corpus.budget_for(f.id)
        staged = solve_with_B(f, _StageView("B", frozenset(members)), budget, cap=cap)
        if not staged.accepted:
            limit = search_limit(budget, f.k)
            if limit < (1 << f.k):
                code = input_code(f.id, assignment_from_index(limit, f.k)).code
                members.add(code)
                prov[code] = (
                    f.id,
                    f"step 2: next unexamined assignment (index {limit}) after staged reject",
                )
    return _finish("B", members, prov, corpus)


def build_C(corpus: Corpus, cap=None) -> OracleSet:
    """Witness construction: exactly one accepting input code per satisfiable
    problem, the first in canonical order; rejected problems contribute nothing."""
    members: set[int] = set()
    prov: Provenance = {}
    for f in corpus.formulas:
        for e, a in enumerate(enumerate_assignments(f, cap)):
            if f.accepts(a):
                code = input_code(f.id, a).code
                members.add(code)
                prov[code] = (f.id, f"step 2: first accepting assignment (index {e})")
                break
    return _finish("C", members, prov, corpus)


def build_C_bar(corpus: Corpus, cap=None) -> OracleSet:
    """Complement-side construction: every input code of every problem the
    nondeterministic machine rejects (no accepting assignment at all)."""
    members: set[int] = set()
    prov: Provenance = {}
    for f in corpus.formulas:
        if not _has_accepting(f, cap):
            for a in enumerate_assignments(f, cap):
                code = input_code(f.id, a).code
                members.add(code)
                prov[code] = (f.id, "step 2: all input codes of a rejected problem")
    return _finish("C_bar", members, prov, corpus)


def _first_with_k(corpus: Corpus, k: int):
    for f in corpus.formulas:
        if f.k == k:
            return f
    return None


def build_D(corpus: Corpus, cap=None) -> tuple[OracleSet, OracleSet]:
    """Interleaved double construction of a set and its complement side.

    Even stages (prefix rule): each assignment of the stage problem whose code
    is not already on the complement side is tested through its half-length
    prefix. If that prefix is an assignment of the corpus problem with that
    many literals and the simulated nondeterministic machine rejects that
    problem, the code joins D. An unsatisfiable prefix problem stays
    unsatisfiable under any conjunctive extension, which is what the rule
    banks on -- the stage problem itself is never evaluated.

    Odd stages (query-capture rule): when every complement-side member is
    shorter than the stage index and the stage budget p satisfies
    p^2 < 2^(k-1) (the integer form of p < 2^((k-1)/2)), the budgeted query
    scanner runs against D-so-far; every code it asks about joins D_bar, and
    on rejection the next unqueried code joins D. Both additions ignore what
    the assignments actually evaluate to, so both sides end up misleading.

    Even stages need an even literal count; anything else is a corpus shape
    error.
    """
    d_members: set[int] = set()
    d_prov: Provenance = {}
    dbar_members: set[int] = set()
    dbar_prov: Provenance = {}
    for n, f in enumerate(corpus.formulas, start=1):
        if n % 2 == 0:
            if f.k % 2:
                raise ConfigurationError(
                    f"even-stage problem {f.id} needs an even literal count, got k={f.k}"
                )
            half = f.k // 2
            g = _first_with_k(corpus, half)
            if g is None or _has_accepting(g, cap):
                continue
            for a in enumerate_assignments(f, cap):
                code = input_code(f.id, a).code
                if code in dbar_members:
                    continue
                d_members.add(code)
                d_prov[code] = (
                    f.id,
                    f"step 5: half-prefix is an assignment of rejected problem {g.id}",
                )
        else:
            lengths_ok = all(
                decode_input_code(code).k < n for code in dbar_members
            )
            budget = corpus.budget_for(f.id)
            p = budget.steps(f.k)
            if not (lengths_ok and p * p < (1 << (f.k - 1))):
                logger.debug(
                    "D stage %d: gate failed (lengths_ok=%s, p=%d, k=%d)", n, lengths_ok, p, f.k
                )
                continue
            staged = solve_with_C(
                f, _StageView("D", frozenset(d_members)), cap=cap, max_queries=p
            )
            for code, _answer in staged.transcript:
                if code not in dbar_members:
                    dbar_members.add(code)
                    dbar_prov[code] = (f.id, "step 8: queried by the staged budgeted scanner")
            if not staged.accepted:
                limit = min(p, 1 << f.k)
                if limit < (1 << f.k):
                    code = input_code(f.id, assignment_from_index(limit, f.k)).code
                    d_members.add(code)
                    d_prov[code] = (
                        f.id,
                        f"step 8: next unqueried assignment (index {limit}) after staged reject",
                    )
    return (
        _finish("D", d_members, d_prov, corpus),
        _finish("D_bar", dbar_members, dbar_prov, corpus),
    )


def tower(n: int) -> int:
    """Stage-threshold sequence: t(0) = 0, t(n) = 2^(2*t(n-1)).

    Grows as 0, 1, 4, 256, 2^512, ...; past that the values stop being
    materially representable, which is what caps how many stages the
    conservative construction can run.
    """
    if n < 0:
        raise ValueError("tower index must be a natural")
    value = 0
    for _ in range(n):
        value = 2 ** (2 * value)
    return value


def build_E(corpus: Corpus, base: OracleSet, stage_cap: int = 3, cap=None) -> OracleSet:
    """Conservative-plus-injections construction on top of a functional base.

    Starts from every member of the base set. Problems whose pointwise
    complement is also in the corpus never receive anything further, so on
    that subset the result is identical to the base. For the rest, a stage
    fires only when its threshold chain
    t(n-1) < log2(k) <= t(n) <= p(k) < t(n+1) holds and p(t(n)) >= 2^t(n);
    then the block scanner, capped at p(k) queries, runs against the members
    so far, and if it rejects with blocks still unscanned, the code of the
    next unscanned block is injected. Injected codes are indistinguishable
    from trusted ones to later runs, which is exactly how they corrupt
    verdicts on the problems that received them.

    Stages beyond `stage_cap` are skipped because t(stage_cap + 2) is not
    representable; the construction stops cleanly and reports how many stages
    ran.
    """
    if base.corpus_hash != corpus.digest():
        raise ConfigurationError("base oracle was built over a different corpus")
    members = set(base.members)
    prov: Provenance = dict(base.provenance)
    kappa = kappa_ids(corpus, cap)
    stages_done = 0
    for n, f in enumerate(corpus.formulas, start=1):
        if n > stage_cap:
            logger.info(
                "E construction: stage cap %d reached, %d of %d stages completed",
                stage_cap, stages_done, len(corpus),
            )
            break
        stages_done = n
        if f.id in kappa:
            logger.debug("E stage %d: problem %d has its complement in the corpus", n, f.id)
            continue
        lo, mid, hi = tower(n - 1), tower(n), tower(n + 1)
        budget = corpus.budget_for(f.id)
        p_k = budget.steps(f.k)
        size_log = math.log2(f.k)
        chain = (lo < size_log, size_log <= mid, mid <= p_k, p_k < hi)
        if not all(chain):
            logger.debug("E stage %d: threshold chain failed, clauses=%s", n, chain)
            continue
        if budget.steps(mid) < 2**mid:
            logger.debug("E stage %d: budget below 2^t(n) at the threshold", n)
            continue
        staged = solve_with_A(f, _StageView("E", frozenset(members)), max_queries=p_k)
        if staged.accepted or staged.queries >= f.k + 1:
            continue
        t_next = staged.queries
        pc = partition_code(f, t_next)
        if pc.code not in members:
            members.add(pc.code)
            prov[pc.code] = (
                f.id,
                f"step 7: injected block t={t_next}, the next unevaluated after a capped reject",
            )
    return _finish("E", members, prov, corpus)


def build_F(corpus: Corpus, cap=None) -> OracleSet:
    """Two-sided functional set.

    The accepting-block codes are tagged 0 for the direct solver; one sentinel
    per problem with no accepting assignment (its first canonical input code)
    is tagged 1 for the one-query complement solver. Both sides answer
    correctly in polynomial queries, which is the behavioral outcome the
    construction exists for.
    """
    direct = build_A(corpus, cap)
    members = {pair(0, code) for code in direct.members}
    prov: Provenance = {
        pair(0, code): (fid, f"np side, {note}")
        for code, (fid, note) in direct.provenance.items()
    }
    for f in corpus.formulas:
        if not _has_accepting(f, cap):
            sentinel = input_code(f.id, assignment_from_index(0, f.k)).code
            code = pair(1, sentinel)
            members.add(code)
            prov[code] = (f.id, "co side: sentinel for a problem with no accepting assignment")
    return _finish("F", members, prov, corpus)


def save_oracle(oracle: OracleSet, path) -> None:
    """Write an oracle set as JSON, atomically (temp file, then rename)."""
    doc = {
        "kind": oracle.kind,
        "members": [str(code) for code in sorted(oracle.members)],
        "corpus_hash": oracle.corpus_hash,
        "corpus_ids": sorted(oracle.corpus_ids),
        "provenance": {
            str(code): [fid, note] for code, (fid, note) in sorted(oracle.provenance.items())
        },
    }
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    os.replace(tmp, path)


def load_oracle(path, corpus: Corpus | None = None) -> OracleSet:
    """Read an oracle set back; the set is constructed only after the whole
    document validates, so a corrupted file never yields a partial set.

    With a corpus given, a hash mismatch is rejected as well.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise OracleFileError(f"{path}: not valid JSON ({exc})") from exc
    try:
        kind = doc["kind"]
        members = frozenset(int(code) for code in doc["members"])
        corpus_hash = doc["corpus_hash"]
        corpus_ids = frozenset(int(i) for i in doc["corpus_ids"])
        prov = {int(code): (int(fid), str(note)) for code, (fid, note) in doc["provenance"].items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise OracleFileError(f"{path}: malformed oracle document ({exc})") from exc
    if kind not in KINDS:
        raise OracleFileError(f"{path}: unknown oracle kind {kind!r}")
    if corpus is not None and corpus.digest() != corpus_hash:
        raise OracleFileError(f"{path}: oracle was built over a different corpus")
    return OracleSet(kind, members, prov, corpus_ids, corpus_hash)
