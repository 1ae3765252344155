"""The oracle-machine model: budgeted deterministic solvers, a simulated
nondeterministic solver, and exact per-run accounting.

Step accounting follows the input-sets-examined convention: a deterministic
solver's steps count the assignments it examined (or the encodings it
prepared), each oracle query costs one query and is answered instantaneously,
and a run's transcript records every (code, answer) pair in order. The
nondeterministic solver explores all branches at once in the model, so its
model-level cost is a single step and it never enters the query state; the
work done to simulate it is recorded separately and never conflated with the
model cost.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

from .encoding import input_code, partition_code
from .errors import ConfigurationError
from .formula import assignment_from_index, check_enumerable, enumerate_assignments


@dataclass(frozen=True)
class Budget:
    """Polynomial step allowance p(n) = coefficient * n ** exponent."""

    coefficient: int
    exponent: int

    def __post_init__(self):
        if self.coefficient < 0 or self.exponent < 0:
            raise ValueError("budget coefficient and exponent must be naturals")

    def steps(self, n: int) -> int:
        return self.coefficient * n**self.exponent


DEFAULT_BUDGET = Budget(2, 2)


def clamped_budget(k: int, preferred: Budget = DEFAULT_BUDGET) -> Budget:
    """Largest of a few standard budgets still strictly below 2^k.

    Budgeted searches must never be able to cover the whole assignment space,
    so corpora pick per-formula budgets through this clamp (the preferred
    2*n^2 only satisfies p(k) < 2^k from k = 7 up).
    """
    for b in (preferred, Budget(1, 2), Budget(1, 1)):
        if b.steps(k) < (1 << k):
            return b
    return Budget(1, 0)


def search_limit(budget: Budget, k: int) -> int:
    """Assignments a budgeted search may examine: min(p(k), 2^k).

    Builders and solvers both derive "the next unexamined assignment" from
    this, so it lives in exactly one place.
    """
    return min(budget.steps(k), 1 << k)


@dataclass(frozen=True)
class RunResult:
    """One solver run: verdict, work, queries, and the ground-truth comparison."""

    oracle: str
    formula_id: int
    k: int
    accepted: bool
    steps: int
    queries: int
    transcript: tuple[tuple[int, bool], ...]
    ground_truth: bool | None = None
    correct: bool | None = None
    simulated_work: int | None = None

    @property
    def verdict(self) -> str:
        return "accept" if self.accepted else "reject"


def _result(label, f, accepted, steps, transcript, ground_truth, simulated_work=None):
    correct = None if ground_truth is None else accepted == ground_truth
    return RunResult(
        oracle=label,
        formula_id=f.id,
        k=f.k,
        accepted=accepted,
        steps=steps,
        queries=len(transcript),
        transcript=tuple(transcript),
        ground_truth=ground_truth,
        correct=correct,
        simulated_work=simulated_work,
    )


class OracleChannel:
    """One run's connection to an oracle set.

    Answers membership queries against anything supporting `in` and keeps the
    ordered transcript; counters are per-run, never shared.
    """

    def __init__(self, oracle):
        self._oracle = oracle
        self.transcript: list[tuple[int, bool]] = []

    def query(self, code: int) -> bool:
        answer = code in self._oracle
        self.transcript.append((code, answer))
        return answer

    @property
    def queries(self) -> int:
        return len(self.transcript)


def _label(oracle) -> str:
    return getattr(oracle, "kind", "oracle")


def _require_covered(f, oracle):
    ids = getattr(oracle, "corpus_ids", None)
    if ids is not None and f.id not in ids:
        raise ConfigurationError(
            f"oracle {_label(oracle)!r} was not built over a corpus containing problem {f.id}"
        )


def nd_solve(f, budget: Budget | None = None, ground_truth: bool | None = None,
             cap: int | None = None) -> RunResult:
    """Simulated nondeterministic run.

    All branches run at once in the model, so the reported cost is one step and
    the oracle is never consulted; `simulated_work` records what the exhaustive
    simulation actually did. The budget is accepted for signature parity but a
    single nondeterministic step never exhausts it.
    """
    examined = 0
    found = False
    for a in enumerate_assignments(f, cap):
        examined += 1
        if f.accepts(a):
            found = True
            break
    return _result("ND", f, found, steps=1, transcript=[],
                   ground_truth=ground_truth, simulated_work=examined)


def solve_with_A(f, oracle, ground_truth: bool | None = None,
                 max_queries: int | None = None) -> RunResult:
    """Block-query solver: ask the oracle about each true-count block in turn.

    Accepts on the first yes, rejects once all k+1 blocks answered no. No
    assignment is ever examined directly, so steps = queries <= k + 1.
    `max_queries` caps the scan for budgeted staging; None scans every block.
    """
    _require_covered(f, oracle)
    blocks = f.k + 1
    limit = blocks if max_queries is None else min(max_queries, blocks)
    chan = OracleChannel(oracle)
    for t in range(limit):
        if chan.query(partition_code(f, t).code):
            return _result(_label(oracle), f, True, steps=t + 1,
                           transcript=chan.transcript, ground_truth=ground_truth)
    return _result(_label(oracle), f, False, steps=limit,
                   transcript=chan.transcript, ground_truth=ground_truth)


def solve_with_B(f, oracle, budget: Budget, ground_truth: bool | None = None,
                 cap: int | None = None) -> RunResult:
    """Budgeted direct search with a single oracle fallback.

    Examines assignments in canonical order until a witness appears or the
    budget p(k) runs out. A completed search is definitive; a truncated one
    queries the code of the next unexamined assignment and returns the oracle's
    answer as the verdict. That final answer is exactly where a dysfunctional
    oracle set misleads the machine, so the verdict may be wrong by design and
    `correct` records it.
    """
    _require_covered(f, oracle)
    k = check_enumerable(f.k, cap)
    total = 1 << k
    limit = search_limit(budget, k)
    examined = 0
    for e in range(limit):
        examined += 1
        if f.accepts(assignment_from_index(e, k)):
            return _result(_label(oracle), f, True, steps=examined,
                           transcript=[], ground_truth=ground_truth)
    if limit >= total:
        return _result(_label(oracle), f, False, steps=examined,
                       transcript=[], ground_truth=ground_truth)
    chan = OracleChannel(oracle)
    answer = chan.query(input_code(f.id, assignment_from_index(limit, k)).code)
    return _result(_label(oracle), f, answer, steps=examined,
                   transcript=chan.transcript, ground_truth=ground_truth)


def solve_with_C(f, oracle, ground_truth: bool | None = None,
                 cap: int | None = None, max_queries: int | None = None) -> RunResult:
    """Input-query enumeration solver: ask about every assignment in canonical
    order, accepting on the first yes.

    Worst case 2^k queries; that exponential scan is the whole point of the
    construction it pairs with. `max_queries` limits the scan for budgeted
    staging; None scans the full space.
    """
    _require_covered(f, oracle)
    k = check_enumerable(f.k, cap)
    total = 1 << k
    limit = total if max_queries is None else min(max_queries, total)
    chan = OracleChannel(oracle)
    for e in range(limit):
        if chan.query(input_code(f.id, assignment_from_index(e, k)).code):
            return _result(_label(oracle), f, True, steps=e + 1,
                           transcript=chan.transcript, ground_truth=ground_truth)
    return _result(_label(oracle), f, False, steps=limit,
                   transcript=chan.transcript, ground_truth=ground_truth)


def solve_conp_with_C_bar(f, oracle, ground_truth: bool | None = None) -> RunResult:
    """One-query solver for the complement question: does f reject every input?

    Queries the first canonical input code and accepts iff the oracle says yes.
    Complement-style sets hold every input code of a problem precisely when the
    problem has no accepting assignment, so against them one query decides the
    question; `ground_truth` should be the complement-side truth (f has no
    accepting assignment).
    """
    _require_covered(f, oracle)
    chan = OracleChannel(oracle)
    answer = chan.query(input_code(f.id, assignment_from_index(0, f.k)).code)
    return _result(_label(oracle), f, answer, steps=1,
                   transcript=chan.transcript, ground_truth=ground_truth)


@dataclass(frozen=True)
class OracleStats:
    """Per-oracle tallies across a batch of runs."""

    runs: int
    correct: int
    incorrect: int
    ungraded: int
    max_queries: int

    @property
    def correctness_rate(self) -> float:
        graded = self.correct + self.incorrect
        return self.correct / graded if graded else 0.0


@dataclass(frozen=True)
class AggregateReport:
    """Batch summary: totals, per-oracle correctness, worst queries by k."""

    total_runs: int
    accepted_runs: int
    incorrect_runs: int
    queries_total: int
    max_queries_by_k: dict[int, int]
    by_oracle: dict[str, OracleStats]


def run_report(results: list[RunResult]) -> AggregateReport:
    """Aggregate a batch of runs into totals and per-oracle statistics."""
    max_by_k: dict[int, int] = {}
    tallies: dict[str, list[int]] = {}
    accepted = incorrect = queries_total = 0
    for r in results:
        accepted += r.accepted
        queries_total += r.queries
        if r.correct is False:
            incorrect += 1
        max_by_k[r.k] = max(max_by_k.get(r.k, 0), r.queries)
        t = tallies.setdefault(r.oracle, [0, 0, 0, 0, 0])
        t[0] += 1
        if r.correct is True:
            t[1] += 1
        elif r.correct is False:
            t[2] += 1
        else:
            t[3] += 1
        t[4] = max(t[4], r.queries)
    by_oracle = {name: OracleStats(*t) for name, t in sorted(tallies.items())}
    return AggregateReport(
        total_runs=len(results),
        accepted_runs=accepted,
        incorrect_runs=incorrect,
        queries_total=queries_total,
        max_queries_by_k=dict(sorted(max_by_k.items())),
        by_oracle=by_oracle,
    )


def run_result_to_json(r: RunResult) -> dict:
    """JSON-safe view of a run; codes become decimal strings."""
    return {
        "oracle": r.oracle,
        "formula_id": r.formula_id,
        "k": r.k,
        "verdict": r.verdict,
        "steps": r.steps,
        "queries": r.queries,
        "transcript": [[str(code), answer] for code, answer in r.transcript],
        "ground_truth": r.ground_truth,
        "correct": r.correct,
        "simulated_work": r.simulated_work,
    }


def write_results_jsonl(results: list[RunResult], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in results:
            fh.write(json.dumps(run_result_to_json(r), separators=(",", ":")) + "\n")


def write_results_csv(results: list[RunResult], path) -> None:
    """The per-run table backing an AggregateReport."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["oracle", "formula_id", "k", "verdict", "steps", "queries", "correct"])
        for r in results:
            correct = "" if r.correct is None else str(r.correct).lower()
            writer.writerow([r.oracle, r.formula_id, r.k, r.verdict, r.steps, r.queries, correct])
