import itertools
import json
import logging
import os
import time

import numpy as np
import pandas as pd

from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

from src.logforms.constructions import HurwitzDatum
from src.logforms.errors import InternalInconsistencyError, PreconditionError
from src.logforms.field import FieldElement, FieldSpec, field_spec
from src.logforms.forms import is_logarithmic, log_derivative_from_roots, order_at_infinity
from src.logforms.polynomial import (
    Polynomial,
    pderiv,
    pfrobenius,
    pmul,
    ppow,
    ppowmod,
    psub,
)
from src.logforms.spaces import LogFormSpace, forms_from_pair, validate_space

logger = logging.getLogger(__name__)

# Shard count of the coefficient space; fixed so that results and
# checkpoints do not depend on the number of worker processes.
DEFAULT_SHARDS = 16

# Searches whose candidate estimate exceeds this need long_run=True.
LONG_RUN_THRESHOLD = 250_000

NORMALIZATION_NOTE = (
    "leading coefficients range over one canonical basis per 2-dimensional "
    "F_p-subspace; translation pins the z^(lambda-1) coefficient of A to 0 when "
    "p does not divide lambda, else splits into cases on a_(lambda-1) and "
    "b_(lambda-1) and pins the next coefficient; scaling z -> cz with "
    "c^(lambda - p^(k-1)) in F_p* keeps the first nonzero free coefficient "
    "minimal in its orbit"
)

RELATIVE_NOTE = (
    "exhausted_none certifies nonexistence only over the searched fields "
    "F_(p^k) and relative to the stated normalization"
)


@dataclass(frozen=True)
class SearchTask:
    """Parameters of a search; the record is echoed in results and checkpoints."""

    mode: str
    p: int
    k: int
    m: int
    normalize: bool = True
    find_one: bool = False
    datum: tuple[int, ...] | None = None
    shards: int = 1

    def to_record(self) -> dict:
        return {
            "mode": self.mode,
            "p": self.p,
            "k": self.k,
            "m": self.m,
            "normalize": self.normalize,
            "find_one": self.find_one,
            "datum": list(self.datum) if self.datum is not None else None,
            "shards": self.shards,
        }


@dataclass(frozen=True)
class SearchResult:
    """Verdict of a search.

    Attributes:
        verdict: "found", "exhausted_none" or "skipped" (over the cost gate).
        witnesses: Pole tuples for hurwitz mode, (A, B) coefficient pairs
            for space_dim2 mode, in increasing candidate order.
        candidates: Number of candidates examined.
        estimate: Upper bound on candidates computed before searching.
        elapsed: Wall time in seconds, only when timings were requested.
    """

    task: SearchTask
    spec: FieldSpec
    verdict: str
    witnesses: tuple = ()
    candidates: int = 0
    estimate: int = 0
    elapsed: float | None = None
    note: str = ""

    def witness_records(self) -> list:
        spec = self.spec
        if self.task.mode == "hurwitz":
            return [[spec.element_record(x) for x in w] for w in self.witnesses]
        return [
            {"A": Polynomial(spec, a).to_record(), "B": Polynomial(spec, b).to_record()}
            for a, b in self.witnesses
        ]

    def to_record(self) -> dict:
        record = {
            "task": self.task.to_record(),
            "verdict": self.verdict,
            "witnesses": self.witness_records(),
            "candidates": self.candidates,
            "estimate": self.estimate,
            "note": self.note,
        }
        if self.elapsed is not None:
            record["elapsed"] = self.elapsed
        return record


def power_sums_vanish(spec: FieldSpec, xs, classes, m: int) -> bool:
    """Check sum h_i x_i^l = 0 for 1 <= l <= m-1 on encoded points."""
    for ell in range(1, m):
        total = 0
        for x, h in zip(xs, classes):
            total = spec.add(total, spec.mul(spec.from_int(h), spec.pow(x, ell)))
        if total:
            return False
    return True


def _revalidate_hurwitz(spec: FieldSpec, xs, classes, m: int) -> None:
    omega = log_derivative_from_roots(spec, [FieldElement(spec, x) for x in xs], classes)
    if (
        omega.denominator.degree != m + 1
        or order_at_infinity(omega) != m - 1
        or not is_logarithmic(omega)
        or not power_sums_vanish(spec, xs, classes, m)
    ):
        raise InternalInconsistencyError(f"Hurwitz witness {xs} does not revalidate")


def hurwitz_search(p: int, k: int, datum, find_one: bool = False, timings: bool = False) -> SearchResult:
    """Search F_{p^k} for distinct x_0..x_m solving sum h_i x_i^l = 0, 1 <= l <= m-1.

    The system is invariant under z -> cz + s, so x_0 = 0 and x_1 = 1 are
    fixed and the remaining points range over ordered tuples of distinct
    elements outside {0, 1}.

    Args:
        p: Characteristic.
        k: Extension degree.
        datum: A HurwitzDatum or a tuple of classes h_0..h_m.
        find_one: Stop at the first witness.
        timings: Record the elapsed time.

    Returns:
        A SearchResult whose witnesses are tuples of encoded points.
    """
    if not isinstance(datum, HurwitzDatum):
        datum = HurwitzDatum(p, tuple(datum))
    if datum.p != p:
        raise PreconditionError(f"Datum for p = {datum.p} used with p = {p}")
    m = datum.m
    if m < 1 or m % p == 0:
        raise PreconditionError(f"m = {m} must be positive and prime to p = {p}")
    start = time.perf_counter()
    spec = field_spec(p, k)
    classes = datum.classes
    task = SearchTask("hurwitz", p, k, m, find_one=find_one, datum=classes)
    weights = [spec.from_int(h) for h in classes]
    powers = [[spec.pow(x, ell) for ell in range(1, m)] for x in range(spec.q)]
    estimate = int(np.prod([spec.q - 2 - i for i in range(m - 1)])) if m + 1 <= spec.q else 0
    witnesses, candidates = [], 0
    for tail in itertools.permutations(range(2, spec.q), m - 1):
        candidates += 1
        xs = (0, 1) + tail
        solved = True
        for ell in range(m - 1):
            total = 0
            for x, w in zip(xs, weights):
                total = spec.add(total, spec.mul(w, powers[x][ell]))
            if total:
                solved = False
                break
        if solved:
            _revalidate_hurwitz(spec, xs, classes, m)
            witnesses.append(xs)
            if find_one:
                break
    logger.info("hurwitz search p=%d k=%d datum=%s: %d witnesses", p, k, classes, len(witnesses))
    return SearchResult(
        task,
        spec,
        "found" if witnesses else "exhausted_none",
        tuple(witnesses),
        candidates,
        estimate,
        time.perf_counter() - start if timings else None,
        "points normalized to x_0 = 0, x_1 = 1",
    )


@dataclass(frozen=True)
class _Block:
    """A unit of work: a leading pair and one coefficient domain per free position."""

    index: int
    leading: tuple[int, int]
    domains: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return int(np.prod([len(d) for d in self.domains]))


def _leading_pairs(spec: FieldSpec, normalize: bool) -> list[tuple[int, int]]:
    """F_p-independent leading pairs (a_lambda, b_lambda).

    Normalized, one basis per 2-dimensional subspace: its least nonzero
    element and the least element off that line.
    """
    p, q = spec.p, spec.q

    def line(x: int) -> set[int]:
        return {spec.mul(j, x) for j in range(p)}

    if not normalize:
        return [(x, y) for x in range(1, q) for y in range(1, q) if y not in line(x)]
    pairs, seen = [], set()
    for x in range(1, q):
        x_line = line(x)
        for y in range(x + 1, q):
            if y in x_line:
                continue
            span = frozenset(spec.add(spec.mul(i, x), spec.mul(j, y)) for i in range(p) for j in range(p))
            if span not in seen:
                seen.add(span)
                pairs.append((x, y))
    return pairs


def _translation_cases(p: int, lam: int) -> list[dict]:
    """Constraints ("zero" or "nonzero") per position after normalizing z -> z + s."""
    if lam % p:
        return [{("a", lam - 1): "zero"}]
    if p == 2:
        return [{}]
    return [
        {("a", lam - 1): "nonzero", ("a", lam - 2): "zero"},
        {("a", lam - 1): "zero", ("b", lam - 1): "nonzero", ("b", lam - 2): "zero"},
        {("a", lam - 1): "zero", ("b", lam - 1): "zero"},
    ]


@lru_cache(maxsize=8)
def _space_plan(spec: FieldSpec, lam: int, normalize: bool):
    """Positions in scan order and the list of blocks, identical in every process."""
    positions = tuple([("a", i) for i in range(lam - 1, -1, -1)] + [("b", i) for i in range(lam - 1, -1, -1)])
    full, nonzero = tuple(range(spec.q)), tuple(range(1, spec.q))
    cases = _translation_cases(spec.p, lam) if normalize else [{}]
    blocks = []
    for pair in _leading_pairs(spec, normalize):
        for case in cases:
            domains = [
                {"zero": (0,), "nonzero": nonzero}.get(case.get(position), full)
                for position in positions
            ]
            split = next((i for i, d in enumerate(domains) if len(d) > 1), None)
            if split is None:
                blocks.append(_Block(len(blocks), pair, tuple(domains)))
                continue
            for value in domains[split]:
                block_domains = list(domains)
                block_domains[split] = (value,)
                blocks.append(_Block(len(blocks), pair, tuple(block_domains)))
    return positions, tuple(blocks)


@lru_cache(maxsize=8)
def _scaling_multipliers(spec: FieldSpec, lam: int) -> dict[int, tuple[int, ...]]:
    """Multipliers c^(i - lambda) acting on degree i, c ranging over the scaling group."""
    exponent = lam - spec.p ** (spec.k - 1)
    group = [c for c in range(1, spec.q) if spec.pow(c, exponent) < spec.p]
    return {i: tuple(sorted({spec.pow(c, i - lam) for c in group})) for i in range(lam)}


def _orbit_minimal(spec: FieldSpec, positions, values, multipliers) -> bool:
    for (_, degree), value in zip(positions, values):
        if value:
            return value == min(spec.mul(s, value) for s in multipliers[degree])
    return True


def _assemble(leading, positions, values, lam: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    a, b = [0] * (lam + 1), [0] * (lam + 1)
    a[lam], b[lam] = leading
    for (which, degree), value in zip(positions, values):
        (a if which == "a" else b)[degree] = value
    return tuple(a), tuple(b)


def _passes_congruence(spec: FieldSpec, a, b) -> bool:
    """(f')^(p-1) = 1 mod f for f = A^p - A B^(p-1)."""
    p = spec.p
    f = psub(spec, pfrobenius(spec, a), pmul(spec, a, ppow(spec, b, p - 1)))
    derivative = pderiv(spec, f)
    if not derivative:
        return False
    return ppowmod(spec, derivative, p - 1, f) == (1,)


def _run_space_shard(args) -> dict:
    """Search the blocks whose index is congruent to shard mod shards."""
    p, k, modulus, m, normalize, find_one, shard, shards = args
    spec = field_spec(p, k, modulus)
    lam = (m + 1) // p
    positions, blocks = _space_plan(spec, lam, normalize)
    multipliers = _scaling_multipliers(spec, lam) if normalize else None
    candidates, witnesses = 0, []
    for block in blocks[shard::shards]:
        for inner, values in enumerate(itertools.product(*block.domains)):
            if multipliers is not None and not _orbit_minimal(spec, positions, values, multipliers):
                continue
            candidates += 1
            a, b = _assemble(block.leading, positions, values, lam)
            if not _passes_congruence(spec, a, b):
                continue
            if forms_from_pair(Polynomial(spec, a), Polynomial(spec, b)).logarithmic:
                witnesses.append([block.index, inner, list(a), list(b)])
                if find_one:
                    return {"candidates": candidates, "witnesses": witnesses}
    return {"candidates": candidates, "witnesses": witnesses}


def space_search_estimate(p: int, k: int, m: int, normalize: bool = True) -> int:
    """Number of coefficient vectors before the orbit filter."""
    spec = field_spec(p, k)
    _, blocks = _space_plan(spec, (m + 1) // p, normalize)
    return sum(block.size for block in blocks)


def _load_checkpoint(path: Path, task_record: dict) -> dict[int, dict]:
    if not path.exists():
        return {}
    data = json.loads(path.read_text())
    if data.get("task") != task_record:
        logger.warning("checkpoint %s belongs to another search; starting over", path)
        return {}
    return {int(shard): outcome for shard, outcome in data["completed"].items()}


def _save_checkpoint(path: Path, task_record: dict, completed: dict[int, dict]) -> None:
    partial = path.with_name(path.name + ".partial")
    partial.write_text(
        json.dumps(
            {"task": task_record, "completed": {str(s): o for s, o in completed.items()}},
            sort_keys=True,
        )
    )
    os.replace(partial, path)


def space_search_dim2(
    p: int,
    k: int,
    m: int,
    normalize: bool = True,
    find_one: bool = False,
    jobs: int = 1,
    shards: int = DEFAULT_SHARDS,
    checkpoint: str | Path | None = None,
    long_run: bool = False,
    long_run_threshold: int = LONG_RUN_THRESHOLD,
    timings: bool = False,
) -> SearchResult:
    """Search pairs (A, B) of degree (m+1)/p spanning an L_{m+1,2} over F_{p^k}.

    Each candidate goes through the congruence (f')^(p-1) = 1 mod f on
    f = A^p - A B^(p-1), then the Cartier test on both forms A dz/M and
    B dz/M. Witnesses are revalidated with validate_space.

    Args:
        p: Characteristic.
        k: Extension degree.
        m: Target space L_{m+1,2}; p must divide m+1.
        normalize: Apply the affine and GL_2(F_p) normalization.
        find_one: Each shard stops at its first witness; the earliest
            witness overall is kept.
        jobs: Worker processes.
        shards: Number of shards of the coefficient space.
        checkpoint: JSON file recording completed shards; a rerun with the
            same task resumes from it.
        long_run: Allow searches above long_run_threshold candidates.
        long_run_threshold: Cost gate on the candidate estimate.
        timings: Record the elapsed time.

    Returns:
        A SearchResult with (A, B) coefficient tuples as witnesses.
    """
    if (m + 1) % p or m < 1:
        raise PreconditionError(f"m+1 = {m + 1} must be a positive multiple of p = {p}")
    if shards < 1 or jobs < 1:
        raise PreconditionError("shards and jobs must be positive")
    start = time.perf_counter()
    spec = field_spec(p, k)
    task = SearchTask("space_dim2", p, k, m, normalize, find_one, shards=shards)
    note = NORMALIZATION_NOTE if normalize else "unnormalized"
    estimate = space_search_estimate(p, k, m, normalize)
    if estimate > long_run_threshold and not long_run:
        logger.warning(
            "search p=%d k=%d m+1=%d needs about %d candidates; skipped without long_run",
            p, k, m + 1, estimate,
        )
        return SearchResult(task, spec, "skipped", (), 0, estimate, None, note)

    task_record = task.to_record()
    path = Path(checkpoint) if checkpoint is not None else None
    completed = _load_checkpoint(path, task_record) if path is not None else {}
    pending = [s for s in range(shards) if s not in completed]
    arguments = {
        s: (p, k, spec.modulus, m, normalize, find_one, s, shards) for s in pending
    }

    def record(shard: int, outcome: dict) -> None:
        completed[shard] = outcome
        logger.debug("shard %d/%d: %d candidates", shard + 1, shards, outcome["candidates"])
        if path is not None:
            _save_checkpoint(path, task_record, completed)

    if jobs > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            futures = {executor.submit(_run_space_shard, arguments[s]): s for s in pending}
            for future in as_completed(futures):
                record(futures[future], future.result())
    else:
        for s in pending:
            record(s, _run_space_shard(arguments[s]))

    candidates = sum(completed[s]["candidates"] for s in range(shards))
    found = sorted(
        (tuple(w[:2]), tuple(w[2]), tuple(w[3])) for s in range(shards) for w in completed[s]["witnesses"]
    )
    if find_one:
        found = found[:1]
    witnesses = tuple((a, b) for _, a, b in found)
    for a, b in witnesses:
        pair = forms_from_pair(Polynomial(spec, a), Polynomial(spec, b))
        report = validate_space(LogFormSpace(spec, m, (pair.omega_1, pair.omega_2)))
        if not report.valid:
            raise InternalInconsistencyError(
                f"Witness A={a}, B={b} fails {report.criterion}: {report.detail}"
            )
    logger.info(
        "space search p=%d k=%d m+1=%d: %d candidates, %d witnesses",
        p, k, m + 1, candidates, len(witnesses),
    )
    return SearchResult(
        task,
        spec,
        "found" if witnesses else "exhausted_none",
        witnesses,
        candidates,
        estimate,
        time.perf_counter() - start if timings else None,
        note,
    )


@dataclass(frozen=True)
class SmallConductorReport:
    """Verdicts of the dimension 2 search for m+1 in {p, 2p, 3p}.

    Attributes:
        table: One row per (m+1, k) with verdict and candidate counts.
        summary: Per m+1, "found" if some field has a witness, "skipped" if
            a field was skipped and none had a witness, else "exhausted_none".
    """

    p: int
    k_max: int
    table: pd.DataFrame = field(repr=False)
    summary: dict[int, str]
    note: str = RELATIVE_NOTE

    def to_record(self) -> dict:
        return {
            "p": self.p,
            "k_max": self.k_max,
            "rows": self.table.to_dict(orient="records"),
            "summary": {str(key): value for key, value in self.summary.items()},
            "note": self.note,
            "normalization": NORMALIZATION_NOTE,
        }


def verify_small_conductors(
    p: int,
    k_max: int,
    long_run: bool = False,
    jobs: int = 1,
    long_run_threshold: int = LONG_RUN_THRESHOLD,
) -> SmallConductorReport:
    """Run the dimension 2 search for m+1 = p, 2p, 3p over F_{p^k}, k = 1..k_max.

    Args:
        p: An odd prime; 3 and 5 are the sizes the defaults are tuned for.
        k_max: Largest extension degree searched.
        long_run: Let searches above the cost gate run.
        jobs: Worker processes per search.
        long_run_threshold: Cost gate on the candidate estimate.

    Returns:
        A SmallConductorReport.
    """
    if p == 2:
        raise PreconditionError("Small conductor verification is for odd p")
    if p not in (3, 5):
        logger.warning("p = %d is outside the desk scale; searches may be long", p)
    if k_max < 1:
        raise PreconditionError(f"k_max = {k_max} must be at least 1")
    rows = []
    for multiple in (1, 2, 3):
        for k in range(1, k_max + 1):
            result = space_search_dim2(
                p,
                k,
                multiple * p - 1,
                find_one=True,
                jobs=jobs,
                long_run=long_run,
                long_run_threshold=long_run_threshold,
            )
            rows.append(
                {
                    "m_plus_1": multiple * p,
                    "k": k,
                    "verdict": result.verdict,
                    "candidates": result.candidates,
                    "estimate": result.estimate,
                }
            )
    table = pd.DataFrame(rows)
    summary = {}
    for m_plus_1, group in table.groupby("m_plus_1"):
        verdicts = set(group["verdict"])
        if "found" in verdicts:
            summary[int(m_plus_1)] = "found"
        elif "skipped" in verdicts:
            summary[int(m_plus_1)] = "skipped"
        else:
            summary[int(m_plus_1)] = "exhausted_none"
    return SmallConductorReport(p, k_max, table, summary)
