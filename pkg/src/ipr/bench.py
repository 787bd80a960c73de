"""Benchmark harness: single runs with traces, suites, performance profiles."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .problems import ProblemSpec, builtin_set, registry
from .solver import SolveReport, SolverConfig, Status, TraceRow, solve

METRICS = ("iterations", "f_evals", "grad_evals", "wall_time")
TRACE_COLUMNS = ("k", "mu", "x", "s", "f", "v", "phi", "E")
# statuses beyond the solver's own, for exceptions escaping a single solve
ERROR_STATUS = "error"


class ProfileError(ValueError):
    pass


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


# --- traces -----------------------------------------------------------------

def trace_header(n: int, m_ineq: int) -> List[str]:
    cols = ["k", "mu"]
    cols += [f"x{i + 1}" for i in range(n)]
    cols += [f"s{j + 1}" for j in range(m_ineq)]
    return cols + ["f", "v", "phi", "E"]


def trace_to_csv(trace: Sequence[TraceRow]) -> str:
    """Reference-trace columns; vector entries x and s spread over x1.., s1.. columns."""
    n = len(trace[0].x) if trace else 0
    mi = len(trace[0].s) if trace else 0
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(trace_header(n, mi))
    for r in trace:
        w.writerow([str(r.k), _fmt(r.mu), *map(_fmt, r.x), *map(_fmt, r.s),
                    _fmt(r.f), _fmt(r.v), _fmt(r.phi), _fmt(r.E)])
    return buf.getvalue()


def parse_trace_csv(text: str) -> List[dict]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        return []
    head = rows[0]
    xi = [i for i, c in enumerate(head) if c.startswith("x")]
    si = [i for i, c in enumerate(head) if c.startswith("s")]
    out = []
    for row in rows[1:]:
        rec = {c: float(v) for c, v in zip(head, row)}
        out.append({
            "k": int(row[0]), "mu": rec["mu"],
            "x": [float(row[i]) for i in xi], "s": [float(row[i]) for i in si],
            "f": rec["f"], "v": rec["v"], "phi": rec["phi"], "E": rec["E"],
        })
    return out


def trace_to_json(report: SolveReport, problem: str = "") -> str:
    doc = {
        "problem": problem,
        "status": report.status.value,
        "message": report.message,
        "counters": asdict(report.counters),
        "columns": list(TRACE_COLUMNS),
        "rows": [{c: getattr(r, c) for c in TRACE_COLUMNS} for r in report.trace],
    }
    return json.dumps(doc, indent=2)


# --- single runs and suites ---------------------------------------------------

def resolve_problem(name: str, seed: Optional[int] = None) -> ProblemSpec:
    """Registry name, or ``lp`` meaning ``lp-<seed>``, or a path to an LP file."""
    if name == "lp":
        return registry(f"lp-{0 if seed is None else seed}")
    if os.path.isfile(name):
        from .problems import lp_from_file, lp_problem

        return lp_problem(lp_from_file(name), name=os.path.basename(name))
    return registry(name)


def run_single(name: str, cfg: Optional[SolverConfig] = None, lp_reduced: bool = False,
               seed: Optional[int] = None) -> SolveReport:
    problem = resolve_problem(name, seed)
    return solve(problem, cfg=cfg or SolverConfig(), lp_reduced=lp_reduced)


@dataclass
class SuiteRecord:
    name: str
    status: str
    iterations: int
    f_evals: int
    grad_evals: int
    wall_time: float
    final_E: float
    final_f: float
    message: str = ""

    @property
    def solved(self) -> bool:
        return self.status in (Status.KKT_SOLVED.value, Status.GUARD_CONVERGED.value)


@dataclass
class SuiteResult:
    label: str
    records: List[SuiteRecord] = field(default_factory=list)
    config: Dict[str, float] = field(default_factory=dict)

    @property
    def names(self) -> List[str]:
        return [r.name for r in self.records]

    def count(self, status: str) -> int:
        return sum(r.status == status for r in self.records)

    def to_dict(self) -> dict:
        return {"label": self.label, "config": self.config,
                "records": [asdict(r) for r in self.records]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, doc: dict) -> "SuiteResult":
        try:
            recs = [SuiteRecord(**r) for r in doc["records"]]
        except (KeyError, TypeError) as exc:
            raise ProfileError(f"malformed suite result document: {exc}") from None
        return cls(label=str(doc.get("label", "")), records=recs, config=dict(doc.get("config", {})))


def load_suite_result(path) -> SuiteResult:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ProfileError(f"{path}: {exc}") from None
    return SuiteResult.from_dict(doc)


def suite_names(spec: str, seed: Optional[int] = None) -> List[str]:
    """Builtin set name (``hs``, ``all``, ``lp<N>``) or a file of problem names."""
    if os.path.isfile(spec):
        names = []
        with open(spec, "r", encoding="utf-8") as fh:
            for raw in fh:
                text = raw.split("#", 1)[0].strip()
                if text:
                    names.extend(text.split())
        return names
    names = builtin_set(spec)
    if seed and spec.startswith("lp"):
        names = [f"lp-{int(n[3:]) + seed}" for n in names]
    return names


def _threads(n_jobs: int) -> int:
    env = os.environ.get("IPR_NUM_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            raise ValueError(f"IPR_NUM_THREADS must be a positive integer, got {env!r}") from None
    return max(1, min(cap, n_jobs))


def _record(name: str, problem: ProblemSpec, cfg: SolverConfig, lp_reduced: bool) -> SuiteRecord:
    try:
        rep = solve(problem, cfg=cfg, lp_reduced=lp_reduced and problem.is_lp)
    except Exception as exc:  # recorded, never aborts the suite
        return SuiteRecord(name, ERROR_STATUS, 0, 0, 0, 0.0, math.nan, math.nan, str(exc))
    c, fin = rep.counters, rep.final
    return SuiteRecord(name, rep.status.value, c.iterations, c.f_evals, c.grad_evals,
                       c.wall_time, fin.E, fin.f, rep.message)


def run_suite(names: Sequence[str], cfg: Optional[SolverConfig] = None, lp_reduced: bool = False,
              label: str = "ipr", threads: Optional[int] = None, seed: Optional[int] = None) -> SuiteResult:
    """Solve every problem with a shared config; records come back in input order.

    Unknown names raise before any solve starts.
    """
    names = list(names)
    if not names:
        raise ValueError("empty problem list")
    cfg = cfg or SolverConfig()
    problems = [resolve_problem(n, seed) for n in names]
    workers = threads if threads is not None else _threads(len(names))
    jobs = list(zip(names, problems))
    if workers <= 1:
        records = [_record(n, p, cfg, lp_reduced) for n, p in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda job: _record(job[0], job[1], cfg, lp_reduced), jobs))
    return SuiteResult(label=label, records=records, config=asdict(cfg))


# --- performance profiles -----------------------------------------------------

@dataclass(frozen=True)
class ProfileCurve:
    label: str
    points: List[tuple]

    def at(self, tau: float) -> float:
        """Step-function value: fraction of problems with ratio <= tau."""
        frac = 0.0
        for t, f in self.points:
            if t <= tau:
                frac = f
            else:
                break
        return frac


def profile_ratios(results: Sequence[SuiteResult], metric: str) -> np.ndarray:
    """Matrix r[p, s] of metric ratios to the best solver; failures are inf."""
    if metric not in METRICS:
        raise ProfileError(f"unknown metric {metric!r}; choose from {', '.join(METRICS)}")
    if len(results) < 2:
        raise ProfileError("a performance profile needs at least two result sets")
    base = results[0].names
    if len(set(base)) != len(base):
        raise ProfileError(f"result set {results[0].label!r} lists a problem twice")
    for res in results[1:]:
        if sorted(res.names) != sorted(base):
            raise ProfileError(
                f"problem lists differ between {results[0].label!r} and {res.label!r}"
            )
    lookup = [{r.name: r for r in res.records} for res in results]
    T = np.full((len(base), len(results)), np.inf)
    for i, name in enumerate(base):
        for j, table in enumerate(lookup):
            rec = table[name]
            if rec.solved:
                T[i, j] = float(getattr(rec, metric))
    R = np.full_like(T, np.inf)
    for i in range(T.shape[0]):
        best = np.min(T[i])
        if not np.isfinite(best):
            continue
        for j in range(T.shape[1]):
            if T[i, j] == best:
                R[i, j] = 1.0
            elif np.isfinite(T[i, j]) and best > 0:
                R[i, j] = T[i, j] / best
    return R


def performance_profile(results: Sequence[SuiteResult], metric: str) -> List[ProfileCurve]:
    """Dolan-More profiles evaluated at every finite ratio breakpoint (and 1)."""
    R = profile_ratios(results, metric)
    n_prob = R.shape[0]
    finite = R[np.isfinite(R)]
    taus = sorted({1.0, *finite.tolist()})
    curves = []
    for j, res in enumerate(results):
        col = R[:, j]
        pts = [(t, float(np.count_nonzero(col <= t)) / n_prob if n_prob else 0.0) for t in taus]
        curves.append(ProfileCurve(label=res.label, points=pts))
    return curves


def profile_to_csv(curves: Sequence[ProfileCurve]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["solver", "tau", "fraction"])
    for c in curves:
        for t, f in c.points:
            w.writerow([c.label, _fmt(t), _fmt(f)])
    return buf.getvalue()
