"""Experiment driver: configs, result rows, CSV emission, determinism hash."""

from __future__ import annotations

import hashlib
import statistics
from dataclasses import dataclass, fields, replace

from ..core import (
    AlgoReport,
    QueryLedger,
    Solution,
    SubmodularOracle,
    normalize,
    upper_bound_opt,
)
from ..distributed import MpcConfig, distributed_sieve_plus_max
from ..errors import BudgetExceeded, ParseError
from ..objectives import (
    CoverageObjective,
    MovieObjective,
    coverage_costs,
    movie_costs,
)
from ..offline import greedy, greedy_or_max, greedy_plus_max, partial_enum_greedy
from ..streaming import StreamSource, estimate_lambda, sieve, sieve_or_max, sieve_plus_max
from .datasets import gnp_adjacency, ingest_movielens, ingest_snap, preferential_adjacency

KNOWN_ALGORITHMS = (
    "greedy",
    "greedy_or_max",
    "greedy_plus_max",
    "partial_enum_greedy",
    "sieve",
    "sieve_or_max",
    "sieve_plus_max",
    "distributed_sieve_plus_max",
)
KNOWN_KINDS = ("snap-edgelist", "movielens-csv", "synthetic")


@dataclass
class ExperimentConfig:
    """One benchmark run: a dataset, an algorithm list, and a K sweep."""

    dataset: str
    kind: str
    algorithms: list[str]
    k_values: list[float]
    epsilon: float = 0.1
    depth: int = 1
    seed: int = 0
    budget: int = 10 ** 9
    output: str = "results.csv"
    iterations: int = 1
    max_movies: int | None = None
    max_users: int | None = None
    model: str = "gnp"
    n: int = 100
    p: float = 0.1
    attach: int = 3

    def validate(self) -> None:
        if self.kind not in KNOWN_KINDS:
            raise ValueError(f"unknown dataset kind {self.kind!r}")
        for a in self.algorithms:
            if a not in KNOWN_ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}")
        if not all(k > 0 for k in self.k_values):
            raise ValueError("K values must be positive")
        if self.budget <= 0:
            raise ValueError("query budget must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        """Flat ``key = value`` lines; '#' comments and blanks are skipped.

        Lists (``algorithms``, ``k``) are comma-separated.
        """
        raw: dict[str, str] = {}
        with open(path) as fh:
            for no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ParseError("expected key = value", line_no=no)
                key, _, value = line.partition("=")
                raw[key.strip()] = value.strip()

        def take(key, conv, default):
            return conv(raw.pop(key)) if key in raw else default

        def int_or_none(s):
            return None if s.lower() in ("", "none") else int(s)

        cfg = cls(
            dataset=raw.pop("dataset", ""),
            kind=raw.pop("kind", "synthetic"),
            algorithms=[a.strip() for a in raw.pop("algorithms", "").split(",") if a.strip()],
            k_values=[float(k) for k in raw.pop("k", "").split(",") if k.strip()],
            epsilon=take("epsilon", float, 0.1),
            depth=take("depth", int, 1),
            seed=take("seed", int, 0),
            budget=take("budget", int, 10 ** 9),
            output=raw.pop("output", "results.csv"),
            iterations=take("iterations", int, 1),
            max_movies=take("max_movies", int_or_none, None),
            max_users=take("max_users", int_or_none, None),
            model=raw.pop("model", "gnp"),
            n=take("n", int, 100),
            p=take("p", float, 0.1),
            attach=take("attach", int, 3),
        )
        if raw:
            raise ValueError(f"unknown config keys: {sorted(raw)}")
        cfg.validate()
        return cfg


@dataclass
class ResultRow:
    """One (algorithm, K) cell.  Aborted cells leave the value fields empty
    and carry a non-ok status."""

    dataset: str
    algorithm: str
    k: float
    value: float | None
    upper_bound: float | None
    approx_ratio: float | None
    queries: int
    passes: int
    rounds: int
    wall_time_ms: float
    value_std: float | None = 0.0
    status: str = "ok"


_COLUMNS = [f.name for f in fields(ResultRow)]
_HEADER = ",".join("K" if c == "k" else c for c in _COLUMNS)


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def row_lines(rows) -> list[str]:
    lines = [_HEADER]
    for row in rows:
        lines.append(",".join(_cell(getattr(row, c)) for c in _COLUMNS))
    return lines


def write_csv(rows, path) -> None:
    with open(path, "w") as fh:
        fh.write("\n".join(row_lines(rows)) + "\n")


def parse_csv(path) -> list[ResultRow]:
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or lines[0] != _HEADER:
        raise ParseError("unexpected result header", line_no=1)
    out = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(_COLUMNS):
            raise ParseError("wrong column count", line_no=None)
        kw = {}
        for col, part in zip(_COLUMNS, parts):
            if col in ("dataset", "algorithm", "status"):
                kw[col] = part
            elif col in ("queries", "passes", "rounds"):
                kw[col] = int(part)
            else:
                kw[col] = None if part == "" else float(part)
        out.append(ResultRow(**kw))
    return out


def csv_hash(rows) -> str:
    """Reproducibility digest: the CSV bytes with wall_time_ms blanked."""
    masked = [replace(row, wall_time_ms=0.0) for row in rows]
    return hashlib.sha256("\n".join(row_lines(masked)).encode()).hexdigest()


def build_dataset(cfg: ExperimentConfig):
    """Materialize the configured dataset: (label, objective, raw elements)."""
    if cfg.kind == "snap-edgelist":
        graph = ingest_snap(cfg.dataset)
        objective = CoverageObjective(graph.adjacency)
        costs = coverage_costs(graph.adjacency)
        label = cfg.dataset
    elif cfg.kind == "movielens-csv":
        data = ingest_movielens(cfg.dataset, cfg.max_movies, cfg.max_users)
        objective = MovieObjective(data.vectors)
        costs = movie_costs(objective)
        label = cfg.dataset
    else:
        if cfg.model == "gnp":
            adjacency = gnp_adjacency(cfg.n, cfg.p, cfg.seed)
        elif cfg.model == "pa":
            adjacency = preferential_adjacency(cfg.n, cfg.attach, cfg.seed)
        else:
            raise ValueError(f"unknown synthetic model {cfg.model!r}")
        objective = CoverageObjective(adjacency)
        costs = coverage_costs(adjacency)
        label = cfg.dataset or f"synthetic-{cfg.model}-n{cfg.n}-seed{cfg.seed}"
    raw = sorted(costs.items())
    return label, objective, raw


def _degenerate(name, oracle, ledger):
    # a zero estimate certifies that no element adds value
    value = oracle.evaluate((), ledger)
    return AlgoReport(algorithm=name, solution=Solution(frozenset(), value, 0.0),
                      queries=ledger.query_count)


def _dispatch(name, instance, oracle, stream, ledger, cfg, seed):
    if name == "greedy":
        return greedy(instance, oracle, ledger).report
    if name == "greedy_or_max":
        return greedy_or_max(instance, oracle, ledger).report
    if name == "greedy_plus_max":
        return greedy_plus_max(instance, oracle, ledger).report
    if name == "partial_enum_greedy":
        return partial_enum_greedy(instance, oracle, cfg.depth, ledger=ledger).report
    if name == "distributed_sieve_plus_max":
        est = estimate_lambda(StreamSource.from_instance(instance),
                              instance.capacity, oracle, ledger=ledger)
        if est.lam <= 0:
            return _degenerate(name, oracle, ledger)
        mpc = MpcConfig.for_instance(instance, seed=seed)
        return distributed_sieve_plus_max(
            instance, oracle, est.lam, est.alpha, cfg.epsilon, mpc, ledger).report
    est = estimate_lambda(stream, instance.capacity, oracle, ledger=ledger)
    if est.lam <= 0:
        return _degenerate(name, oracle, ledger)
    runner = {"sieve": sieve, "sieve_or_max": sieve_or_max,
              "sieve_plus_max": sieve_plus_max}[name]
    return runner(stream, instance.capacity, oracle, est.lam, est.alpha,
                  cfg.epsilon, ledger=ledger,
                  density_cap=est.max_singleton_density)


def run_suite(cfg: ExperimentConfig, write: bool = True):
    """Run every (algorithm, K) cell and return the rows in config order.

    Each cell (and each iteration inside it) gets a fresh budgeted ledger
    and a fresh stream.  The upper bound comes from one greedy trace per K
    on a separate unbudgeted ledger.  A cell that exhausts its budget is
    flagged and the suite moves on.
    """
    cfg.validate()
    label, objective, raw = build_dataset(cfg)
    rows = run_cells(label, objective, raw, cfg)
    if write:
        write_csv(rows, cfg.output)
    return rows


def run_cells(label, objective, raw, cfg: ExperimentConfig):
    """Drive the (algorithm, K) grid over an already materialized dataset."""
    rows: list[ResultRow] = []
    ub_cache: dict[float, float] = {}

    for k in cfg.k_values:
        instance = normalize(raw, k)
        oracle = SubmodularOracle(instance, objective)
        if k not in ub_cache:
            side = QueryLedger()
            trace = greedy(instance, oracle, side).report.trace
            ub_cache[k] = upper_bound_opt(instance, oracle, trace)
        ub = ub_cache[k]

        for name in cfg.algorithms:
            values: list[float] = []
            queries = passes = rounds = 0
            wall_ms: list[float] = []
            status = "ok"
            for it in range(cfg.iterations):
                ledger = QueryLedger(budget=cfg.budget)
                stream = StreamSource.from_instance(instance)
                try:
                    report = _dispatch(name, instance, oracle, stream, ledger,
                                       cfg, cfg.seed + it)
                except BudgetExceeded:
                    status = "budget_exceeded"
                    queries = ledger.query_count
                    break
                values.append(report.solution.value)
                wall_ms.append(report.wall_time * 1000.0)
                if it == 0:
                    queries = ledger.query_count
                    passes = stream.pass_count
                    rounds = report.rounds
            if status != "ok":
                rows.append(ResultRow(label, name, float(k), None, None, None,
                                      queries, 0, 0, 0.0, None, status))
                continue
            value = statistics.fmean(values)
            std = statistics.stdev(values) if len(values) > 1 else 0.0
            ratio = value / ub if ub > 0 else 0.0
            rows.append(ResultRow(label, name, float(k), value, ub, ratio,
                                  queries, passes, rounds,
                                  statistics.fmean(wall_ms), std))
    return rows
