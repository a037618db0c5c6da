"""Monte Carlo harness for coverage-rate / average-objective studies.

Runs the configured screening methods over seeded repetitions of a
generative model (or a fixed two-level design), collects per-repetition
records for audit, and aggregates two criteria per method: the coverage
rate (fraction of repetitions whose selected set contains the true
support) and the average objective (mean final residual sum of squares).
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .core import (
    IterationOptions,
    SparseCoef,
    multi_start_foss_fs,
    multi_start_window,
    rss,
    run,
)
from .initializers import forward_stepwise, isis, sis
from .numerics import StandardizedProblem, standardize
from .simgen import (
    GenerativeModel,
    child_stream,
    gen_equicorrelated_design,
    gen_response,
    kronecker_design,
    load_base_design,
    sylvester_hadamard,
)

__all__ = [
    "ConfigError",
    "DesignSpec",
    "ExperimentConfig",
    "MethodOutcome",
    "MethodAggregate",
    "MethodTable",
    "RepetitionRecord",
    "ExperimentResult",
    "method_catalog",
    "config_from_dict",
    "config_to_dict",
    "run_method",
    "evaluate_repetition",
    "aggregate",
    "run_experiment",
    "write_repetition_records",
    "load_repetition_records",
    "aggregate_records",
    "write_method_table",
]

BASIC_METHODS = ("sis", "isis", "fs")

REPETITION_FIELDS = ("rep", "method", "covered", "rss", "iterations", "selected_indices")
AGGREGATE_FIELDS = ("method", "cr", "ao", "mean_iterations", "repetitions", "exclusions")


def method_catalog() -> tuple[str, ...]:
    """All recognized method identifiers."""
    derived = [f"{alg}-{base}" for alg in ("oss", "foss") for base in BASIC_METHODS]
    return BASIC_METHODS + tuple(derived)


class ConfigError(ValueError):
    """Configuration rejected; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"config key '{key}': {message}")
        self.key = key


@dataclass(frozen=True)
class DesignSpec:
    """Where the design matrix comes from: a generative family or a file."""

    kind: str = "equicorrelated"
    base_design_path: str | None = None
    hadamard_order: int | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    """One simulation cell: generative model, subset size, methods, seed."""

    model: GenerativeModel
    M: int
    repetitions: int
    methods: tuple[str, ...]
    design: DesignSpec = DesignSpec()
    rel_tol: float = 1e-10
    max_iter: int | None = None
    isis_batch: int | None = None

    @property
    def seed(self) -> int:
        return self.model.seed

    @property
    def true_support(self) -> tuple[int, ...]:
        return tuple(range(self.model.d))


@dataclass(frozen=True, eq=False)
class MethodOutcome:
    """One method's result on one repetition."""

    coef: SparseCoef
    rss: float
    iterations: int

    @property
    def selected(self) -> tuple[int, ...]:
        return tuple(int(j) for j in self.coef.active)


@dataclass(frozen=True)
class MethodAggregate:
    method: str
    cr: float
    ao: float
    mean_iterations: float
    repetitions: int
    exclusions: int


@dataclass(frozen=True)
class MethodTable:
    """Per-method coverage-rate and average-objective aggregates."""

    rows: tuple[MethodAggregate, ...]

    def row(self, method: str) -> MethodAggregate:
        for row in self.rows:
            if row.method == method:
                return row
        raise KeyError(method)


@dataclass(frozen=True)
class RepetitionRecord:
    """One audit row: what one method selected on one repetition."""

    rep: int
    method: str
    covered: int
    rss: float
    iterations: int
    selected: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    table: MethodTable
    records: tuple[RepetitionRecord, ...]
    exclusions: tuple[tuple[int, str], ...] = field(default_factory=tuple)


def _split_method(method: str) -> tuple[str | None, str]:
    name = method.lower()
    if name in BASIC_METHODS:
        return None, name
    for alg in ("oss", "foss"):
        prefix = alg + "-"
        if name.startswith(prefix) and name[len(prefix):] in BASIC_METHODS:
            return alg, name[len(prefix):]
    raise ValueError(f"unknown method {method!r} (expected one of {method_catalog()})")


def _repetition_methods(
    problem: StandardizedProblem,
    methods,
    M: int,
    rel_tol: float | None = None,
    max_iter: int | None = None,
    isis_batch: int | None = None,
) -> dict[str, MethodOutcome]:
    """Run every configured method on one standardized problem.

    Initializers are computed once and shared between a basic method and
    its iterated counterparts, so the iterated runs start from exactly
    the submodel estimates the basic method reports.
    """
    if rel_tol is None:
        rel_tol = 1e-10
    parsed = [(m, *_split_method(m)) for m in methods]
    bases = {base for _, _, base in parsed}

    fs_size = 0
    if "fs" in bases:
        fs_size = M
        if any(alg == "foss" and base == "fs" for _, alg, base in parsed):
            fs_size = max(fs_size, multi_start_window(problem.n, problem.p, M)[1])
    inits: dict[str, SparseCoef] = {}
    if "sis" in bases:
        inits["sis"] = sis(problem, M)
    if "isis" in bases:
        inits["isis"] = isis(problem, M, batch=isis_batch)
    path = None
    if fs_size:
        path = forward_stepwise(problem, min(fs_size, min(problem.n - 1, problem.p)))
        inits["fs"] = path.coef_at(min(M, len(path.steps)))

    outcomes: dict[str, MethodOutcome] = {}
    for method, alg, base in parsed:
        if alg is None:
            coef = inits[base]
            outcomes[method] = MethodOutcome(coef, rss(problem, coef), 0)
        elif alg == "foss" and base == "fs":
            res = multi_start_foss_fs(
                problem, M, path, IterationOptions("foss", rel_tol, max_iter)
            )
            outcomes[method] = MethodOutcome(res.coef, res.final_rss, res.iterations)
        else:
            res = run(
                problem, inits[base], M, IterationOptions(alg, rel_tol, max_iter)
            )
            outcomes[method] = MethodOutcome(res.coef, res.final_rss, res.iterations)
    return outcomes


def run_method(
    problem: StandardizedProblem,
    method: str,
    M: int,
    rel_tol: float | None = None,
    max_iter: int | None = None,
    isis_batch: int | None = None,
) -> MethodOutcome:
    """Run a single method by name on an already-standardized problem."""
    return _repetition_methods(
        problem, [method], M, rel_tol=rel_tol, max_iter=max_iter, isis_batch=isis_batch
    )[method]


def _design_matrix(config: ExperimentConfig, rep_index: int) -> np.ndarray:
    design = config.design
    if design.kind == "equicorrelated":
        stream = child_stream(config.seed, rep_index, "design")
        return gen_equicorrelated_design(
            config.model.n, config.model.p, config.model.rho, stream
        )
    if design.kind == "kronecker":
        base = load_base_design(design.base_design_path)
        return kronecker_design(sylvester_hadamard(design.hadamard_order), base)
    raise ConfigError("design.kind", f"unknown design kind {design.kind!r}")


def evaluate_repetition(
    config: ExperimentConfig, rep_index: int
) -> dict[str, MethodOutcome]:
    """Generate one repetition's data and run every configured method on it.

    The design and the noise come from separate child streams of the
    master seed, so the same repetition index always reproduces the same
    data regardless of scheduling.
    """
    X = _design_matrix(config, rep_index)
    y = gen_response(
        X, config.model.true_model(), child_stream(config.seed, rep_index, "response")
    )
    problem = standardize(X, y)
    return _repetition_methods(
        problem,
        config.methods,
        config.M,
        rel_tol=config.rel_tol,
        max_iter=config.max_iter,
        isis_batch=config.isis_batch,
    )


def _columns_table(
    methods, per_method_rows: dict[str, tuple[list, list, list]], exclusions: int
) -> MethodTable:
    rows = []
    for method in methods:
        covered, rss_values, iters = per_method_rows[method]
        count = len(rss_values)
        rows.append(
            MethodAggregate(
                method=method,
                cr=sum(covered) / count,
                ao=float(np.mean(rss_values)),
                mean_iterations=float(np.mean(iters)),
                repetitions=count,
                exclusions=exclusions,
            )
        )
    return MethodTable(rows=tuple(rows))


def aggregate(results, true_support, exclusions: int = 0) -> MethodTable:
    """Aggregate per-repetition outcomes into a per-method table.

    The coverage rate is the exact count of repetitions whose selected
    set contains ``true_support``, divided by the number of repetitions;
    the average objective is the mean of the final residual sums of
    squares.
    """
    if not results:
        raise ValueError("no repetition results to aggregate")
    support = set(int(j) for j in true_support)
    methods = list(results[0].keys())
    per_method: dict[str, tuple[list, list, list]] = {m: ([], [], []) for m in methods}
    for outcome_map in results:
        for method in methods:
            outcome = outcome_map[method]
            per_method[method][0].append(int(support.issubset(outcome.selected)))
            per_method[method][1].append(outcome.rss)
            per_method[method][2].append(outcome.iterations)
    return _columns_table(methods, per_method, exclusions)


def _evaluate_safely(config: ExperimentConfig, rep_index: int):
    try:
        return rep_index, evaluate_repetition(config, rep_index), None
    except (ValueError, np.linalg.LinAlgError) as exc:
        return rep_index, None, f"{type(exc).__name__}: {exc}"


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Run all repetitions, aggregate, and keep per-repetition records.

    Repetitions are independent jobs keyed by their index; with
    ``workers > 1`` they run in a process pool.  Output is identical for
    any worker count because every repetition derives its own streams
    and the aggregation folds records in repetition order.
    """
    reps = range(config.repetitions)
    task = partial(_evaluate_safely, config)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            evaluated = list(pool.map(task, reps))
    else:
        evaluated = [task(r) for r in reps]

    support = set(config.true_support)
    records: list[RepetitionRecord] = []
    outcomes = []
    exclusions: list[tuple[int, str]] = []
    for rep_index, outcome_map, error in evaluated:
        if error is not None:
            exclusions.append((rep_index, error))
            continue
        outcomes.append(outcome_map)
        for method in config.methods:
            outcome = outcome_map[method]
            records.append(
                RepetitionRecord(
                    rep=rep_index,
                    method=method,
                    covered=int(support.issubset(outcome.selected)),
                    rss=outcome.rss,
                    iterations=outcome.iterations,
                    selected=outcome.selected,
                )
            )
    table = aggregate(outcomes, config.true_support, exclusions=len(exclusions))
    return ExperimentResult(
        table=table, records=tuple(records), exclusions=tuple(exclusions)
    )


def aggregate_records(records, exclusions: int = 0) -> MethodTable:
    """Rebuild the per-method table from persisted repetition records."""
    if not records:
        raise ValueError("no records to aggregate")
    methods = []
    per_method: dict[str, tuple[list, list, list]] = {}
    for record in records:
        if record.method not in per_method:
            methods.append(record.method)
            per_method[record.method] = ([], [], [])
        per_method[record.method][0].append(record.covered)
        per_method[record.method][1].append(record.rss)
        per_method[record.method][2].append(record.iterations)
    return _columns_table(methods, per_method, exclusions)


def write_repetition_records(path, records) -> None:
    """Persist audit records as CSV; selected indices are 1-based."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(REPETITION_FIELDS)
        for r in records:
            writer.writerow(
                [
                    r.rep,
                    r.method,
                    r.covered,
                    repr(r.rss),
                    r.iterations,
                    ";".join(str(j + 1) for j in r.selected),
                ]
            )


def load_repetition_records(path) -> tuple[RepetitionRecord, ...]:
    """Read back records written by :func:`write_repetition_records`."""
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            selected = tuple(
                int(tok) - 1 for tok in row["selected_indices"].split(";") if tok
            )
            records.append(
                RepetitionRecord(
                    rep=int(row["rep"]),
                    method=row["method"],
                    covered=int(row["covered"]),
                    rss=float(row["rss"]),
                    iterations=int(row["iterations"]),
                    selected=selected,
                )
            )
    return tuple(records)


def write_method_table(path, table: MethodTable) -> None:
    """Persist the aggregate table as CSV."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(AGGREGATE_FIELDS)
        for row in table.rows:
            writer.writerow(
                [
                    row.method,
                    repr(row.cr),
                    repr(row.ao),
                    repr(row.mean_iterations),
                    row.repetitions,
                    row.exclusions,
                ]
            )


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Validate a configuration mapping and build an ExperimentConfig.

    Raises ConfigError naming the offending key on any violation.  For
    file-based designs the matrix dimensions are resolved from the file
    and checked against ``n``/``p`` when those are also given.
    """
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "configuration must be a JSON object")
    known = {
        "n", "p", "d", "rho", "sigma", "beta_value", "M", "repetitions",
        "methods", "seed", "design", "rel_tol", "max_iter", "isis_batch",
    }
    for key in raw:
        if key not in known:
            raise ConfigError(key, "unknown key")

    design_raw = raw.get("design", {"kind": "equicorrelated"})
    if not isinstance(design_raw, dict):
        raise ConfigError("design", "must be an object")
    kind = design_raw.get("kind", "equicorrelated")
    if kind not in ("equicorrelated", "kronecker"):
        raise ConfigError("design.kind", f"unknown design kind {kind!r}")

    def require_int(key, minimum=None, raw_map=raw, label=None):
        label = label or key
        if key not in raw_map:
            raise ConfigError(label, "missing")
        value = raw_map[key]
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(label, "must be an integer")
        if minimum is not None and value < minimum:
            raise ConfigError(label, f"must be at least {minimum}")
        return value

    def require_number(key, raw_map=raw, label=None):
        label = label or key
        if key not in raw_map:
            raise ConfigError(label, "missing")
        value = raw_map[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(label, "must be a number")
        return float(value)

    if kind == "equicorrelated":
        n = require_int("n", 2)
        p = require_int("p", 1)
        rho = require_number("rho")
        if not 0.0 <= rho < 1.0:
            raise ConfigError("rho", "must be in [0, 1)")
        design = DesignSpec(kind="equicorrelated")
    else:
        path = design_raw.get("base_design_path")
        if not isinstance(path, str) or not path:
            raise ConfigError("design.base_design_path", "missing")
        order = require_int("hadamard_order", 1, design_raw, "design.hadamard_order")
        if order & (order - 1) != 0:
            raise ConfigError("design.hadamard_order", "must be a power of 2")
        try:
            base = load_base_design(path)
        except (OSError, ValueError) as exc:
            raise ConfigError("design.base_design_path", str(exc)) from exc
        n = order * base.shape[0]
        p = order * base.shape[1]
        if "n" in raw and raw["n"] != n:
            raise ConfigError("n", f"design file implies n = {n}")
        if "p" in raw and raw["p"] != p:
            raise ConfigError("p", f"design file implies p = {p}")
        rho = 0.0
        design = DesignSpec(
            kind="kronecker", base_design_path=path, hadamard_order=order
        )

    d = require_int("d", 0)
    if d > p:
        raise ConfigError("d", "must not exceed p")
    sigma = require_number("sigma")
    if sigma <= 0.0:
        raise ConfigError("sigma", "must be positive")
    beta_value = require_number("beta_value")
    M = require_int("M", 1)
    if M > min(n - 1, p):
        raise ConfigError("M", f"must not exceed min(n - 1, p) = {min(n - 1, p)}")
    repetitions = require_int("repetitions", 1)
    seed = require_int("seed")

    methods_raw = raw.get("methods")
    if not isinstance(methods_raw, list) or not methods_raw:
        raise ConfigError("methods", "must be a non-empty list")
    methods = []
    for method in methods_raw:
        if not isinstance(method, str):
            raise ConfigError("methods", "entries must be strings")
        try:
            _split_method(method)
        except ValueError as exc:
            raise ConfigError("methods", str(exc)) from exc
        methods.append(method.lower())

    rel_tol = require_number("rel_tol") if "rel_tol" in raw else 1e-10
    if rel_tol < 0.0:
        raise ConfigError("rel_tol", "must be nonnegative")
    max_iter = require_int("max_iter", 1) if "max_iter" in raw else None
    isis_batch = require_int("isis_batch", 1) if "isis_batch" in raw else None
    if isis_batch is not None and isis_batch > M:
        raise ConfigError("isis_batch", "must not exceed M")

    model = GenerativeModel(
        n=n, p=p, d=d, rho=rho, sigma=sigma, beta_value=beta_value, seed=seed
    )
    return ExperimentConfig(
        model=model,
        M=M,
        repetitions=repetitions,
        methods=tuple(methods),
        design=design,
        rel_tol=rel_tol,
        max_iter=max_iter,
        isis_batch=isis_batch,
    )


def config_to_dict(config: ExperimentConfig) -> dict:
    """Serialize a configuration to its JSON form (inverse of parsing)."""
    out = {
        "n": config.model.n,
        "p": config.model.p,
        "d": config.model.d,
        "rho": config.model.rho,
        "sigma": config.model.sigma,
        "beta_value": config.model.beta_value,
        "M": config.M,
        "repetitions": config.repetitions,
        "methods": list(config.methods),
        "seed": config.seed,
        "design": {"kind": config.design.kind},
        "rel_tol": config.rel_tol,
    }
    if config.design.kind == "kronecker":
        out["design"]["base_design_path"] = config.design.base_design_path
        out["design"]["hadamard_order"] = config.design.hadamard_order
        del out["n"], out["p"], out["rho"]
    if config.max_iter is not None:
        out["max_iter"] = config.max_iter
    if config.isis_batch is not None:
        out["isis_batch"] = config.isis_batch
    return out
