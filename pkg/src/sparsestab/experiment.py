"""Batch experiments over (n, p) grids: configuration, seeded trials and output.

A run writes ``records.jsonl`` (one record per cell and trial, in cell-then-trial
order) and ``summary.csv`` (one row per cell). Both depend only on the config:
every trial draws from ``derive_seed(seed, n_index, p_index, trial)`` and the
writer emits results in a fixed order whatever the thread count.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import densities, patterns
from .encodings import (
    Encoding,
    GroupSpec,
    PartitionDefined,
    book3_family,
    book4_family,
    encode_aps,
    encode_graph_copies,
    encode_hypergraph_copies,
    encode_schur,
    fano_family,
    graph_partite_family,
    target_family_sumfree_max,
)
from .extremal import family_distance, partite_warm_start, partition_distance, sample_and_solve
from .seeding import MASK64, derive_seed


class ConfigError(ValueError):
    """Invalid experiment configuration."""


ENCODING_KINDS = ("graph_copies", "hypergraph_copies", "schur", "aps")
FAMILY_KINDS = ("partite", "book3", "book4", "fano", "sumfree_max")


@dataclass
class ExperimentConfig:
    encoding: dict[str, Any]
    n_list: list[int]
    p_rule: dict[str, Any]
    trials: int
    seed: int
    strict: bool = False
    budget: int | None = None
    family: dict[str, Any] | None = None
    warm_start: bool = False
    out: str = "results"

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"encoding", "n_list", "p_rule", "trials", "seed"} - set(data)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    def validate(self) -> None:
        enc = self.encoding
        if not isinstance(enc, dict) or enc.get("kind") not in ENCODING_KINDS:
            raise ConfigError(f"encoding.kind must be one of {ENCODING_KINDS}")
        if enc["kind"] in ("graph_copies", "hypergraph_copies"):
            if enc.get("pattern") not in patterns.NAMED:
                raise ConfigError(f"encoding.pattern must be one of {sorted(patterns.NAMED)}")
        if enc["kind"] == "aps" and not (isinstance(enc.get("length"), int) and enc["length"] >= 3):
            raise ConfigError("aps encoding needs an integer length >= 3")
        if not self.n_list or not all(isinstance(n, int) and n > 0 for n in self.n_list):
            raise ConfigError("n_list must be a nonempty list of positive integers")
        if not isinstance(self.trials, int) or self.trials < 0:
            raise ConfigError("trials must be a non-negative integer")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed <= MASK64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.budget is not None and (not isinstance(self.budget, int) or self.budget < 1):
            raise ConfigError("budget must be a positive integer")
        rule = self.p_rule
        if not isinstance(rule, dict):
            raise ConfigError("p_rule must be an object")
        if "values" in rule:
            if not rule["values"] or not all(isinstance(p, (int, float)) for p in rule["values"]):
                raise ConfigError("p_rule.values must be a nonempty list of numbers")
        elif "c" in rule:
            if not isinstance(rule["c"], (int, float)) or rule["c"] <= 0:
                raise ConfigError("p_rule.c must be positive")
        else:
            raise ConfigError("p_rule needs either 'values' or 'c'")
        fam = self.family
        if fam is not None and (not isinstance(fam, dict) or fam.get("kind") not in FAMILY_KINDS):
            raise ConfigError(f"family.kind must be one of {FAMILY_KINDS}")
        if fam is not None and fam["kind"] == "sumfree_max" and enc["kind"] != "schur":
            raise ConfigError("sumfree_max family needs a schur encoding")
        if fam is not None and fam["kind"] != "sumfree_max" and enc["kind"] not in ("graph_copies", "hypergraph_copies"):
            raise ConfigError("partition families need a copy encoding")
        if self.warm_start and (fam is None or fam["kind"] == "sumfree_max"):
            raise ConfigError("warm_start needs a partition family")

    def canonical(self) -> dict:
        d = asdict(self)
        d.pop("out")
        return d

    def hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def build_encoding(descriptor: dict, n: int) -> Encoding:
    kind = descriptor["kind"]
    if kind == "graph_copies":
        return encode_graph_copies(patterns.by_name(descriptor["pattern"]), n)
    if kind == "hypergraph_copies":
        return encode_hypergraph_copies(patterns.by_name(descriptor["pattern"]), n)
    if kind == "schur":
        return encode_schur(GroupSpec.cyclic(n))
    if kind == "aps":
        return encode_aps(n, descriptor["length"])
    raise ConfigError(f"unknown encoding kind {kind!r}")


def threshold_density(descriptor: dict) -> float:
    """The m in p = c n^(-1/m) for an encoding descriptor."""
    kind = descriptor["kind"]
    if kind == "graph_copies":
        return float(densities.two_density(patterns.by_name(descriptor["pattern"])))
    if kind == "hypergraph_copies":
        pat = patterns.by_name(descriptor["pattern"])
        return float(densities.ell_density(pat, pat.k))
    if kind == "schur":
        return 2.0
    return float(descriptor["length"] - 1)


def p_values(config: ExperimentConfig, n: int) -> list[float]:
    rule = config.p_rule
    if "values" in rule:
        ps = [float(p) for p in rule["values"]]
    else:
        m = rule.get("density", "auto")
        m = threshold_density(config.encoding) if m == "auto" else float(m)
        ps = [float(rule["c"]) * n ** (-1.0 / m)]
    for p in ps:
        if not 0.0 <= p <= 1.0:
            raise ConfigError(f"p = {p!r} at n = {n} lies outside [0, 1]")
    return ps


def family_for(descriptor: dict | None, enc: Encoding):
    if descriptor is None:
        return None
    kind, n = descriptor["kind"], enc.base["n"]
    if kind == "partite":
        return graph_partite_family(n, descriptor.get("parts", 2))
    if kind == "book3":
        return book3_family(n)
    if kind == "book4":
        return book4_family(n)
    if kind == "fano":
        return fano_family(n)
    return target_family_sumfree_max(GroupSpec.cyclic(n))


@dataclass
class Cell:
    n_index: int
    p_index: int
    n: int
    p: float


@dataclass
class TrialOutcome:
    record: dict
    runtime_ms: float


SUMMARY_COLUMNS = ["n", "p", "trials", "mean_ratio", "min_ratio", "max_ratio", "exact_fraction",
                   "dist_q25", "dist_median", "dist_q75", "dist_max"]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def summarise(cell: Cell, records: list[dict]) -> dict:
    ratios = [r["ratio"] for r in records if r["ratio"] is not None]
    dists = [r["distance"] for r in records if r.get("distance") is not None]
    row: dict[str, Any] = {"n": cell.n, "p": cell.p, "trials": len(records)}
    row["mean_ratio"] = math.fsum(ratios) / len(ratios) if ratios else None
    row["min_ratio"] = min(ratios) if ratios else None
    row["max_ratio"] = max(ratios) if ratios else None
    row["exact_fraction"] = sum(r["exact"] for r in records) / len(records) if records else None
    if dists:
        q = np.quantile(np.asarray(dists, dtype=float), [0.25, 0.5, 0.75])
        row.update(dist_q25=float(q[0]), dist_median=float(q[1]), dist_q75=float(q[2]), dist_max=max(dists))
    else:
        row.update(dist_q25=None, dist_median=None, dist_q75=None, dist_max=None)
    return row


@dataclass
class ExperimentResult:
    records_path: Path
    summary_path: Path
    n_records: int
    any_inexact: bool
    runtimes_ms: list[float] = field(default_factory=list)


def run_experiment(config: ExperimentConfig, threads: int = 1, out: str | Path | None = None,
                   progress: Callable[[int, int], None] | None = None) -> ExperimentResult:
    """Run every (cell, trial) and write the JSONL records and CSV summary.

    Runtimes are returned but kept out of the files so they stay reproducible.
    """
    config.validate()
    if threads < 1:
        raise ConfigError("threads must be at least 1")
    out_dir = Path(out if out is not None else config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    chash = config.hash()

    encs: dict[int, Encoding] = {}
    fams: dict[int, Any] = {}
    cells: list[Cell] = []
    for ni, n in enumerate(config.n_list):
        try:
            encs[ni] = build_encoding(config.encoding, n)
        except ValueError as exc:
            raise ConfigError(f"cannot build encoding at n = {n}: {exc}") from exc
        fams[ni] = family_for(config.family, encs[ni])
        for pi, p in enumerate(p_values(config, n)):
            cells.append(Cell(ni, pi, n, p))

    def warm(ni):
        if not config.warm_start:
            return None
        fam = fams[ni]
        return partite_warm_start(lambda _enc: fam)

    jobs = [(cell, t) for cell in cells for t in range(config.trials)]

    def work(job: tuple[Cell, int]) -> TrialOutcome:
        cell, t = job
        enc, fam = encs[cell.n_index], fams[cell.n_index]
        seed = derive_seed(config.seed, cell.n_index, cell.p_index, t)
        t0 = time.perf_counter()
        rec, res = sample_and_solve(enc, cell.p, seed, strict=config.strict, budget=config.budget,
                                    warm_start=warm(cell.n_index))
        dist = dexact = None
        if fam is not None:
            if isinstance(fam, PartitionDefined):
                d = partition_distance(res.witness, enc, fam, seed=seed)
            else:
                d = family_distance(res.witness, fam)
            dist, dexact = d.distance, d.exact
        record = {
            "config_hash": chash,
            "n": cell.n,
            "p": cell.p,
            "n_index": cell.n_index,
            "p_index": cell.p_index,
            "trial": t,
            "seed": seed,
            "encoding": rec.encoding,
            "sampled_size": rec.sampled_size,
            "extremal_size": rec.extremal_size,
            "exact": rec.exact,
            "ratio": rec.ratio,
            "distance": dist,
            "distance_exact": dexact,
            "nodes": res.nodes_explored,
        }
        return TrialOutcome(record, (time.perf_counter() - t0) * 1000)

    records_path, summary_path = out_dir / "records.jsonl", out_dir / "summary.csv"
    by_cell: dict[tuple[int, int], list[dict]] = {(c.n_index, c.p_index): [] for c in cells}
    runtimes: list[float] = []
    any_inexact = False
    with open(records_path, "w", newline="\n") as fh, ThreadPoolExecutor(max_workers=threads) as pool:
        # map yields in submission order, so this loop is the single ordered writer
        for done, outcome in enumerate(pool.map(work, jobs), 1):
            rec = outcome.record
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
            by_cell[(rec["n_index"], rec["p_index"])].append(rec)
            runtimes.append(outcome.runtime_ms)
            any_inexact |= not rec["exact"]
            if progress is not None:
                progress(done, len(jobs))

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_COLUMNS)
    for cell in cells:
        recs = by_cell[(cell.n_index, cell.p_index)]
        if not recs:
            continue
        row = summarise(cell, recs)
        writer.writerow([_fmt(row[c]) for c in SUMMARY_COLUMNS])
    summary_path.write_text(buf.getvalue())
    return ExperimentResult(records_path, summary_path, len(jobs), any_inexact, runtimes)


def read_records(path) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]
