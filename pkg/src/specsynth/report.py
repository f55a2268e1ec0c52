"""Aggregate refinement records into metric tables and render them as JSON or text."""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from typing import Optional

from .engine import Classification, RefinementRecord
from .speclang import SpecLevel

TABLES_SCHEMA = "specsynth.tables/1"
REPORT_SCHEMA = "specsynth.report/1"
FORMATS = ("json", "text")
FUZZ_OUTCOMES = ("PASSED", "VIOLATED", "TIMEOUT")


def round2(x) -> float:
    """Round half-up to two decimals."""
    return float(Decimal(str(x)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def pct(part: int, whole: int) -> float:
    if not whole:
        return 0.0
    return float((Decimal(part) * 100 / Decimal(whole)).quantize(Decimal("0.01"),
                                                                 rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class MetricsTable:
    total: int = 0
    test_valid: int = 0
    test_invalid: int = 0
    compile_error: int = 0
    trivial: int = 0
    atoms_total: int = 0

    @property
    def test_valid_pct(self) -> float:
        return pct(self.test_valid, self.total)

    @property
    def test_invalid_pct(self) -> float:
        return pct(self.test_invalid, self.total)

    @property
    def compile_error_pct(self) -> float:
        return pct(self.compile_error, self.total)

    @property
    def trivial_pct(self) -> float:
        """Share of the valid contracts that are trivial."""
        return pct(self.trivial, self.test_valid)

    @property
    def avg_atoms(self) -> float:
        return round2(self.atoms_total / self.test_valid) if self.test_valid else 0.0

    def row(self) -> tuple:
        return (self.test_valid_pct, self.test_invalid_pct, self.compile_error_pct,
                self.trivial_pct, self.avg_atoms)

    def to_json(self) -> dict:
        return {"total": self.total, "test_valid": self.test_valid,
                "test_invalid": self.test_invalid, "compile_error": self.compile_error,
                "trivial": self.trivial, "atoms_total": self.atoms_total,
                "test_valid_pct": self.test_valid_pct,
                "test_invalid_pct": self.test_invalid_pct,
                "compile_error_pct": self.compile_error_pct,
                "trivial_pct": self.trivial_pct, "avg_atoms": self.avg_atoms}


@dataclass(frozen=True)
class LevelCounts:
    counts: dict = field(default_factory=lambda: {lv: 0 for lv in SpecLevel})

    def to_json(self) -> dict:
        return {lv.value: self.counts.get(lv, 0) for lv in SpecLevel}


@dataclass(frozen=True)
class AttemptsHistogram:
    """Per target level: attempts needed for acceptance -> number of functions."""

    by_target: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {lv.value: {str(k): v for k, v in sorted(self.by_target.get(lv, {}).items())}
                for lv in SpecLevel}


@dataclass(frozen=True)
class FuzzOutcomeTable:
    counts: dict = field(default_factory=lambda: {k: 0 for k in FUZZ_OUTCOMES})

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def percentages(self) -> dict:
        return {k: pct(self.counts.get(k, 0), self.total) for k in FUZZ_OUTCOMES}

    def to_json(self) -> dict:
        return {"counts": {k: self.counts.get(k, 0) for k in FUZZ_OUTCOMES},
                "percentages": self.percentages(), "total": self.total}


@dataclass(frozen=True)
class CostTable:
    tokens_in: int = 0
    tokens_out: int = 0
    prices: Optional[tuple] = None     # (per input token, per output token)

    @property
    def cost(self) -> Optional[float]:
        if self.prices is None:
            return None
        return self.tokens_in * self.prices[0] + self.tokens_out * self.prices[1]

    def to_json(self) -> dict:
        d = {"tokens_in": self.tokens_in, "tokens_out": self.tokens_out}
        if self.prices is not None:
            d["price_in"], d["price_out"] = self.prices
            d["cost"] = self.cost
        return d


@dataclass(frozen=True)
class Tables:
    metrics: MetricsTable
    levels: LevelCounts
    attempts: AttemptsHistogram
    fuzz: FuzzOutcomeTable
    cost: CostTable
    timings: Optional[dict] = None

    def to_json(self) -> dict:
        d = {"schema": TABLES_SCHEMA, "metrics": self.metrics.to_json(),
             "levels": self.levels.to_json(), "attempts": self.attempts.to_json(),
             "fuzz": self.fuzz.to_json(), "cost": self.cost.to_json()}
        if self.timings is not None:
            d["timings"] = self.timings
        return d

    @classmethod
    def from_json(cls, d) -> "Tables":
        if d.get("schema") != TABLES_SCHEMA:
            raise ValueError(f"not a tables document (schema {d.get('schema')!r})")
        m = d["metrics"]
        metrics = MetricsTable(m["total"], m["test_valid"], m["test_invalid"],
                               m["compile_error"], m["trivial"], m["atoms_total"])
        levels = LevelCounts({SpecLevel(k): v for k, v in d["levels"].items()})
        attempts = AttemptsHistogram({SpecLevel(k): {int(n): c for n, c in h.items()}
                                      for k, h in d["attempts"].items() if h})
        fuzz = FuzzOutcomeTable(dict(d["fuzz"]["counts"]))
        c = d["cost"]
        prices = (c["price_in"], c["price_out"]) if "price_in" in c else None
        return cls(metrics, levels, attempts, fuzz, CostTable(c["tokens_in"], c["tokens_out"],
                                                              prices), d.get("timings"))


def _timing_summary(records) -> dict:
    rows = [{"function": r.function, "generation": r.generation_time,
             "testing": r.testing_time} for r in records]

    def summary(key):
        values = [row[key] for row in rows]
        if not values:
            return {"mean": 0.0, "median": 0.0, "max": 0.0}
        return {"mean": statistics.fmean(values), "median": statistics.median(values),
                "max": max(values)}
    return {"per_function": rows, "generation": summary("generation"),
            "testing": summary("testing")}


def final_fuzz_status(r: RefinementRecord) -> Optional[str]:
    """Status of the last fuzz run of a record, if any attempt reached fuzzing."""
    for a in reversed(r.attempts):
        if a.fuzz is not None:
            return a.fuzz["status"]
    return None


def aggregate(records, prices: Optional[tuple] = None, timings: bool = False) -> Tables:
    records = list(records)
    by_class = {c: 0 for c in Classification}
    levels = {lv: 0 for lv in SpecLevel}
    attempts, fuzz = {}, {k: 0 for k in FUZZ_OUTCOMES}
    trivial = atoms = 0
    for r in records:
        by_class[r.classification] += 1
        if r.classification is Classification.TEST_VALID:
            trivial += r.trivial
            atoms += r.atoms
            if r.accepted_level is not None:
                levels[r.accepted_level] += 1
            hist = attempts.setdefault(r.target, {})
            hist[len(r.attempts)] = hist.get(len(r.attempts), 0) + 1
        status = final_fuzz_status(r)
        if status is not None:
            fuzz[status] += 1
    metrics = MetricsTable(len(records), by_class[Classification.TEST_VALID],
                           by_class[Classification.TEST_INVALID],
                           by_class[Classification.COMPILE_ERROR], trivial, atoms)
    cost = CostTable(sum(r.tokens_in for r in records), sum(r.tokens_out for r in records),
                     prices)
    return Tables(metrics, LevelCounts(levels), AttemptsHistogram(attempts),
                  FuzzOutcomeTable(fuzz), cost, _timing_summary(records) if timings else None)


# -- rendering ----------------------------------------------------------------


def _table(header, rows) -> str:
    cells = [list(map(str, header))] + [list(map(str, r)) for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _fmt(x) -> str:
    return f"{x:.2f}"


def render_text(t: Tables, label: str = "run") -> str:
    m = t.metrics
    parts = [
        "Results",
        _table(("Run", "Functions", "Test Valid (%)", "Test Invalid (%)", "Compile Error (%)",
                "Trivial (%)", "Avg Atoms"),
               [(label, m.total, *map(_fmt, m.row()))]),
        "Valid contracts per logic",
        _table([lv.value for lv in SpecLevel], [[t.levels.counts.get(lv, 0) for lv in SpecLevel]]),
        "Final fuzz outcomes",
        _table(("Outcome", "Count", "%"),
               [(k.title(), t.fuzz.counts.get(k, 0), _fmt(t.fuzz.percentages()[k]))
                for k in FUZZ_OUTCOMES]),
    ]
    hist_rows = [(lv.value, n, c) for lv in SpecLevel
                 for n, c in sorted(t.attempts.by_target.get(lv, {}).items())]
    parts += ["Attempts to acceptance", _table(("Target", "Attempts", "Functions"), hist_rows)]
    cost_row = [t.cost.tokens_in, t.cost.tokens_out]
    cost_header = ["Tokens In", "Tokens Out"]
    if t.cost.cost is not None:
        cost_header.append("Cost")
        cost_row.append(f"{t.cost.cost:.4f}")
    parts += ["Token usage", _table(cost_header, [cost_row])]
    if t.timings is not None:
        parts += ["Cumulative time per function (s)",
                  _table(("Function", "Generation", "Testing"),
                         [(r["function"], f"{r['generation']:.3f}", f"{r['testing']:.3f}")
                          for r in t.timings["per_function"]])]
    return "\n\n".join(parts) + "\n"


def emit(tables: Tables, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(tables.to_json(), sort_keys=True, indent=2) + "\n"
    if fmt == "text":
        return render_text(tables)
    raise ValueError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")


def report_json(records, config: dict, timings: bool = False,
                prices: Optional[tuple] = None) -> str:
    """The document written by ``run``: configuration, records and their tables."""
    doc = {"schema": REPORT_SCHEMA, "config": config,
           "records": [r.to_json(timings) for r in records],
           "tables": aggregate(records, prices, timings).to_json()}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def load_report(text: str) -> list:
    doc = json.loads(text)
    if doc.get("schema") != REPORT_SCHEMA:
        raise ValueError(f"not a run report (schema {doc.get('schema')!r})")
    return [RefinementRecord.from_json(r) for r in doc["records"]]
