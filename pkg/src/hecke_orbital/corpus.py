"""Case files, golden records and the regression corpus runner.

A corpus directory holds ``<id>.case.json`` inputs next to
``<id>.golden.json`` expectations.  Everything written by this module is
canonical JSON (fixed key order, two-space indent, trailing newline) so
that runs can be compared byte for byte; wall-clock timings go to a
separate file.
"""
from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .closed_form import GEOMETRIC, QUOTIENT, LatticeType, so_hecke
from .errors import MalformedInput, OrbitalError
from .exact_base import CharPoly, FieldSpec
from .profile import build_profile

log = logging.getLogger(__name__)

MEASURES = (GEOMETRIC, QUOTIENT, "both")
CASE_SUFFIX = ".case.json"
GOLDEN_SUFFIX = ".golden.json"


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


@dataclass(frozen=True)
class Query:
    k: tuple
    measure: str = "both"

    def __post_init__(self):
        LatticeType(self.k)  # validates ordering
        if self.measure not in MEASURES:
            raise MalformedInput(f"unknown measure {self.measure!r}")

    def measures(self):
        return (GEOMETRIC, QUOTIENT) if self.measure == "both" else (self.measure,)

    def to_json(self):
        return {"k": list(self.k), "measure": self.measure}


@dataclass(frozen=True)
class CaseFile:
    fs: FieldSpec
    chi: CharPoly
    queries: tuple = ()
    oracle_enabled: bool = False
    oracle_precision: object = "auto"
    raw_chi: tuple = field(default=(), compare=False)

    @property
    def n(self) -> int:
        return self.chi.n

    @classmethod
    def from_json(cls, data: dict) -> "CaseFile":
        try:
            fdata = data["field"]
            fs = FieldSpec(fdata["kind"], int(fdata["p"]))
            n = int(data["n"])
            raw = data["chi"]
            if not isinstance(raw, list) or len(raw) != n:
                raise MalformedInput("chi must list exactly n coefficients")
            chi = CharPoly(fs, tuple(fs.parse_scalar(c) for c in raw))
            queries = []
            for qd in data.get("queries", []):
                k = tuple(int(x) for x in qd["k"])
                if len(k) != n:
                    raise MalformedInput(f"type {k} does not have length n={n}")
                queries.append(Query(k, qd.get("measure", "both")))
            od = data.get("oracle", {}) or {}
            prec = od.get("precision", "auto")
            if prec != "auto" and (isinstance(prec, bool) or not isinstance(prec, int)):
                raise MalformedInput("oracle precision must be an integer or 'auto'")
        except (KeyError, TypeError) as exc:
            raise MalformedInput(f"malformed case file: {exc}") from exc
        except ValueError as exc:
            if isinstance(exc, OrbitalError):
                raise
            raise MalformedInput(str(exc)) from exc
        return cls(fs, chi, tuple(queries), bool(od.get("enabled", False)), prec, tuple(raw))

    @classmethod
    def load(cls, path) -> "CaseFile":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"{path}: {exc}") from exc
        return cls.from_json(data)

    def to_json(self) -> dict:
        return {
            "field": self.fs.to_json(),
            "n": self.n,
            "chi": [self.fs.format_scalar(c) for c in self.chi.coeffs],
            "queries": [q.to_json() for q in self.queries],
            "oracle": {"enabled": self.oracle_enabled, "precision": self.oracle_precision},
        }

    def dumps(self) -> str:
        return dumps(self.to_json())


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def evaluate_query(profile, k, measure: str) -> dict:
    try:
        value = so_hecke(profile, k, measure)
    except OrbitalError as exc:
        return {"error": type(exc).__name__}
    return {"qvalue": str(value), "value": str(value.eval(profile.q))}


def run_oracle(case: CaseFile, k, measure: str) -> dict:
    """Oracle value for one query; errors are reported, not raised."""
    from .oracle import fiber_volume, lattice_orbit_count

    try:
        if measure == GEOMETRIC:
            rep = fiber_volume(case.chi, k, case.oracle_precision)
            return rep.to_json(timing=False)
        if case.n != 2:
            return {"skipped": "quotient oracle is GL2 only"}
        return {"count": lattice_orbit_count(case.chi, k)}
    except OrbitalError as exc:
        return {"error": type(exc).__name__}


def evaluate_case(case: CaseFile, case_id: str = "", oracle: Optional[bool] = None) -> dict:
    """Golden record for a case: profile snapshot plus per-query values."""
    oracle = case.oracle_enabled if oracle is None else oracle
    record = {"id": case_id}
    try:
        profile = build_profile(case.chi)
    except OrbitalError as exc:
        record["error"] = type(exc).__name__
        return record
    snap = profile.to_json()
    record["profile"] = snap
    results = []
    for query in case.queries:
        entry = {"k": list(query.k)}
        for m in query.measures():
            entry[m] = evaluate_query(profile, query.k, m)
            if oracle:
                entry[m]["oracle"] = run_oracle(case, query.k, m)
        results.append(entry)
    record["queries"] = results
    return record


def oracle_mismatches(record: dict) -> list:
    """Queries whose oracle value disagrees with the closed form."""
    bad = []
    for entry in record.get("queries", []):
        for m in (GEOMETRIC, QUOTIENT):
            part = entry.get(m)
            if not part or "oracle" not in part or "value" not in part:
                continue
            orc = part["oracle"]
            got = orc.get("volume", orc.get("count"))
            if got is None:
                continue
            if str(got) != part["value"]:
                bad.append({"k": entry["k"], "measure": m, "expected": part["value"],
                            "oracle": str(got)})
    return bad


# ---------------------------------------------------------------------------
# Corpus
# ---------------------------------------------------------------------------


def list_cases(directory) -> list:
    d = Path(directory)
    return sorted(p.name[: -len(CASE_SUFFIX)] for p in d.glob("*" + CASE_SUFFIX))


def _diff(expected, got, path="") -> list:
    if type(expected) is not type(got):
        return [f"{path or '/'}: expected {expected!r}, got {got!r}"]
    if isinstance(expected, dict):
        out = []
        for key in sorted(set(expected) | set(got)):
            sub = f"{path}/{key}"
            if key not in expected:
                out.append(f"{sub}: unexpected")
            elif key not in got:
                out.append(f"{sub}: missing")
            else:
                out.extend(_diff(expected[key], got[key], sub))
        return out
    if isinstance(expected, list):
        if len(expected) != len(got):
            return [f"{path}: length {len(expected)} != {len(got)}"]
        out = []
        for i, (a, b) in enumerate(zip(expected, got)):
            out.extend(_diff(a, b, f"{path}/{i}"))
        return out
    return [] if expected == got else [f"{path}: expected {expected!r}, got {got!r}"]


def _run_one(args):
    directory, case_id = args
    t0 = time.perf_counter()
    case_path = Path(directory) / (case_id + CASE_SUFFIX)
    golden_path = Path(directory) / (case_id + GOLDEN_SUFFIX)
    try:
        case = CaseFile.load(case_path)
        record = evaluate_case(case, case_id)
    except OrbitalError as exc:
        record = {"id": case_id, "error": type(exc).__name__}
    if golden_path.exists():
        golden = json.loads(golden_path.read_text())
        diffs = _diff(golden, record)
    else:
        diffs = ["golden file missing"]
    diffs.extend(f"oracle mismatch {m}" for m in oracle_mismatches(record))
    status = "pass" if not diffs else "fail"
    return {"id": case_id, "status": status, "diffs": diffs}, (time.perf_counter() - t0) * 1000


def run_corpus(directory, jobs: int = 1):
    """Re-evaluate every case; returns ``(results, timing)``.

    ``results`` is independent of ``jobs`` and of timing; ``timing`` maps
    case ids to milliseconds.
    """
    ids = list_cases(directory)
    tasks = [(str(directory), cid) for cid in ids]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            outputs = list(ex.map(_run_one, tasks))
    else:
        outputs = [_run_one(t) for t in tasks]
    cases = [o[0] for o in outputs]
    results = {
        "cases": cases,
        "total": len(cases),
        "passed": sum(c["status"] == "pass" for c in cases),
        "failed": sum(c["status"] != "pass" for c in cases),
    }
    timing = {"millis": {o[0]["id"]: round(o[1], 3) for o in outputs}}
    return results, timing


def bless(directory) -> int:
    """Write golden files from the current implementation; returns the count."""
    n = 0
    for cid in list_cases(directory):
        case = CaseFile.load(Path(directory) / (cid + CASE_SUFFIX))
        record = evaluate_case(case, cid)
        (Path(directory) / (cid + GOLDEN_SUFFIX)).write_text(dumps(record))
        n += 1
    return n
