"""Prime scans of logarithmic class groups, with a resumable record cache."""

from __future__ import annotations

import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from sympy import primefactors, primerange

from .logarith import DEFAULT_CONVENTION, MAX_PREC, log_class_group
from .quadfield import field_init

log = logging.getLogger(__name__)

PRESETS = ("imaginary-six", "sqrt-minus-3")
IMAGINARY_SIX = (-1, -5, -7, -11, -13, -31)
SIX_BOUND = 30_000
MINUS3_BOUND = 500_000
CSV_COLUMNS = ("d", "ell", "order", "invariants", "stable", "caveat")


@dataclass(frozen=True)
class ScanRecord:
    d: int
    ell: int
    invariants: tuple[int, ...]
    order: int
    stable: bool
    certified_at: int
    elapsed_ms: float
    convention: str = DEFAULT_CONVENTION
    error: str | None = None

    @property
    def key(self):
        return (self.d, self.ell, self.convention)

    @property
    def nontrivial(self) -> bool:
        return self.error is None and bool(self.invariants)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["invariants"] = list(self.invariants)
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> ScanRecord:
        obj = dict(obj)
        obj["invariants"] = tuple(obj["invariants"])
        return cls(**obj)

    def same_result(self, other: ScanRecord) -> bool:
        """Equality ignoring timing."""
        a, b = self.to_dict(), other.to_dict()
        a.pop("elapsed_ms"), b.pop("elapsed_ms")
        return a == b


class ResultCache:
    """Append-only JSONL log of scan records, keyed by (d, ell, convention)."""

    def __init__(self, path):
        self.path = Path(path)
        self.records: dict[tuple, ScanRecord] = {}
        if self.path.exists():
            with self.path.open() as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        rec = ScanRecord.from_dict(json.loads(line))
                    except (ValueError, TypeError) as exc:
                        # a torn final line from an interrupted run
                        log.warning("skipping unreadable cache line: %s", exc)
                        continue
                    self.records[rec.key] = rec

    def get(self, key):
        return self.records.get(key)

    def append(self, recs) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        torn = False
        if self.path.exists() and self.path.stat().st_size:
            with self.path.open("rb") as fh:
                fh.seek(-1, os.SEEK_END)
                torn = fh.read(1) != b"\n"
        with self.path.open("a") as fh:
            if torn:
                fh.write("\n")  # never glue a record onto a torn line
            for rec in recs:
                fh.write(json.dumps(rec.to_dict(), sort_keys=True) + "\n")
                self.records[rec.key] = rec
            fh.flush()


def default_cache_path() -> Path:
    env = os.environ.get("LOGARITH_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "logarith" / "records.jsonl"


def scan_one(d: int, ell: int, convention: str = DEFAULT_CONVENTION, method: str = "auto",
             cap: int = MAX_PREC) -> ScanRecord:
    t0 = time.perf_counter()
    try:
        G = log_class_group(field_init(d), ell, convention=convention, method=method, cap=cap)
    except Exception as exc:  # noqa: BLE001 - recorded, the scan goes on
        ms = (time.perf_counter() - t0) * 1000
        return ScanRecord(d, ell, (), 0, False, 0, ms, convention, f"{type(exc).__name__}: {exc}")
    ms = (time.perf_counter() - t0) * 1000
    return ScanRecord(d, ell, G.invariants, G.order, G.stable, G.certified_at, ms, convention)


def _scan_chunk(args):
    d, ells, convention, method, cap = args
    return [scan_one(d, ell, convention, method, cap) for ell in ells]


def _chunks(seq, n):
    for i in range(0, len(seq), n):
        yield seq[i:i + n]


def scan(d: int, ell_min: int, ell_max: int, convention: str = DEFAULT_CONVENTION,
         workers: int = 1, cache: ResultCache | None = None, force: bool = False,
         method: str = "auto", chunk: int = 200, cap: int = MAX_PREC) -> list[ScanRecord]:
    """One record per prime ell_min <= ell <= ell_max, sorted by ell."""
    if ell_min > ell_max or ell_max < 2:
        raise ValueError(f"empty range [{ell_min}, {ell_max}]")
    field_init(d)  # validate d before fanning out
    primes = list(primerange(max(ell_min, 2), ell_max + 1))
    out: dict[int, ScanRecord] = {}
    todo = []
    for ell in primes:
        rec = cache.get((d, ell, convention)) if cache and not force else None
        if rec is not None and rec.error is None:
            out[ell] = rec
        else:
            todo.append(ell)
    jobs = [(d, part, convention, method, cap) for part in _chunks(todo, chunk)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(_scan_chunk, jobs)
            for recs in results:
                _collect(recs, out, cache)
    else:
        for job in jobs:
            _collect(_scan_chunk(job), out, cache)
    return [out[ell] for ell in primes]


def _collect(recs, out, cache):
    for rec in recs:
        out[rec.ell] = rec
    if cache is not None:
        cache.append(recs)


def smallest_nontrivial(d: int, bound: int, coprime_to_h: bool = False, ell_min: int = 2,
                        convention: str = DEFAULT_CONVENTION, workers: int = 1,
                        cache: ResultCache | None = None, window: int = 5000) -> ScanRecord | None:
    """Record of the first prime <= bound with nontrivial Cl~, or None."""
    h = field_init(d).h
    lo = ell_min
    while lo <= bound:
        hi = min(bound, lo + window - 1)
        for rec in scan(d, lo, hi, convention, workers, cache):
            if coprime_to_h and h % rec.ell == 0:
                continue
            if rec.error is not None:
                raise RuntimeError(f"d={d}, ell={rec.ell}: {rec.error}")
            if not rec.stable:
                raise RuntimeError(f"d={d}, ell={rec.ell}: unstable result")
            if rec.nontrivial:
                return rec
        lo = hi + 1
        window *= 2
    return None


def nontrivial_primes(d: int, bound: int, workers: int = 1, cache: ResultCache | None = None,
                      convention: str = DEFAULT_CONVENTION) -> list[ScanRecord]:
    recs = scan(d, 2, bound, convention, workers, cache)
    bad = [r for r in recs if r.error is not None or not r.stable]
    if bad:
        raise RuntimeError(f"d={d}: {len(bad)} failed or unstable records, first ell={bad[0].ell}")
    return [r for r in recs if r.nontrivial]


# ---------------------------------------------------------------------------
# tables


def _order_check(rec: ScanRecord) -> str:
    ok = rec.invariants == (1,) and rec.order == rec.ell
    return "cyclic of order ell" if ok else f"order {rec.order}, invariants {list(rec.invariants)}"


def _row(rec: ScanRecord, caveat: str = "") -> dict:
    return {
        "d": rec.d,
        "ell": rec.ell,
        "order": rec.order,
        "invariants": list(rec.invariants),
        "stable": rec.stable,
        "order_check": _order_check(rec),
        "caveat": caveat,
    }


def _six_row(d: int, bound: int, workers: int, cache) -> dict:
    K = field_init(d)
    first = smallest_nontrivial(d, bound, coprime_to_h=True, workers=workers, cache=cache)
    if first is None:
        raise RuntimeError(f"no nontrivial prime coprime to h for d={d} below {bound}")
    notes = []
    for ell in sorted(primefactors(K.h)):
        rec = scan(d, ell, ell, workers=1, cache=cache)[0]
        state = f"order {rec.order}" if rec.nontrivial else "trivial"
        notes.append(f"ell | h_K: ell={ell} {state}")
    for rec in scan(d, 2, first.ell, workers=workers, cache=cache):
        if rec.ell < first.ell and rec.nontrivial and K.h % rec.ell:
            notes.append(f"ell prime to h_K: ell={rec.ell} order {rec.order}")
    if first.ell == 2:
        odd = smallest_nontrivial(d, bound, coprime_to_h=True, ell_min=3, workers=workers, cache=cache)
        if odd is not None:
            notes.append(f"smallest odd ell prime to h_K: {odd.ell} (order {odd.order})")
    row = _row(first, "; ".join(notes))
    row["h"] = K.h
    return row


def table(preset: str, bound: int | None = None, workers: int = 1,
          cache: ResultCache | None = None) -> dict:
    """Reproduction table as a JSON-ready document."""
    if preset == "imaginary-six":
        bound = bound or SIX_BOUND
        rows = [_six_row(d, bound, workers, cache) for d in IMAGINARY_SIX]
        column = "smallest ell prime to h_K with nontrivial Cl~"
    elif preset == "sqrt-minus-3":
        bound = bound or MINUS3_BOUND
        rows = [_row(r) for r in nontrivial_primes(-3, bound, workers, cache)]
        column = "all ell <= bound with nontrivial Cl~"
    else:
        raise ValueError(f"unknown preset {preset!r}; choose from {PRESETS}")
    for r in rows:
        if not r["stable"]:
            raise RuntimeError(f"unstable entry d={r['d']}, ell={r['ell']}")
    return {"preset": preset, "bound": bound, "column": column, "rows": rows}


def table_csv(doc: dict) -> str:
    import csv
    import io

    buf = io.StringIO()
    cols = CSV_COLUMNS + ("order_check",)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in doc["rows"]:
        w.writerow([_csv_cell(r[c]) for c in cols])
    return buf.getvalue()


def _csv_cell(v):
    if isinstance(v, list):
        return " ".join(str(x) for x in v)
    if isinstance(v, bool):
        return "true" if v else "false"
    return v
