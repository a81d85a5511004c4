"""The identity corpus: loading, validation and verification of records."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .dsl import eval_monomials, eval_series
from .errors import ManifestError, QDissectError
from .prover import ProofCertificate, normalize_identity, prove
from .series import QSeries, dissect

__all__ = [
    "IdentityRecord",
    "Manifest",
    "Report",
    "default_path",
    "load",
    "parse_record",
    "coverage",
    "residual",
    "check",
    "run",
    "run_all",
]

MODES = ("prover", "series", "residue_series")
EXPECT = ("proved", "known_discrepancy")


@dataclass(frozen=True)
class IdentityRecord:
    label: str
    lhs: str
    rhs: str
    mode: str
    series_order: int = 120
    expect: str = "proved"
    level: int | None = None
    minus_B: int | None = None
    m: int | None = None
    residues: tuple = ()
    progression: tuple | None = None
    first_failure: int | str | None = None
    corrected: dict | None = None
    note: str = ""
    minus_B_unreproduced: str = ""

    def corrected_record(self) -> "IdentityRecord | None":
        if not self.corrected:
            return None
        return replace(
            self,
            lhs=self.corrected.get("lhs", self.lhs),
            rhs=self.corrected.get("rhs", self.rhs),
            expect="proved",
            first_failure=None,
            corrected=None,
        )


@dataclass
class Manifest:
    records: list
    out_of_scope: list = field(default_factory=list)
    expected_labels: list = field(default_factory=list)

    def __getitem__(self, label: str) -> IdentityRecord:
        for r in self.records:
            if r.label == label:
                return r
        raise KeyError(label)

    def labels(self) -> list[str]:
        return [r.label for r in self.records]


def default_path() -> Path:
    return Path(str(resources.files("qdissect") / "data" / "identities.json"))


def _int(raw: dict, key: str, label: str, required: bool = False):
    v = raw.get(key)
    if v is None:
        if required:
            raise ManifestError(f"{label}: missing field {key!r}")
        return None
    if not isinstance(v, int) or isinstance(v, bool):
        raise ManifestError(f"{label}: field {key!r} must be an integer")
    return v


def parse_record(raw: dict) -> IdentityRecord:
    if not isinstance(raw, dict):
        raise ManifestError(f"record must be an object, got {type(raw).__name__}")
    label = raw.get("label")
    if not isinstance(label, str) or not label:
        raise ManifestError("record without a label")
    for key in ("lhs", "rhs", "mode"):
        if not isinstance(raw.get(key), str):
            raise ManifestError(f"{label}: missing or non-string field {key!r}")
    mode = raw["mode"]
    if mode not in MODES:
        raise ManifestError(f"{label}: unknown mode {mode!r}")
    expect = raw.get("expect", "proved")
    if expect not in EXPECT:
        raise ManifestError(f"{label}: unknown expectation {expect!r}")
    level = _int(raw, "level", label, required=mode == "prover")
    residues = raw.get("residues") or []
    if mode == "residue_series" and not residues:
        raise ManifestError(f"{label}: residue_series needs residues")
    try:
        residues = tuple((int(a), int(b)) for a, b in residues)
    except (TypeError, ValueError):
        raise ManifestError(f"{label}: residues must be [modulus, residue] pairs") from None
    prog = raw.get("progression")
    if prog is not None:
        if len(prog) != 2 or not all(isinstance(x, int) for x in prog) or prog[0] < 1:
            raise ManifestError(f"{label}: progression must be [modulus, residue]")
        prog = tuple(prog)
    corrected = raw.get("corrected")
    if corrected is not None and not (isinstance(corrected, dict) and set(corrected) <= {"lhs", "rhs"}):
        raise ManifestError(f"{label}: corrected may only replace lhs and rhs")
    return IdentityRecord(
        label=label,
        lhs=raw["lhs"],
        rhs=raw["rhs"],
        mode=mode,
        series_order=_int(raw, "series_order", label) or 120,
        expect=expect,
        level=level,
        minus_B=_int(raw, "minus_B", label),
        m=_int(raw, "m", label),
        residues=residues,
        progression=prog,
        first_failure=raw.get("first_failure"),
        corrected=corrected,
        note=raw.get("note", ""),
        minus_B_unreproduced=raw.get("minus_B_unreproduced", ""),
    )


def load(path: str | Path | None = None) -> Manifest:
    path = default_path() if path is None else Path(path)
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("identities"), list):
        raise ManifestError("manifest must be an object with an 'identities' list")
    records = [parse_record(r) for r in data["identities"]]
    seen = set()
    for r in records:
        if r.label in seen:
            raise ManifestError(f"{r.label}: duplicate label")
        seen.add(r.label)
    return Manifest(records, list(data.get("out_of_scope", [])), list(data.get("expected_labels", [])))


def coverage(manifest: Manifest, labels: Iterable[str] | None = None) -> list[str]:
    """Labels that have neither a record nor an out-of-scope entry."""
    have = set(manifest.labels()) | {o["label"] for o in manifest.out_of_scope}
    wanted = manifest.expected_labels if labels is None else labels
    return [l for l in wanted if l not in have]


# -- verification -------------------------------------------------------------------


@dataclass
class Report:
    label: str
    mode: str
    status: str  # proved | expansion_failed | data_mismatch | error
    first_failure: int | None = None
    order: int = 0
    expect: str = "proved"
    ok: bool = False
    message: str = ""
    certificate: ProofCertificate | None = None
    corrected: "Report | None" = None

    def to_json(self) -> dict:
        out = {
            "label": self.label,
            "mode": self.mode,
            "status": self.status,
            "first_failure": self.first_failure,
            "order": self.order,
            "expect": self.expect,
            "ok": self.ok,
        }
        if self.message:
            out["message"] = self.message
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        if self.corrected is not None:
            out["corrected"] = self.corrected.to_json()
        return out


def residual(record: IdentityRecord, order: int) -> QSeries:
    """lhs - rhs through q^(order-1), with the lhs restricted to the record's progression."""
    a, r = record.progression or (1, 0)
    lhs = eval_series(record.lhs, a * order + r)
    if a > 1:
        lhs = dissect(lhs, a, r)
    return lhs - eval_series(record.rhs, order)


def _first_in_classes(res: QSeries, residues: Sequence[tuple[int, int]]) -> int | None:
    for n, _ in res.terms():
        if any(n % m == k % m for m, k in residues):
            return n
    return None


def check(record: IdentityRecord, order: int | None, margin: int) -> Report:
    rep = Report(record.label, record.mode, "error", expect=record.expect)
    try:
        if record.mode == "prover":
            # the plain series comparison comes first so that a failing
            # identity reports its first bad coefficient even if the prover
            # rejects its terms
            series_order = order or record.series_order
            rep.order = series_order
            rep.first_failure = residual(record, series_order).first_nonzero()
            lhs, rhs = eval_monomials(record.lhs), eval_monomials(record.rhs)
            inst = normalize_identity(lhs, rhs, record.level, label=record.label)
            cert = prove(inst, extra_order_margin=margin, check_through=max(record.m or 0, order or 0))
            rep.certificate = cert
            rep.order = cert.verified_order
            if cert.status != "proved" or rep.first_failure is not None:
                rep.status = "expansion_failed"
            elif record.m is not None and cert.verified_order < record.m:
                rep.status = "expansion_failed"
            elif record.minus_B is not None and cert.minus_B != record.minus_B:
                rep.status = "data_mismatch"
                rep.message = f"computed -B = {cert.minus_B}, listed {record.minus_B}"
            else:
                rep.status = "proved"
        else:
            n = order or record.series_order
            res = residual(record, n)
            first = _first_in_classes(res, record.residues) if record.mode == "residue_series" else res.first_nonzero()
            rep.order = n
            rep.first_failure = first
            rep.status = "proved" if first is None else "expansion_failed"
    except QDissectError as exc:
        cause = exc.__cause__ if exc.__cause__ is not None else exc
        rep.status = "error"
        rep.message = f"{type(cause).__name__}: {cause}"
    return rep


def run(record: IdentityRecord, order: int | None = None, margin: int = 10) -> Report:
    """Verify one record and decide whether the outcome is the expected one."""
    rep = check(record, order, margin)
    if record.expect == "proved":
        documented = rep.status == "data_mismatch" and bool(record.minus_B_unreproduced)
        rep.ok = rep.status == "proved" or documented
        if documented:
            rep.message += f" (documented: {record.minus_B_unreproduced})"
        return rep
    # known discrepancy: the printed form must fail where documented, the correction must hold
    ff = record.first_failure
    if isinstance(ff, str):
        confirmed = rep.status == "error" and rep.message.startswith(ff)
    else:
        confirmed = rep.status != "proved" and rep.first_failure == ff
    fixed = record.corrected_record()
    if fixed is not None:
        rep.corrected = run(fixed, order, margin)
    rep.ok = confirmed and (rep.corrected is None or rep.corrected.ok)
    if not confirmed:
        rep.message = (rep.message + "; " if rep.message else "") + f"expected first failure {ff!r}"
    return rep


def _run_one(args) -> Report:
    record, order, margin = args
    return run(record, order, margin)


def run_all(records: Sequence[IdentityRecord], order: int | None = None, jobs: int = 1, margin: int = 10) -> list[Report]:
    tasks = [(r, order, margin) for r in records]
    if jobs <= 1 or len(tasks) <= 1:
        return [_run_one(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, tasks, chunksize=1))
