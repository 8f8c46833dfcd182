"""JSON documents read and written by the command-line front end."""

import json
import math
from pathlib import Path
from typing import Any, TypeVar

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from deform import AffineDeformation, Cocycle, RepReport, Representation, relator_defect
from errors import ParseError
from margulis import PathProbe, PropertyReport, SignScanReport, SystoleReport
from settings import RELATOR_TOL, REPORT_SCHEMA
from words import MAX_RANK, format_word, parse_word

DocT = TypeVar("DocT", bound=BaseModel)


def _finite(x: float) -> float | None:
    return x if math.isfinite(x) else None


# ---------------------------------------------------------------------------
# Input documents
# ---------------------------------------------------------------------------

class GroupDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rank: int = Field(..., ge=1, le=MAX_RANK)
    generators: list[list[float]]
    relators: list[str] = Field(default_factory=list)
    label: str = ""
    genus: int | None = Field(None, ge=2)

    @model_validator(mode="after")
    def _shapes(self):
        if len(self.generators) != self.rank:
            raise ValueError(f"rank is {self.rank} but {len(self.generators)} generators given")
        for i, g in enumerate(self.generators):
            if len(g) != 4:
                raise ValueError(f"generator {i} must have 4 entries (row-major)")
        return self

    def to_representation(self) -> Representation:
        relators = tuple(parse_word(r, self.rank) for r in self.relators)
        return Representation(
            gens=tuple(self.generators), relators=relators, label=self.label, genus=self.genus
        )

    @classmethod
    def from_representation(cls, rep: Representation) -> "GroupDocument":
        return cls(
            rank=rep.rank,
            generators=[[float(x) for x in g.reshape(-1)] for g in rep.gens],
            relators=[format_word(r) for r in rep.relators],
            label=rep.label,
            genus=rep.genus,
        )


class CocycleDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    values: list[list[float]] = Field(..., min_length=1)
    label: str = ""

    @model_validator(mode="after")
    def _shapes(self):
        for i, u in enumerate(self.values):
            if len(u) != 3:
                raise ValueError(f"value {i} must have 3 entries")
        return self

    def to_cocycle(self) -> Cocycle:
        return Cocycle(self.values)

    @classmethod
    def from_cocycle(cls, cocycle: Cocycle, label: str = "") -> "CocycleDocument":
        return cls(values=[[float(x) for x in u] for u in cocycle.values], label=label)


def deformation_from_documents(group: GroupDocument, cocycle: CocycleDocument) -> AffineDeformation:
    try:
        d = AffineDeformation(group.to_representation(), cocycle.to_cocycle())
    except ValueError as e:
        raise ParseError(str(e)) from e
    defect = relator_defect(d)
    if defect > RELATOR_TOL:
        raise ParseError(f"cocycle violates the relator constraints (defect {defect:.3g})")
    return d


def load_document(path: str | Path, model: type[DocT]) -> DocT:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from e
    try:
        return model.model_validate(raw)
    except ValidationError as e:
        raise ParseError(f"{path}: {e.error_count()} validation error(s): {e.errors()[0]['msg']}") from e


def dump_document(doc: BaseModel) -> str:
    """Deterministic JSON; floats use the shortest round-trip repr."""
    return json.dumps(doc.model_dump(mode="json", by_alias=True), indent=2, allow_nan=False) + "\n"


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

class ReportDocument(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(REPORT_SCHEMA, alias="schema")
    command: str
    parameters: dict[str, Any] = Field(default_factory=dict)
    tolerances: dict[str, float] = Field(default_factory=dict)
    rng: str | None = None


class ScanReportDocument(ReportDocument):
    radius: int
    count: int
    excluded: int
    positive: int
    negative: int
    min_alpha: float | None
    max_alpha: float | None
    argmin_word: str | None
    argmax_word: str | None
    zero_words: list[str]
    verdict: str
    sign_class: str
    first_mixed_radius: int | None = None

    @classmethod
    def from_report(cls, report: SignScanReport, **header) -> "ScanReportDocument":
        return cls(
            radius=report.radius,
            count=report.count,
            excluded=report.excluded,
            positive=report.positive,
            negative=report.negative,
            min_alpha=_finite(report.min_alpha),
            max_alpha=_finite(report.max_alpha),
            argmin_word=None if report.argmin_word is None else format_word(report.argmin_word),
            argmax_word=None if report.argmax_word is None else format_word(report.argmax_word),
            zero_words=[format_word(w) for w in report.zero_words],
            verdict=report.verdict.value,
            sign_class=report.sign_class.value,
            **header,
        )


class AlphaDocument(ReportDocument):
    word: str
    alpha: float
    alpha_eig: float
    trace: float
    length: float


class PathProbeDocument(ReportDocument):
    word: str
    alpha: float
    tau_prime_fd: float
    length_prime_fd: float
    step: float
    tau_prime_richardson: float
    length_prime_richardson: float
    tau_error_estimate: float
    ratio: float | None
    richardson_ratio: float | None
    signs_agree: bool | None

    @classmethod
    def from_probe(cls, probe: PathProbe, **header) -> "PathProbeDocument":
        return cls(
            word=format_word(probe.word),
            alpha=probe.alpha,
            tau_prime_fd=probe.tau_prime_fd,
            length_prime_fd=probe.length_prime_fd,
            step=probe.step,
            tau_prime_richardson=probe.tau_prime_richardson,
            length_prime_richardson=probe.length_prime_richardson,
            tau_error_estimate=probe.tau_error_estimate,
            ratio=probe.ratio,
            richardson_ratio=probe.richardson_ratio,
            signs_agree=probe.signs_agree,
            **header,
        )


class SystoleDocument(ReportDocument):
    radius: int
    genus: int | None
    systole: float | None
    shortest_word: str | None
    checked: int
    skipped: int
    bound: float | None
    below_bound: int
    violates_bound: bool

    @classmethod
    def from_report(cls, report: SystoleReport, **header) -> "SystoleDocument":
        return cls(
            radius=report.radius,
            genus=report.genus,
            systole=_finite(report.systole),
            shortest_word=None if report.shortest_word is None else format_word(report.shortest_word),
            checked=report.checked,
            skipped=report.skipped,
            bound=report.bound,
            below_bound=report.below_bound,
            violates_bound=report.violates_bound,
            **header,
        )


class PropertySummary(BaseModel):
    radius: int
    checks: int
    skipped: int
    max_error: float
    violations: list[str]

    @classmethod
    def from_report(cls, report: PropertyReport) -> "PropertySummary":
        return cls(
            radius=report.radius,
            checks=report.checks,
            skipped=report.skipped,
            max_error=report.max_error,
            violations=report.violations,
        )


class VerifyDocument(ReportDocument):
    ok: bool
    radius: int
    dets_ok: bool
    relators_ok: bool
    pure_hyperbolic: bool
    min_trace_margin: float | None
    min_length: float | None
    shortest_word: str
    checked: int
    trivial: int
    violations: list[str]
    properties: PropertySummary | None = None

    @classmethod
    def from_report(
        cls, report: RepReport, properties: PropertyReport | None = None, **header
    ) -> "VerifyDocument":
        summary = None if properties is None else PropertySummary.from_report(properties)
        return cls(
            ok=report.ok and (properties is None or properties.ok),
            radius=report.radius,
            dets_ok=report.dets_ok,
            relators_ok=report.relators_ok,
            pure_hyperbolic=report.pure_hyperbolic,
            min_trace_margin=_finite(report.min_trace_margin),
            min_length=_finite(report.min_length),
            shortest_word=report.shortest_word,
            checked=report.checked,
            trivial=report.trivial,
            violations=report.violations,
            properties=summary,
            **header,
        )


class MessSample(BaseModel):
    index: int
    status: str  # mixed, single-signed, zero, resource-limit
    first_mixed_radius: int | None
    count: int
    min_alpha: float | None
    max_alpha: float | None
    rescan_radius: int | None = None
    note: str = ""


class MessDemoDocument(ReportDocument):
    group: str
    translation_length: float
    cocycle_dimension: int
    coboundary_dimension: int
    cohomology_dimension: int
    samples: list[MessSample]
    mixed: int
    flagged: list[int]
    control_verdict: str
    success: bool


class PresetEntry(BaseModel):
    name: str
    parameters: dict[str, float]
    description: str


class CatalogDocument(BaseModel):
    presets: list[PresetEntry]
