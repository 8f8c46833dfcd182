import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

import settings
from deform import (
    BOLZA_SYSTOLE,
    AffineDeformation,
    Representation,
    coboundary,
    cohomology_complement_basis,
    cohomology_dimensions,
    cyclic_rep,
    genus2_rep,
    random_cocycle,
    schottky_rep,
    translation_cocycle,
    verify_rep,
)
from errors import (
    DegenerateRepresentation,
    ExperimentFailed,
    MargulisLabError,
    NotHyperbolic,
    ParseError,
    ResourceLimit,
)
from margulis import (
    SignScanReport,
    Verdict,
    alpha_eig,
    alpha_properties_check,
    alpha_trace,
    first_mixed_radius,
    lemma1_probe,
    sign_scan,
    systole_scan,
)
from models import (
    AlphaDocument,
    CatalogDocument,
    CocycleDocument,
    GroupDocument,
    MessDemoDocument,
    MessSample,
    PathProbeDocument,
    PresetEntry,
    ScanReportDocument,
    SystoleDocument,
    VerifyDocument,
    deformation_from_documents,
    dump_document,
    load_document,
)
from sl2rep import displacement_length, trace
from words import evaluate, format_word, parse_word

logger = logging.getLogger("margulis_lab")

PROG = "margulis-lab"
MESS_RESCAN_RADIUS = 16
MESS_CONTROL_RADIUS = 6
PRESET_VERIFY_RADIUS = 6
PRECHECK_RADIUS = 2


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def _load_group(path: str):
    return load_document(path, GroupDocument).to_representation()


def _require_valid(rep: Representation) -> Representation:
    """Experiments only run on groups that pass a short verification."""
    report = verify_rep(rep, PRECHECK_RADIUS)
    if not (report.dets_ok and report.relators_ok):
        raise ParseError("group failed verification: " + "; ".join(report.violations))
    if not report.pure_hyperbolic:
        raise NotHyperbolic("group failed verification: " + "; ".join(report.violations))
    return rep


def _load_deformation(args) -> AffineDeformation:
    group = load_document(args.group, GroupDocument)
    cocycle = load_document(args.cocycle, CocycleDocument)
    d = deformation_from_documents(group, cocycle)
    if args.command != "verify":
        _require_valid(d.rep)
    return d


def _parse_word_arg(text: str, rank: int):
    w = parse_word(text, rank)
    if not w:
        raise ParseError(f"word {text!r} reduces to the identity")
    return w


def _fmt(x: float | None, digits: int = 12) -> str:
    if x is None or not math.isfinite(x):
        return "-"
    return f"{x:.{digits}g}"


def _print_table(rows: list[tuple[str, object]]):
    width = max(len(k) for k, _ in rows)
    for key, value in rows:
        print(f"{key.ljust(width)}  {value}")


def _emit(args, doc, rows: list[tuple[str, object]]):
    if args.format == "json":
        sys.stdout.write(dump_document(doc))
    else:
        _print_table(rows)


def _scan_tolerances() -> dict[str, float]:
    return {
        "zero_tol_scale": settings.ZERO_TOL_SCALE,
        "near_parabolic_margin": settings.NEAR_PARABOLIC_MARGIN,
        "identity_tol": settings.RELATOR_TOL,
    }


def _scan_rows(report: SignScanReport) -> list[tuple[str, object]]:
    return [
        ("radius", report.radius),
        ("words", report.count),
        ("excluded", report.excluded),
        ("positive", report.positive),
        ("negative", report.negative),
        ("zero", len(report.zero_words)),
        ("min alpha", f"{_fmt(report.min_alpha)} ({format_word(report.argmin_word or ())})"),
        ("max alpha", f"{_fmt(report.max_alpha)} ({format_word(report.argmax_word or ())})"),
        ("sign class", report.sign_class.value),
        ("verdict", report.verdict.value),
    ]


def _preset_rep(name: str, mu: float, s: float):
    if name == "cyclic":
        return cyclic_rep(mu)
    if name == "schottky":
        return schottky_rep(s)
    rep = genus2_rep()
    report = verify_rep(rep, PRESET_VERIFY_RADIUS)
    if not report.ok:
        raise DegenerateRepresentation("genus-2 preset failed verification: " + "; ".join(report.violations))
    return rep


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_catalog(args) -> int:
    doc = CatalogDocument(presets=[
        PresetEntry(name="cyclic", parameters={"mu": 0.5},
                    description="one generator diag(mu, 1/mu), 0 < mu < 1"),
        PresetEntry(name="schottky", parameters={"s": 1.0},
                    description="two boosts at a quarter turn (not certified discrete)"),
        PresetEntry(name="genus2", parameters={"translation_length": BOLZA_SYSTOLE},
                    description="regular-octagon surface group, relator abcdABCD"),
    ])
    if args.format == "json":
        sys.stdout.write(dump_document(doc))
    else:
        for p in doc.presets:
            params = ", ".join(f"{k}={v:.6g}" for k, v in p.parameters.items())
            print(f"{p.name:<10} {params:<28} {p.description}")
    return 0


def cmd_preset(args) -> int:
    rep = _preset_rep(args.name, args.mu, args.s)
    group_json = dump_document(GroupDocument.from_representation(rep))
    if args.out:
        Path(args.out).write_text(group_json)
    else:
        sys.stdout.write(group_json)

    if args.cocycle == "none":
        return 0
    if args.cocycle == "translation":
        try:
            cocycle = translation_cocycle(rep)
        except ValueError as e:
            raise ParseError(str(e)) from e
    elif args.cocycle == "coboundary":
        rng = np.random.Generator(np.random.PCG64(args.seed))
        cocycle = coboundary(rep, rng.standard_normal(3))
    else:
        cocycle = random_cocycle(cohomology_complement_basis(rep), args.seed)
    cocycle_json = dump_document(CocycleDocument.from_cocycle(cocycle, label=args.cocycle))
    if args.cocycle_out:
        Path(args.cocycle_out).write_text(cocycle_json)
    else:
        sys.stdout.write(cocycle_json)
    return 0


def cmd_alpha(args) -> int:
    d = _load_deformation(args)
    w = _parse_word_arg(args.word, d.rep.rank)
    g = evaluate(w, d.rep.gens)
    a = alpha_trace(d, w)
    doc = AlphaDocument(
        command="alpha",
        parameters={"word": format_word(w)},
        tolerances={"hyperbolic_tol": settings.CLASSIFY_TOL},
        word=format_word(w),
        alpha=a,
        alpha_eig=alpha_eig(d, w),
        trace=trace(g),
        length=displacement_length(g),
    )
    _emit(args, doc, [
        ("word", doc.word),
        ("alpha", _fmt(doc.alpha)),
        ("alpha (eigenframe)", _fmt(doc.alpha_eig)),
        ("trace", _fmt(doc.trace)),
        ("length", _fmt(doc.length)),
    ])
    return 0


def cmd_scan(args) -> int:
    d = _load_deformation(args)
    report = sign_scan(d, args.radius, workers=args.workers, max_words=args.max_words)
    doc = ScanReportDocument.from_report(
        report,
        command="scan",
        parameters={"radius": args.radius},
        tolerances=_scan_tolerances(),
    )
    _emit(args, doc, _scan_rows(report))
    return 0


def _mess_sample(d: AffineDeformation, index: int, args) -> MessSample:
    try:
        report, first = first_mixed_radius(d, args.radius, workers=args.workers, max_words=args.max_words)
    except ResourceLimit as e:
        report, first, note = None, None, e.detail
    else:
        note = ""
    rescan = None
    if first is None:
        rescan = max(MESS_RESCAN_RADIUS, args.radius)
        logger.warning("Sample %d is single-signed up to radius %d; rescanning to %d", index, args.radius, rescan)
        try:
            report, first = first_mixed_radius(d, rescan, workers=args.workers, max_words=args.max_words)
        except ResourceLimit as e:
            note = e.detail
    if first is not None:
        status = "mixed"
    elif note:
        status = "resource-limit"
    elif report.zero_words:
        status = "zero"
    else:
        status = "single-signed"
    return MessSample(
        index=index,
        status=status,
        first_mixed_radius=first,
        count=0 if report is None else report.count,
        min_alpha=None if report is None or not math.isfinite(report.min_alpha) else report.min_alpha,
        max_alpha=None if report is None or not math.isfinite(report.max_alpha) else report.max_alpha,
        rescan_radius=rescan,
        note=note,
    )


def cmd_mess_demo(args) -> int:
    if args.samples < 1:
        raise ParseError("--samples must be >= 1")
    rep = genus2_rep()
    z, b, h = cohomology_dimensions(rep)
    basis = cohomology_complement_basis(rep)
    logger.info("Genus-2 cohomology: Z1=%d B1=%d H1=%d", z, b, h)

    samples = []
    for i in range(args.samples):
        d = AffineDeformation(rep, random_cocycle(basis, args.seed + i))
        samples.append(_mess_sample(d, i, args))

    rng = np.random.Generator(np.random.PCG64(args.seed))
    control = sign_scan(
        AffineDeformation(rep, coboundary(rep, rng.standard_normal(3))),
        min(args.radius, MESS_CONTROL_RADIUS),
        workers=args.workers,
        max_words=args.max_words,
    )
    flagged = [s.index for s in samples if s.status != "mixed"]
    mixed = len(samples) - len(flagged)
    success = not flagged and control.verdict is Verdict.ZERO_DETECTED

    doc = MessDemoDocument(
        command="mess-demo",
        parameters={"samples": args.samples, "radius": args.radius, "seed": args.seed},
        tolerances={**_scan_tolerances(), "relator_tol": settings.RELATOR_TOL, "rank_tol": settings.RANK_TOL},
        rng=settings.RNG_NAME,
        group=rep.label,
        translation_length=displacement_length(rep.gens[0]),
        cocycle_dimension=z,
        coboundary_dimension=b,
        cohomology_dimension=h,
        samples=samples,
        mixed=mixed,
        flagged=flagged,
        control_verdict=control.verdict.value,
        success=success,
    )
    if args.format == "json":
        sys.stdout.write(dump_document(doc))
    else:
        print(f"group {rep.label}: translation length {_fmt(doc.translation_length)}, "
              f"dim Z1={z} B1={b} H1={h}")
        for s in samples:
            print(f"  sample {s.index:3d}  {s.status:<15} first mixed radius "
                  f"{s.first_mixed_radius if s.first_mixed_radius is not None else '-'}  "
                  f"alpha in [{_fmt(s.min_alpha, 6)}, {_fmt(s.max_alpha, 6)}]")
        print(f"mixed: {mixed}/{len(samples)} ({100.0 * mixed / len(samples):.1f}%)")
        if flagged:
            print(f"flagged: {', '.join(str(i) for i in flagged)}")
        print(f"coboundary control: {control.verdict.value}")
    if not success:
        raise ExperimentFailed(
            f"{len(flagged)} sample(s) not confirmed mixed; control verdict {control.verdict.value}"
        )
    return 0


def cmd_lemma1(args) -> int:
    d = _load_deformation(args)
    w = _parse_word_arg(args.word, d.rep.rank)
    probe = lemma1_probe(d, w, args.h)
    doc = PathProbeDocument.from_probe(
        probe,
        command="lemma1",
        parameters={"word": format_word(w), "h": args.h},
        tolerances={"hyperbolic_tol": settings.CLASSIFY_TOL},
    )
    agree = "n/a" if probe.signs_agree is None else ("yes" if probe.signs_agree else "no")
    _emit(args, doc, [
        ("word", doc.word),
        ("alpha", _fmt(probe.alpha)),
        ("tau' (fd)", _fmt(probe.tau_prime_fd)),
        ("tau' (richardson)", _fmt(probe.tau_prime_richardson)),
        ("L' (fd)", _fmt(probe.length_prime_fd)),
        ("L'/alpha", _fmt(probe.ratio, 7)),
        ("richardson ratio", _fmt(probe.richardson_ratio, 7)),
        ("sgn(tau') = sgn(alpha)", agree),
    ])
    return 0


def cmd_systole(args) -> int:
    rep = _require_valid(_load_group(args.group))
    report = systole_scan(rep, args.radius, max_words=args.max_words)
    doc = SystoleDocument.from_report(
        report,
        command="systole",
        parameters={"radius": args.radius},
        tolerances={"near_parabolic_margin": settings.NEAR_PARABOLIC_MARGIN,
                    "identity_tol": settings.RELATOR_TOL},
    )
    _emit(args, doc, [
        ("radius", report.radius),
        ("words", report.checked),
        ("systole", f"{_fmt(report.systole)} ({format_word(report.shortest_word or ())})"),
        ("bound 2 log(4g-2)", _fmt(report.bound)),
        ("classes below bound", report.below_bound),
        ("bound violated", "yes" if report.violates_bound else "no"),
    ])
    return 0


def cmd_verify(args) -> int:
    if args.cocycle:
        d = _load_deformation(args)
        rep = d.rep
    else:
        rep = _load_group(args.group)
    report = verify_rep(rep, args.radius, max_words=args.max_words)
    properties = None
    if args.cocycle:
        properties = alpha_properties_check(d, max(2, min(args.radius, 4)))
    doc = VerifyDocument.from_report(
        report,
        properties,
        command="verify",
        parameters={"radius": args.radius},
        tolerances={"relator_tol": settings.RELATOR_TOL, "det_tol": settings.DET_TOL},
    )
    rows = [
        ("dets", "ok" if report.dets_ok else "FAIL"),
        ("relators", "ok" if report.relators_ok else "FAIL"),
        ("purely hyperbolic", "ok" if report.pure_hyperbolic else "FAIL"),
        ("words checked", report.checked),
        ("trivial words", report.trivial),
        ("min |tr| - 2", _fmt(report.min_trace_margin)),
        ("min length", f"{_fmt(report.min_length)} ({report.shortest_word})"),
    ]
    if properties is not None:
        rows.append(("alpha identities", f"{properties.checks} checks, max error {properties.max_error:.3g}"))
    rows.extend(("violation", v) for v in doc.violations + (properties.violations if properties else []))
    _emit(args, doc, rows)
    return 0 if doc.ok else 1


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "json"), default="table")
    common.add_argument("--verbose", "-v", action="store_true", help="log at DEBUG level")

    limits = argparse.ArgumentParser(add_help=False)
    limits.add_argument("--max-words", type=int, default=None,
                        help=f"word-enumeration cap (default {settings.MAX_WORDS})")
    limits.add_argument("--workers", type=int, default=settings.WORKERS)

    parser = argparse.ArgumentParser(prog=PROG, description="Margulis invariants of affine deformations")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", parents=[common], help="list the preset groups")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("preset", parents=[common], help="write a preset group (and a cocycle)")
    p.add_argument("name", choices=("cyclic", "schottky", "genus2"))
    p.add_argument("--mu", type=float, default=0.5)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--cocycle", choices=("none", "translation", "coboundary", "random"), default="none")
    p.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    p.add_argument("--out")
    p.add_argument("--cocycle-out")
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("alpha", parents=[common], help="Margulis invariant of one word")
    p.add_argument("--group", required=True)
    p.add_argument("--cocycle", required=True)
    p.add_argument("--word", required=True)
    p.set_defaults(func=cmd_alpha)

    p = sub.add_parser("scan", parents=[common, limits], help="sign scan over conjugacy classes")
    p.add_argument("--group", required=True)
    p.add_argument("--cocycle", required=True)
    p.add_argument("--radius", type=int, required=True)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("mess-demo", parents=[common, limits], help="mixed signs for genus-2 deformations")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--radius", type=int, default=12)
    p.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    p.set_defaults(func=cmd_mess_demo)

    p = sub.add_parser("lemma1", parents=[common], help="length derivative along the deformation path")
    p.add_argument("--group", required=True)
    p.add_argument("--cocycle", required=True)
    p.add_argument("--word", required=True)
    p.add_argument("--h", type=float, default=settings.LEMMA1_STEP)
    p.set_defaults(func=cmd_lemma1)

    p = sub.add_parser("systole", parents=[common, limits], help="shortest closed geodesic vs the Buser bound")
    p.add_argument("--group", required=True)
    p.add_argument("--radius", type=int, required=True)
    p.set_defaults(func=cmd_systole)

    p = sub.add_parser("verify", parents=[common, limits], help="check a group (and alpha identities)")
    p.add_argument("--group", required=True)
    p.add_argument("--cocycle")
    p.add_argument("--radius", type=int, default=4)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else settings.LOG_LEVEL
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except MargulisLabError as e:
        logger.error("%s: %s", type(e).__name__, e.detail)
        return e.exit_code
    except ValueError as e:
        logger.error("Invalid argument: %s", e)
        return ParseError.exit_code


if __name__ == "__main__":
    sys.exit(main())
