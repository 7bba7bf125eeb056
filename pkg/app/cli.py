"""Command-line front end.

Exit codes: 0 sat / true / success, 1 unsat_at_cap / false / no model,
2 budget exhausted, 3 input or usage error.
"""
import argparse
import json
import logging
import random
import sys
from pathlib import Path
from typing import Optional, Sequence

from sqlalchemy.orm import sessionmaker

from app import config
from app.database import init_db, make_engine
from app.errors import FlsatError, InvalidDocument
from app.models.certificate import SearchStatus
from app.models.schemas import CertificateDocument, StructureDocument, TilingDocument, load_document
from app.models.solve import SolveOptions
from app.models.tiling import TilingSystem
from app.services import boustrophedon, corpus
from app.services.basic_reduction import parse_basic_set, parse_type, quadratic_transform, render_basic_set, spread_to_basic
from app.services.certificate import Budget, cert_satisfies, check_conditions, search
from app.services.model_synthesis import synthesize, verify_prefix
from app.services.multivar import reduce_arity, solve
from app.services.normal_form import normal_form_to_formula, spread_to_formula, to_normal_form, to_spread
from app.services.oracle import AT_MOST, EXACTLY, find_model, prepare_model
from app.services.semantics import check_wellformed, eval_formula
from app.services.solver_service import SolveService, outcome_artifacts
from app.services.syntax import parse_document, print_document, validate

logger = logging.getLogger(__name__)

EXIT_CODES = {
    SearchStatus.SAT.value: 0,
    SearchStatus.UNSAT_AT_CAP.value: 1,
    SearchStatus.BUDGET_EXHAUSTED.value: 2,
}


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(3, f"error: {message}\n")


def _read(path: str) -> str:
    return Path(path).read_text()


def _load_json(path: str) -> dict:
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise InvalidDocument(f"{path}: {exc}") from exc


def _emit(args, text: str = None, doc=None):
    """Write JSON when --json is given or no text form exists"""
    if doc is not None and (args.json or text is None):
        print(json.dumps(doc, indent=2, sort_keys=True))
    elif text is not None:
        print(text, end="" if text.endswith("\n") else "\n")


def _write(out: Optional[str], name: str, content) -> None:
    if out is None:
        return
    directory = Path(out)
    directory.mkdir(parents=True, exist_ok=True)
    text = content if isinstance(content, str) else json.dumps(content, indent=2, sort_keys=True)
    (directory / name).write_text(text)
    logger.info("wrote %s", directory / name)


def _document(path: str):
    signature, formula = parse_document(_read(path))
    return signature, formula


def _royal(text: Optional[str], signature) -> tuple:
    if not text:
        return ()
    return tuple(parse_type(t, signature) for t in text.split(";") if t.strip())


def _two_variable_form(signature, formula, m: Optional[int]):
    nf = to_normal_form(formula, m or max(2, validate(formula).variable_bound), signature)
    while nf.m > 2:
        nf = reduce_arity(nf)
    return nf


def cmd_validate(args) -> int:
    signature, formula = _document(args.file)
    result = validate(formula, args.free)
    doc = {
        "quantifier_depth": result.quantifier_depth,
        "max_arity": result.max_arity,
        "variable_bound": result.variable_bound,
        "transitive": [p.name for p in signature.transitive],
        "equality": signature.equality is not None,
    }
    _emit(args, " ".join(f"{k}={v}" for k, v in doc.items()), doc)
    return 0


def cmd_normalize(args) -> int:
    signature, formula = _document(args.file)
    nf = to_normal_form(formula, args.m or max(2, validate(formula).variable_bound), signature)
    if args.spread:
        while nf.m > 2:
            nf = reduce_arity(nf)
        staged = to_spread(nf, _royal(args.royal, nf.signature))
        text = print_document(staged.signature, spread_to_formula(staged))
    else:
        staged = nf
        text = print_document(nf.signature, normal_form_to_formula(nf))
    _write(args.out, "normal_form.fl", text)
    _write(args.out, "provenance.json", staged.provenance)
    _emit(args, text, {"text": text, "provenance": staged.provenance})
    return 0


def cmd_basify(args) -> int:
    signature, formula = _document(args.file)
    nf = _two_variable_form(signature, formula, args.m)
    basic = spread_to_basic(to_spread(nf, _royal(args.royal, nf.signature)))
    if args.quadratic:
        basic = quadratic_transform(basic)
    text = render_basic_set(basic)
    _write(args.out, "basic.txt", text)
    _emit(args, text)
    return 0


def cmd_certify(args) -> int:
    phi = parse_basic_set(_read(args.basic))
    if args.check:
        certificate = load_document(CertificateDocument, _load_json(args.check)).to_certificate()
        report = check_conditions(certificate)
        unsatisfied = [f.kind.value for f in phi.formulas if not cert_satisfies(certificate, f, args.literal_case3)]
        doc = {"conditions": [list(v) for v in report.violations], "unsatisfied": unsatisfied}
        ok = report.ok and not unsatisfied
        _emit(args, "certificate ok" if ok else json.dumps(doc, indent=2), doc)
        return 0 if ok else 1
    result = search(phi, args.max_omega, Budget(seconds=args.budget), args.literal_case3)
    doc = {"status": result.status.value, "nodes": result.nodes}
    if result.certificate is not None:
        doc["certificate"] = result.certificate.to_dict()
        _write(args.out, "certificate.json", doc["certificate"])
    _emit(args, None, doc)
    return EXIT_CODES[result.status.value]


def cmd_synthesize(args) -> int:
    certificate = load_document(CertificateDocument, _load_json(args.certificate)).to_certificate()
    prefix = synthesize(certificate, args.depth)
    doc = StructureDocument.from_structure(prefix.structure).model_dump(exclude_none=True)
    doc.update({k: v for k, v in prefix.to_dict().items() if k in ("tags", "depth")})
    _write(args.out, "prefix.json", doc)
    if args.basic is None:
        _emit(args, None, doc)
        return 0
    report = verify_prefix(prefix, certificate, parse_basic_set(_read(args.basic)))
    failures = [f"{c.check} {c.subject}: {c.detail}" for c in report.failures()]
    _emit(args, "\n".join(failures) or f"prefix of {prefix.structure.size} elements verified", doc)
    return 0 if report.ok else 1


def cmd_solve(args) -> int:
    options = SolveOptions(depth=args.depth, literal_case3=args.literal_case3)
    for name in ("max_omega", "royal_cap", "budget"):
        value = getattr(args, name)
        if value is not None:
            setattr(options, "budget_seconds" if name == "budget" else name, value)
    text = _read(args.file)
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        engine = make_engine(f"sqlite:///{Path(args.out) / 'runs.db'}")
        init_db(engine)
        with sessionmaker(bind=engine)() as db:
            run = SolveService(db).solve(text, args.m, options)
            artifacts, run_id = run.artifacts, run.id
    else:
        signature, formula = parse_document(text)
        m = args.m or max(2, validate(formula).variable_bound)
        artifacts, run_id = outcome_artifacts(solve(formula, m, signature, options)), None

    if args.out:
        for k, form in enumerate(artifacts["normal_forms"]):
            _write(args.out, f"normal_form_{k}.fl", form)
        for key, name in (("spread", "spread.fl"), ("basic", "basic.txt"), ("quadratic", "quadratic.txt"),
                          ("certificate", "certificate.json"), ("prefix", "prefix.json"),
                          ("prefix_report", "prefix_report.json")):
            if key in artifacts:
                _write(args.out, name, artifacts[key])
        _write(args.out, "run.json", {"run_id": run_id, "status": artifacts["status"]})

    status = artifacts["status"]
    if args.json:
        _emit(args, None, artifacts)
    else:
        print(f"status: {status}")
        if "certificate" in artifacts:
            print(json.dumps(artifacts["certificate"], indent=2, sort_keys=True))
    return EXIT_CODES[status]


def cmd_oracle(args) -> int:
    signature, formula = _document(args.file)
    model = find_model(formula, args.max_size, EXACTLY if args.exactly else AT_MOST)
    if model is None:
        _emit(args, f"no model of size {'exactly' if args.exactly else 'at most'} {args.max_size}", {"found": False})
        return 1
    doc = StructureDocument.from_structure(model).model_dump(exclude_none=True)
    _write(args.out, "model.json", doc)
    _emit(args, None, doc)
    return 0


def cmd_check(args) -> int:
    signature, formula = _document(args.file)
    model = load_document(StructureDocument, _load_json(args.model)).to_structure()
    model = prepare_model(model, formula, args.repair_closure)
    report = check_wellformed(model)
    if not report.ok:
        _emit(args, report.describe(), {"holds": False, "wellformed": False, "issues": report.describe().splitlines()})
        return 1
    holds = eval_formula(model, formula)
    _emit(args, "true" if holds else "false", {"holds": holds, "wellformed": True, "issues": []})
    return 0 if holds else 1


def _tiling(path: Optional[str]) -> TilingSystem:
    if path is None:
        return TilingSystem.single()
    return load_document(TilingDocument, _load_json(path)).to_tiling()


def cmd_gen(args) -> int:
    ts = _tiling(args.tiling)
    uniform = ts.tiles[0] if len(ts.tiles) == 1 else None
    structure = None
    if args.name in ("phi1", "phi2"):
        signature, formula = corpus.example_formulas()[args.name]
        if args.steps and args.name == "phi2":
            structure = corpus.example2_prefix(args.steps)
    elif args.name == "grid2t":
        signature, formula = corpus.encode_2T(ts)
        if args.torus:
            points = corpus.grid_points(4 * args.torus, 4 * args.torus)
            tiling = corpus.uniform_tiling(points, uniform) if uniform else None
            structure = corpus.build_2T_torus(args.torus, ts if tiling else None, tiling)
    elif args.name == "bou3t":
        signature, formula = boustrophedon.encode_3T(ts)
        if args.steps:
            tiling = {s.coords: uniform for s in boustrophedon.boustrophedon(args.steps)} if uniform else None
            structure = boustrophedon.intended_3T_prefix(args.steps, ts=ts if tiling else None, tiling=tiling)
    else:
        signature, formula = boustrophedon.encode_3T_finite(ts)
        if args.square:
            side = 2 * args.square
            states = boustrophedon.boustrophedon(side * side)
            tiling = {s.coords: uniform for s in states} if uniform else None
            structure = boustrophedon.intended_3T_square(args.square, ts if tiling else None, tiling)

    text = print_document(signature, formula)
    _write(args.out, f"{args.name}.fl", text)
    if structure is None:
        _emit(args, text, {"text": text})
        return 0
    doc = StructureDocument.from_structure(structure).model_dump(exclude_none=True)
    _write(args.out, f"{args.name}.model.json", doc)
    _emit(args, None, doc)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="flsat", description="Fluted logic with one transitive relation: satisfiability workbench")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--seed", type=int, default=None, help="seed for randomized data generation")
    parser.add_argument("--log-level", default=None, help=f"logging level (default {config.LOG_LEVEL})")
    subparsers = parser.add_subparsers(dest="command", required=True)

    s = subparsers.add_parser("validate", help="parse a formula document and report its depth figures")
    s.add_argument("file")
    s.add_argument("--free", type=int, default=0, help="number of free variables in scope")
    s.set_defaults(main=cmd_validate)

    s = subparsers.add_parser("normalize", help="print the normal form (or the spread form)")
    s.add_argument("file")
    s.add_argument("--m", type=int, default=None)
    s.add_argument("--spread", action="store_true")
    s.add_argument("--royal", default=None, help="royal 1-types separated by ';', e.g. '[p, That];[!p, That]'")
    s.add_argument("--out", default=None)
    s.set_defaults(main=cmd_normalize)

    s = subparsers.add_parser("basify", help="reduce a sentence to a set of basic formulas")
    s.add_argument("file")
    s.add_argument("--m", type=int, default=None)
    s.add_argument("--royal", default=None)
    s.add_argument("--quadratic", action="store_true")
    s.add_argument("--out", default=None)
    s.set_defaults(main=cmd_basify)

    s = subparsers.add_parser("certify", help="search for a certificate of a basic set, or check one")
    s.add_argument("basic")
    s.add_argument("--check", default=None, metavar="CERT", help="validate this certificate instead of searching")
    s.add_argument("--max-omega", type=int, default=None)
    s.add_argument("--budget", type=float, default=config.BUDGET_SECONDS)
    s.add_argument("--literal-case3", action="store_true")
    s.add_argument("--out", default=None)
    s.set_defaults(main=cmd_certify)

    s = subparsers.add_parser("synthesize", help="build a finite prefix of the model of a certificate")
    s.add_argument("certificate")
    s.add_argument("--depth", type=int, default=4)
    s.add_argument("--basic", default=None, help="verify the prefix against this basic set")
    s.add_argument("--out", default=None)
    s.set_defaults(main=cmd_synthesize)

    s = subparsers.add_parser("solve", help="decide satisfiability")
    s.add_argument("file")
    s.add_argument("--m", type=int, default=None)
    s.add_argument("--max-omega", type=int, default=None)
    s.add_argument("--royal-cap", type=int, default=None)
    s.add_argument("--depth", type=int, default=4)
    s.add_argument("--budget", type=float, default=None, help="seconds")
    s.add_argument("--literal-case3", action="store_true")
    s.add_argument("--out", default=None, help="directory for artifacts and the runs database")
    s.set_defaults(main=cmd_solve)

    s = subparsers.add_parser("oracle", help="exhaustive search for a small model")
    s.add_argument("file")
    s.add_argument("--max-size", type=int, required=True)
    s.add_argument("--exactly", action="store_true")
    s.add_argument("--out", default=None)
    s.set_defaults(main=cmd_oracle)

    s = subparsers.add_parser("check", help="evaluate a sentence in a finite structure")
    s.add_argument("file")
    s.add_argument("--model", required=True)
    s.add_argument("--repair-closure", action="store_true", help="close transitive relations before checking")
    s.set_defaults(main=cmd_check)

    s = subparsers.add_parser("gen", help="emit a corpus formula or its canonical structure")
    s.add_argument("name", choices=["phi1", "phi2", "grid2t", "bou3t", "bou3t-finite"])
    s.add_argument("--tiling", default=None, help="tiling system JSON")
    s.add_argument("--steps", type=int, default=None, help="prefix length (phi2, bou3t)")
    s.add_argument("--torus", type=int, default=None, help="torus size m (grid2t)")
    s.add_argument("--square", type=int, default=None, help="square half-side n (bou3t-finite)")
    s.add_argument("--out", default=None)
    s.set_defaults(main=cmd_gen)
    return parser


def main(argv: Sequence[str] = None) -> int:
    args = build_parser().parse_args(argv)
    config.setup_logging(args.log_level)
    if args.seed is not None:
        random.seed(args.seed)
    try:
        return args.main(args)
    except (FlsatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
