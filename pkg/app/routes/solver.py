from typing import List

from fastapi import APIRouter, Depends, HTTPException, status
from sqlalchemy.orm import Session

from app.database import get_db
from app.models.schemas import (
    CheckRequest,
    CheckResponse,
    FormulaRequest,
    NormalizeRequest,
    NormalizeResponse,
    OracleRequest,
    OracleResponse,
    RunEventResponse,
    SolveRequest,
    SolveRunResponse,
    StructureDocument,
    ValidateResponse,
)
from app.models.solve import SolveOptions
from app.services.normal_form import normal_form_to_formula, to_normal_form
from app.services.oracle import AT_MOST, EXACTLY, find_model, prepare_model
from app.services.semantics import check_wellformed, eval_formula
from app.services.solver_service import SolveService
from app.services.syntax import parse_document, print_document, validate

router = APIRouter(prefix="/solver", tags=["Solver"])


@router.post("/validate", response_model=ValidateResponse)
def validate_formula(request: FormulaRequest):
    """
    Parse a formula document and report its depth figures

    Fails when an atom's arity exceeds the number of enclosing quantifiers.
    """
    try:
        signature, formula = parse_document(request.text)
        result = validate(formula)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return ValidateResponse(
        quantifier_depth=result.quantifier_depth,
        max_arity=result.max_arity,
        variable_bound=result.variable_bound,
        transitive=[p.name for p in signature.transitive],
        equality=signature.equality is not None,
    )


@router.post("/normalize", response_model=NormalizeResponse)
def normalize(request: NormalizeRequest):
    """Compile a sentence into its normal form"""
    try:
        signature, formula = parse_document(request.text)
        m = request.m or max(2, validate(formula).variable_bound)
        nf = to_normal_form(formula, m, signature)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return NormalizeResponse(m=nf.m, text=print_document(nf.signature, normal_form_to_formula(nf)),
                             provenance=nf.provenance)


@router.post("/solve", response_model=SolveRunResponse, status_code=status.HTTP_201_CREATED)
def solve_formula(request: SolveRequest, db: Session = Depends(get_db)):
    """
    Decide satisfiability and record the run

    - Reduces the sentence to two variables
    - Searches for a certificate under the caps
    - Stores every staged form and the synthesized prefix as artifacts

    Status: sat, unsat_at_cap or budget_exhausted
    """
    options = SolveOptions(depth=request.depth)
    for name in ("max_omega", "royal_cap", "budget_seconds"):
        value = getattr(request, name)
        if value is not None:
            setattr(options, name, value)
    service = SolveService(db)
    try:
        return service.solve(request.text, request.m, options)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))


@router.post("/oracle", response_model=OracleResponse)
def oracle(request: OracleRequest):
    """Exhaustive search for a small model"""
    try:
        signature, formula = parse_document(request.text)
        model = find_model(formula, request.max_size, EXACTLY if request.exactly else AT_MOST)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    if model is None:
        return OracleResponse(found=False)
    return OracleResponse(found=True, model=StructureDocument.from_structure(model))


@router.post("/check", response_model=CheckResponse)
def check(request: CheckRequest):
    """Evaluate a sentence in a supplied finite structure"""
    try:
        signature, formula = parse_document(request.text)
        model = prepare_model(request.model.to_structure(), formula, request.repair_closure)
        report = check_wellformed(model)
        holds = eval_formula(model, formula)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e))
    issues = [] if report.ok else report.describe().splitlines()
    return CheckResponse(holds=holds and report.ok, wellformed=report.ok, issues=issues)


@router.get("/runs/{run_id}", response_model=SolveRunResponse)
def get_run(run_id: str, db: Session = Depends(get_db)):
    """Retrieve a recorded run with its artifacts"""
    service = SolveService(db)
    try:
        return service.get_run(run_id)
    except ValueError as e:
        raise HTTPException(status_code=404, detail=str(e))


@router.get("/runs/{run_id}/events", response_model=List[RunEventResponse])
def get_run_events(run_id: str, db: Session = Depends(get_db)):
    """Audit trail of the pipeline stages of a run"""
    service = SolveService(db)
    try:
        return service.get_run_events(run_id)
    except ValueError as e:
        raise HTTPException(status_code=404, detail=str(e))
