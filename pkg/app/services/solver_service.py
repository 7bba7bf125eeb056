from datetime import datetime
from typing import List, Optional

from sqlalchemy.orm import Session

from app.errors import FlsatError
from app.models.run import RunEvent, RunStatus, SolveRun
from app.models.solve import SolveOptions, SolveOutcome
from app.services.basic_reduction import render_basic_set
from app.services.multivar import solve
from app.services.normal_form import normal_form_to_formula, spread_to_formula
from app.services.syntax import parse_document, print_document, validate


def outcome_artifacts(outcome: SolveOutcome) -> dict:
    """Every staged form of a solve, serialised for files and the audit table"""
    artifacts = {
        "status": outcome.status.value,
        "guesses": outcome.guesses,
        "nodes": outcome.nodes,
        "normal_forms": [print_document(nf.signature, normal_form_to_formula(nf)) for nf in outcome.normal_forms],
    }
    if outcome.spread is not None:
        artifacts["spread"] = print_document(outcome.spread.signature, spread_to_formula(outcome.spread))
    if outcome.basic is not None:
        artifacts["basic"] = render_basic_set(outcome.basic)
        artifacts["quadratic"] = render_basic_set(outcome.quadratic)
    if outcome.certificate is not None:
        artifacts["nullary"] = outcome.nullary
        artifacts["royal"] = [pi.render() for pi in outcome.royal]
        artifacts["certificate"] = outcome.certificate.to_dict()
        artifacts["prefix"] = outcome.prefix.to_dict()
        artifacts["prefix_report"] = [
            {"check": c.check, "subject": c.subject, "verdict": c.verdict, "detail": c.detail}
            for c in outcome.prefix_report.checks
        ]
    return artifacts


class SolveService:
    """
    Runs the decision procedure and keeps an audit trail of every run:
    1. RUNNING -> run recorded with its input and options
    2. pipeline stages -> one event per normal form, royal guess and certificate
    3. SAT / UNSAT_AT_CAP / BUDGET_EXHAUSTED -> artifacts stored
    Or FAILED when the input is rejected
    """

    def __init__(self, db: Session):
        self.db = db

    def _log_event(self, run_id: str, event_type: str, status: str, data: dict = None):
        event = RunEvent(run_id=run_id, event_type=event_type, status=status, data=data or {})
        self.db.add(event)
        self.db.commit()

    def solve(self, text: str, m: Optional[int] = None, options: Optional[SolveOptions] = None) -> SolveRun:
        options = options or SolveOptions()
        run = SolveRun(input_text=text, m=m or 0, options=options.as_dict(), status=RunStatus.RUNNING)
        self.db.add(run)
        self.db.commit()
        self.db.refresh(run)
        self._log_event(run.id, "solve.created", RunStatus.RUNNING.value, {"m": m})

        try:
            signature, formula = parse_document(text)
            if m is None:
                run.m = max(2, validate(formula).variable_bound)
            outcome = solve(formula, run.m, signature, options,
                            observer=lambda event, data: self._log_event(run.id, event, RunStatus.RUNNING.value, data))
        except FlsatError as exc:
            run.status = RunStatus.FAILED
            run.error_message = str(exc)
            run.finished_at = datetime.utcnow()
            self.db.commit()
            self._log_event(run.id, "solve.failed", RunStatus.FAILED.value, {"error": str(exc)})
            raise

        run.status = RunStatus(outcome.status.value)
        run.artifacts = outcome_artifacts(outcome)
        run.finished_at = datetime.utcnow()
        self.db.commit()
        self.db.refresh(run)
        return run

    def get_run(self, run_id: str) -> SolveRun:
        run = self.db.query(SolveRun).filter(SolveRun.id == run_id).first()
        if not run:
            raise ValueError("Run not found")
        return run

    def get_run_events(self, run_id: str) -> List[RunEvent]:
        self.get_run(run_id)
        return self.db.query(RunEvent).filter(RunEvent.run_id == run_id).order_by(RunEvent.created_at).all()
