import enum
import uuid
from datetime import datetime

from sqlalchemy import JSON, Column, DateTime, Enum as SQLEnum, Integer, String, Text

from app.database import Base


class RunStatus(str, enum.Enum):
    """Lifecycle of a recorded solve"""
    RUNNING = "running"
    SAT = "sat"  # certificate found
    UNSAT_AT_CAP = "unsat_at_cap"  # no certificate within the caps
    BUDGET_EXHAUSTED = "budget_exhausted"
    FAILED = "failed"  # input or pipeline error


class SolveRun(Base):
    __tablename__ = "solve_runs"

    id = Column(String, primary_key=True, default=lambda: f"run_{uuid.uuid4().hex}")
    input_text = Column(Text, nullable=False)
    m = Column(Integer, nullable=False)
    status = Column(SQLEnum(RunStatus), default=RunStatus.RUNNING)
    options = Column(JSON, default=dict)
    artifacts = Column(JSON, default=dict)
    error_message = Column(String, nullable=True)

    created_at = Column(DateTime, default=datetime.utcnow)
    finished_at = Column(DateTime, nullable=True)

    def __repr__(self):
        return f"<SolveRun {self.id} {self.status} m={self.m}>"


class RunEvent(Base):
    """Audit log of the pipeline stages of a run"""
    __tablename__ = "run_events"

    id = Column(String, primary_key=True, default=lambda: f"evt_{uuid.uuid4().hex}")
    run_id = Column(String, nullable=False)
    event_type = Column(String, nullable=False)  # e.g. "solve.normalized", "solve.royal_guess"
    status = Column(String)
    data = Column(JSON, default=dict)
    created_at = Column(DateTime, default=datetime.utcnow)

    def __repr__(self):
        return f"<RunEvent {self.event_type} for {self.run_id}>"
