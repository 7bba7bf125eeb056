from datetime import datetime
from typing import Any, Dict, List, Literal, Mapping, Optional, Type, TypeVar

from pydantic import BaseModel, Field, ValidationError, field_validator

from app.errors import InvalidDocument
from app.models.certificate import Certificate
from app.models.run import RunStatus
from app.models.structure import Structure
from app.models.tiling import TilingSystem

Document = TypeVar("Document", bound=BaseModel)


def load_document(model: Type[Document], data: Mapping) -> Document:
    """Validate a decoded JSON file, reporting problems as InvalidDocument"""
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        raise InvalidDocument(f"invalid {model.__name__}: {exc.errors()[0]['msg']}") from exc


class StructureDocument(BaseModel):
    """Finite structure file"""
    format: Literal[1] = 1
    size: int = Field(..., ge=1)
    transitive: List[str] = []
    nullary: Dict[str, bool] = {}
    unary: Dict[str, List[int]] = {}
    binary: Dict[str, List[List[int]]] = {}
    relations: Dict[str, List[List[int]]] = {}
    tags: Optional[List[Dict[str, Any]]] = None
    depth: Optional[int] = None

    @field_validator('binary')
    @classmethod
    def validate_pairs(cls, v):
        for name, pairs in v.items():
            if any(len(p) != 2 for p in pairs):
                raise ValueError(f"binary relation '{name}' holds a tuple that is not a pair")
        return v

    def to_structure(self) -> Structure:
        try:
            return Structure.from_dict(self.model_dump(exclude={"tags", "depth"}))
        except ValueError as exc:
            raise InvalidDocument(str(exc)) from exc

    @classmethod
    def from_structure(cls, s: Structure, **extra) -> "StructureDocument":
        return cls(**s.to_dict(), **extra)


class SuperTypeEntry(BaseModel):
    xi: Dict[str, int]
    pi: List[int] = []


class CertificateDocument(BaseModel):
    format: Literal[1] = 1
    unary: List[str] = []
    transitive: str = "T"
    t_hat: str = "That"
    types: List[List[str]]
    omega: List[SuperTypeEntry]
    ll: List[List[int]] = []
    v: List[int] = []

    def to_certificate(self) -> Certificate:
        try:
            return Certificate.from_dict(self.model_dump())
        except (IndexError, KeyError, ValueError) as exc:
            raise InvalidDocument(f"malformed certificate: {exc}") from exc


class TilingDocument(BaseModel):
    format: Literal[1] = 1
    tiles: List[str] = Field(..., min_length=1)
    h: List[List[str]] = []
    v: List[List[str]] = []
    initial: Optional[str] = None
    final: Optional[str] = None

    def to_tiling(self) -> TilingSystem:
        return TilingSystem.from_dict(self.model_dump())


class FormulaRequest(BaseModel):
    """A formula document: header line followed by the formula"""
    text: str = Field(..., min_length=1, description="e.g. 'sig { p/1 } trans { T } eq\\nforall exists T'")


class ValidateResponse(BaseModel):
    quantifier_depth: int
    max_arity: int
    variable_bound: int
    transitive: List[str]
    equality: bool


class NormalizeRequest(FormulaRequest):
    m: Optional[int] = Field(None, ge=2, description="Variable bound (defaults to the formula's own)")


class NormalizeResponse(BaseModel):
    m: int
    text: str
    provenance: Dict[str, str]


class SolveRequest(FormulaRequest):
    m: Optional[int] = Field(None, ge=2)
    max_omega: Optional[int] = Field(None, ge=1)
    royal_cap: Optional[int] = Field(None, ge=0)
    depth: int = Field(default=4, ge=1)
    budget_seconds: Optional[float] = Field(None, gt=0)


class OracleRequest(FormulaRequest):
    max_size: int = Field(..., ge=1)
    exactly: bool = False


class OracleResponse(BaseModel):
    found: bool
    model: Optional[StructureDocument] = None


class CheckRequest(FormulaRequest):
    model: StructureDocument
    repair_closure: bool = False


class CheckResponse(BaseModel):
    holds: bool
    wellformed: bool
    issues: List[str] = []


class SolveRunResponse(BaseModel):
    id: str
    input_text: str
    m: int
    status: RunStatus
    options: Dict[str, Any]
    artifacts: Dict[str, Any]
    error_message: Optional[str]
    created_at: datetime
    finished_at: Optional[datetime]

    class Config:
        from_attributes = True


class RunEventResponse(BaseModel):
    id: str
    run_id: str
    event_type: str
    status: str
    data: Dict[str, Any]
    created_at: datetime

    class Config:
        from_attributes = True
