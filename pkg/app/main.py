from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from app import config
from app.database import init_db
from app.routes import solver

app = FastAPI(
    title="flsat",
    description="""
    Satisfiability workbench for the fluted fragment with equality and one transitive relation.

    ## Pipeline

    1. **Validate** - Parse a formula document and check atoms fit their contexts
    2. **Normalize** - Compile to the normal form at a chosen variable bound
    3. **Solve** - Reduce to two variables, search for a certificate, synthesize a model prefix
    4. **Oracle / Check** - Exhaustive small-model search and finite model checking

    ### Run States

    - `running` - Solve in progress
    - `sat` - Certificate found
    - `unsat_at_cap` - No certificate within the search caps
    - `budget_exhausted` - Wall-clock budget ran out
    - `failed` - Input rejected

    ## Formula documents

    A header line declares the signature, the formula follows:

        sig { p/1, r/2 } trans { T } eq
        (forall exists T & forall forall (T -> !=))
    """,
    version="1.0.0",
    docs_url="/docs",
    redoc_url="/redoc"
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(solver.router)


@app.on_event("startup")
def on_startup():
    """Configure logging and create the audit tables"""
    config.setup_logging()
    init_db()


@app.get("/", tags=["Health"])
def root():
    return {
        "status": "healthy",
        "service": "flsat",
        "version": "1.0.0",
        "docs": "/docs"
    }


@app.get("/health", tags=["Health"])
def health_check():
    return {
        "status": "healthy",
        "database": "connected",
    }
