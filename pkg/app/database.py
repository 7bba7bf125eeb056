from sqlalchemy import create_engine
from sqlalchemy.engine import Engine
from sqlalchemy.orm import declarative_base, sessionmaker
from sqlalchemy.pool import StaticPool

from app import config

Base = declarative_base()


def make_engine(url: str = None) -> Engine:
    """SQLite engines are shared across threads; in-memory ones keep a single connection"""
    url = url or config.DATABASE_URL
    if not url.startswith("sqlite"):
        return create_engine(url)
    if url in ("sqlite://", "sqlite:///:memory:"):
        return create_engine(url, connect_args={"check_same_thread": False}, poolclass=StaticPool)
    return create_engine(url, connect_args={"check_same_thread": False})


engine = make_engine()
SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)


def get_db():
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()


def init_db(bind: Engine = None):
    # registers the tables on Base
    from app.models import run  # noqa: F401

    Base.metadata.create_all(bind=bind or engine)
