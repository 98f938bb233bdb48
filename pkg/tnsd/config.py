"""
Runtime configuration, read from the environment (and a .env file)
"""
import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel

# Load environment variables
load_dotenv()


def verbose_enabled() -> bool:
    """Progress lines on stderr for library code"""
    return os.getenv("TNSD_VERBOSE", "false").lower() == "true"


class Settings(BaseModel):
    threads: int
    node_limit: Optional[int]
    time_limit: Optional[float]
    archive_dir: str
    verbose: bool


def _optional_number(name: str, default: str, cast):
    raw = os.getenv(name, default).strip().lower()
    if raw in ("", "none", "0"):
        return None
    return cast(raw)


def get_settings() -> Settings:
    """Current settings; re-reads the environment on every call"""
    return Settings(
        threads=int(os.getenv("TNSD_THREADS", str(os.cpu_count() or 1))),
        node_limit=_optional_number("TNSD_NODE_LIMIT", "5000000", int),
        time_limit=_optional_number("TNSD_TIME_LIMIT", "120", float),
        archive_dir=os.getenv("TNSD_ARCHIVE_DIR", "archive"),
        verbose=verbose_enabled(),
    )
