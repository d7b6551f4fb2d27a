"""perfdom: exact perfect domination on knights graphs."""
from perfdom import config  # noqa: F401  (logging and .env bootstrap)

__version__ = "1.0.0"
