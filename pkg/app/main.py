"""Main entry point for the preference lab: python -m app.main <command> ..."""

import logging
import sys
from typing import Optional, Sequence

from app.cli import run
from app.config import AppSettings
from app.dependencies import get_settings


# Configure logging
def configure_logging(settings: AppSettings):
    """Configure application logging."""
    logging.basicConfig(
        level=settings.log_level,
        format=settings.log_format,
    )
    logging.getLogger("app").setLevel(settings.log_level)


def main(argv: Optional[Sequence[str]] = None) -> int:
    settings = get_settings()
    configure_logging(settings)
    logger = logging.getLogger(__name__)
    logger.debug(f"Starting {settings.service_name} ({settings.environment})")
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
