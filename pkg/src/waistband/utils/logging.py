import logging

from rich.console import Console
from rich.logging import RichHandler
from rich.traceback import install

from waistband.config.settings import settings

# Install rich traceback handler
install(show_locals=True)


def setup_logging() -> logging.Logger:
    """Setup logging configuration with Rich"""

    logger = logging.getLogger("waistband")
    logger.setLevel(getattr(logging, settings.log_level.upper()))

    # Remove existing handlers
    logger.handlers.clear()

    # Rich console handler for terminal output, stdout stays free for reports
    console = Console(stderr=True)
    rich_handler = RichHandler(
        console=console,
        show_path=False,
        rich_tracebacks=True,
    )
    rich_handler.setLevel(logging.INFO)
    rich_handler.setFormatter(logging.Formatter("%(message)s", datefmt="[%X]"))
    logger.addHandler(rich_handler)

    # File handler for detailed logs
    if settings.log_file is not None:
        settings.log_file.parent.mkdir(exist_ok=True, parents=True)
        file_handler = logging.FileHandler(settings.log_file, encoding="utf-8")
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(
            logging.Formatter(
                "%(asctime)s - %(name)s - %(levelname)s - "
                "%(funcName)s:%(lineno)d - %(message)s"
            )
        )
        logger.addHandler(file_handler)

    return logger


# Global logger instance
logger = setup_logging()
