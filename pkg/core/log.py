"""
Logging Setup
Library modules log through logging.getLogger(__name__); the CLI routes them to rich
"""

import logging

from rich.logging import RichHandler

ROOT_LOGGER = "voxellink"


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger below the project namespace
    :param name: Module name (usually __name__)
    :return: Logger instance
    """
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")


def setup_logging(verbose: bool = False) -> logging.Logger:
    """
    Install a RichHandler on the project logger (idempotent)
    :param verbose: DEBUG level when True, WARNING otherwise
    :return: The configured project logger
    """
    logger = logging.getLogger(ROOT_LOGGER)
    logger.setLevel(logging.DEBUG if verbose else logging.WARNING)
    if not any(isinstance(h, RichHandler) for h in logger.handlers):
        handler = RichHandler(show_path=False, rich_tracebacks=False, markup=False)
        handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
        logger.addHandler(handler)
    logger.propagate = False
    return logger
