"""Configuração de logging compartilhada pelos comandos do laboratório."""

from __future__ import annotations

import logging
import os

LOG_FORMAT = "[%(asctime)s] %(levelname)s - %(message)s"
DATE_FORMAT = "%H:%M:%S"


def configure_logging(verbose: bool = False) -> None:
    """Aplica o formato padrão; ``RELCHAR_LOG_LEVEL`` tem precedência."""
    level_name = os.environ.get("RELCHAR_LOG_LEVEL")
    if level_name:
        level = logging.getLevelName(level_name.upper())
        if not isinstance(level, int):
            level = logging.INFO
    else:
        level = logging.DEBUG if verbose else logging.INFO

    logging.basicConfig(level=level, format=LOG_FORMAT, datefmt=DATE_FORMAT, force=True)
