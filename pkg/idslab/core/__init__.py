from .config import settings, Settings
from .logging import configure_logging, get_logger
from .parallel import run_tasks

__all__ = ["settings", "Settings", "configure_logging", "get_logger", "run_tasks"]
