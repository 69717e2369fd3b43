import logging
import time

# Local imports
from config import Config

# --- Constants ---
LOG_FORMAT: str = "%(asctime)s - %(levelname)s - %(name)s - %(threadName)s - %(message)s"

# Third-party loggers kept at WARNING
THIRD_PARTY_LOGGERS_TO_QUIET: list[str] = [
    "asyncio",
    "concurrent.futures",
]

# --- Logging Configuration ---

_handlers: list[logging.Handler] = [logging.StreamHandler()]
if Config.LOG_FILE:
    _handlers.append(logging.FileHandler(Config.LOG_FILE))

logging.basicConfig(
    level=getattr(logging, Config.LOG_LEVEL, logging.INFO),
    handlers=_handlers,
    format=LOG_FORMAT,
)

LOGGER = logging.getLogger(__name__)

for logger_name in THIRD_PARTY_LOGGERS_TO_QUIET:
    logging.getLogger(logger_name).setLevel(logging.WARNING)

boottime: float = time.time()
LOGGER.debug(f"twalock {Config.VERSION} loaded, {Config.HW_THREADS} hardware threads")
