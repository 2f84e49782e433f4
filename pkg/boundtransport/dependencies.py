import logging
from concurrent.futures import ThreadPoolExecutor

logger = logging.getLogger(__name__)

_executor: ThreadPoolExecutor | None = None


def initialize_executor(threads: int) -> ThreadPoolExecutor | None:
    """Create the shared assembly pool; one thread means serial assembly."""
    global _executor
    shutdown_executor()
    if threads > 1:
        _executor = ThreadPoolExecutor(
            max_workers=threads, thread_name_prefix="assembly"
        )
        logger.debug(f"assembly pool started with {threads} threads")
    return _executor


def get_executor() -> ThreadPoolExecutor | None:
    return _executor


def shutdown_executor() -> None:
    global _executor
    if _executor is not None:
        _executor.shutdown(wait=True)
        _executor = None
