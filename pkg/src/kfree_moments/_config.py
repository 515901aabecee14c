import os

THREADS_ENV = "KFREE_THREADS"

_threads: int | None = None


def get_threads() -> int:
    """Worker count: explicit setting, else $KFREE_THREADS, else 1."""
    if _threads is not None:
        return _threads
    raw = os.environ.get(THREADS_ENV, "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(n, 1)


def set_threads(n: int | None) -> None:
    global _threads
    if n is not None and n < 1:
        raise ValueError("thread count must be >= 1")
    _threads = n
