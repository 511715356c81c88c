import os


def thread_count() -> int:
    """Worker cap from ``CANONICA_THREADS`` (default 1)."""
    raw = os.environ.get("CANONICA_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)
