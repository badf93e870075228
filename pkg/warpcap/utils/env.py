import os
from pathlib import Path

threads_env = os.getenv("WARPCAP_THREADS", None)
output_dir_env = os.getenv("WARPCAP_OUTPUT_DIR", "warpcap-out")


def default_threads() -> int:
    if threads_env is not None:
        try:
            return max(1, int(threads_env))
        except ValueError:
            print(f"Ignoring malformed WARPCAP_THREADS={threads_env!r}")
    return os.cpu_count() or 1


def default_output_dir() -> Path:
    return Path(output_dir_env)
