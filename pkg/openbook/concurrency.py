import asyncio
import os
from collections.abc import Callable, Iterable
from typing import Any

THREADS_ENV = "OPENBOOK_THREADS"


def thread_limit(default: int | None = None) -> int:
    """Parallelism cap: OPENBOOK_THREADS if set and positive, else the CPU count."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    if raw:
        try:
            value = int(raw)
        except ValueError:
            value = 0
        if value > 0:
            return value
    return default or os.cpu_count() or 1


async def gather_limited(
    jobs: Iterable[Callable[[], Any]], limit: int | None = None
) -> list[Any]:
    """
    Run blocking jobs in worker threads, at most `limit` at a time.

    Results come back in the order the jobs were given, whatever order
    they finish in.
    """
    semaphore = asyncio.Semaphore(limit or thread_limit())

    async def run(job: Callable[[], Any]) -> Any:
        async with semaphore:
            return await asyncio.to_thread(job)

    return list(await asyncio.gather(*(run(job) for job in jobs)))


def run_limited(jobs: Iterable[Callable[[], Any]], limit: int | None = None) -> list[Any]:
    return asyncio.run(gather_limited(list(jobs), limit))
