import threading
import time

import pytest

from openbook.concurrency import (
    THREADS_ENV,
    gather_limited,
    run_limited,
    thread_limit,
)


@pytest.mark.asyncio
async def test_gather_limited_keeps_job_order():
    def job(i):
        # later jobs finish first
        time.sleep(0.01 * (5 - i))
        return i

    results = await gather_limited([lambda i=i: job(i) for i in range(5)], limit=5)
    assert results == [0, 1, 2, 3, 4]


@pytest.mark.asyncio
async def test_gather_limited_respects_limit():
    lock = threading.Lock()
    active = 0
    peak = 0

    def job():
        nonlocal active, peak
        with lock:
            active += 1
            peak = max(peak, active)
        time.sleep(0.02)
        with lock:
            active -= 1

    await gather_limited([job] * 8, limit=2)
    assert peak <= 2


def test_run_limited():
    assert run_limited([lambda: 1, lambda: 2], limit=1) == [1, 2]


def test_thread_limit_from_environment(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "3")
    assert thread_limit() == 3


@pytest.mark.parametrize("raw", ["", "zero", "0", "-2"])
def test_thread_limit_falls_back(monkeypatch, raw):
    monkeypatch.setenv(THREADS_ENV, raw)
    assert thread_limit(default=5) == 5
