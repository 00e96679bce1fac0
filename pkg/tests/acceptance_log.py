"""Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""
import functools
import time

LINES = []


def criterion(number, title):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            t0 = time.perf_counter()
            try:
                detail = fn(*args, **kwargs)
            except BaseException as exc:
                msg = str(exc).strip().splitlines()[0] if str(exc).strip() else type(exc).__name__
                LINES.append(f"criterion {number}: FAIL  {title} ({time.perf_counter() - t0:.1f}s) {msg[:160]}")
                raise
            extra = f" {detail}" if detail else ""
            LINES.append(f"criterion {number}: PASS  {title} ({time.perf_counter() - t0:.1f}s){extra}")
            print(LINES[-1])

        return run

    return wrap
