"""Global operation counters used by the linearity benchmark.

Counters are bumped by the structural phases of the pipeline with the
size of the data they touch, keyed by the module doing the work.  They
deliberately count work units, not wall time, so the growth measurement
is stable across machines.
"""

_counts: dict = {}


def bump(n: int = 1, tag: str = "core") -> None:
    _counts[tag] = _counts.get(tag, 0) + n


def reset() -> None:
    _counts.clear()


def value() -> int:
    return sum(_counts.values())


def by_module() -> dict:
    return dict(sorted(_counts.items()))


class scope:
    """Context manager that reports ops executed inside the block."""

    def __enter__(self):
        self._base = dict(_counts)
        self.start = sum(self._base.values())
        return self

    def __exit__(self, *exc):
        self.ops = value() - self.start
        self.per_module = {
            k: v - self._base.get(k, 0)
            for k, v in sorted(_counts.items())
            if v != self._base.get(k, 0)
        }
        return False
