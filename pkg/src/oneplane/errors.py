"""Error type shared by every module.

Each failure carries a stable machine-readable code so the CLI can map it
to an exit status and tests can assert on the exact failure class.
"""


class OpeError(Exception):
    def __init__(self, code: str, message: str, offender=None):
        self.code = code
        self.offender = offender
        if offender is not None:
            message = f"{message} (offender: {offender!r})"
        super().__init__(f"{code}: {message}")


# codes used across the package, kept here so typos fail loudly in tests
CODES = frozenset(
    {
        "NON_SIMPLE_GRAPH",
        "DOUBLE_CROSSED_EDGE",
        "NON_ALTERNATING_CROSSING",
        "BROKEN_ROTATION",
        "NON_SPHERICAL",
        "NOT_A_CYCLE",
        "INDEX_OUT_OF_RANGE",
        "NOT_BICONNECTED",
        "NOT_A_SPINDLE",
        "UNKNOWN_FACE",
        "FIXPOINT_EXCEEDED",
        "AUGMENTATION_MISMATCH",
        "BUDGET_EXCEEDED",
        "INFEASIBLE_SPEC",
        "IO_ERROR",
        "INVALID_INPUT",
    }
)


def err(code: str, message: str, offender=None) -> OpeError:
    assert code in CODES, f"unknown error code {code}"
    return OpeError(code, message, offender)
