"""Restricted transfer operators and escape asymptotics on subshifts of finite type."""

import json

from ._symdyn import (
    ConvergenceError,
    InvalidArgument,
    ParseError,
    PreconditionError,
    Problem,
    perron,
    run_cli,
    sequence,
)
from ._symdyn import analysis_json as _analysis_json


def analyze(problem, nmax=40):
    """Subsystem analysis of `problem` as a dict."""
    return json.loads(_analysis_json(problem, nmax))


__all__ = [
    "ConvergenceError",
    "InvalidArgument",
    "ParseError",
    "PreconditionError",
    "Problem",
    "analyze",
    "perron",
    "run_cli",
    "sequence",
]
