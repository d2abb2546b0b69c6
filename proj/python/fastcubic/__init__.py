"""Cubic-regularized Newton optimization from Hessian-vector products."""

import csv
import io
import json

from . import _core
from ._core import (
    ConfigError,
    Error,
    InvalidArgument,
    Problem,
    eval_m,
    kappa_for,
    stopping_threshold,
)

__all__ = [
    "ConfigError",
    "Error",
    "InvalidArgument",
    "Problem",
    "certificate",
    "eval_m",
    "exact_np_cubic",
    "exact_solve",
    "fast_cubic",
    "gradient_descent",
    "kappa_for",
    "run_matrix",
    "solve_cubic",
    "stopping_threshold",
]


def _run(result):
    x, report = result
    return x, json.loads(report)


def fast_cubic(problem, x0, eps, **kwargs):
    """Returns (x, report dict)."""
    return _run(_core.fast_cubic(problem, x0, eps, **kwargs))


def exact_np_cubic(problem, x0, eps, **kwargs):
    return _run(_core.exact_np_cubic(problem, x0, eps, **kwargs))


def gradient_descent(problem, x0, eps, **kwargs):
    return _run(_core.gradient_descent(problem, x0, eps, **kwargs))


def exact_solve(g, H, L):
    return json.loads(_core.exact_solve(g, H, L))


def solve_cubic(g, H, L, L2, eps, seed=0, solver="agd"):
    return json.loads(_core.solve_cubic(g, H, L, L2, eps, seed, solver))


def certificate(problem, x, eps):
    return json.loads(problem.certificate(x, eps))


def run_matrix(config, threads=0):
    """Runs a bench config (dict) and returns the result rows as dicts."""
    text = _core.run_matrix(json.dumps(config), threads)
    return list(csv.DictReader(io.StringIO(text)))
