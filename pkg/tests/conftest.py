"""Shared fixtures: function families and seeded expression generators."""

import math

import numpy as np
import pytest

from steff2d import Rect

# Six smooth (f, w, rect) pairs spanning the three nontrivial
# classification outcomes; f is always expression-backed.
SMOOTH_FAMILY = [
    ("x*y", "1", Rect(0, 1, 0, 1)),                                # monotone2d
    ("exp(-x-y)", "sin(x)*sin(y)", Rect(0, math.pi, 0, math.pi)),  # monotone2d
    ("(x-y)^2/4", "x+y", Rect(0, 1, 0, 1)),                        # alternating2d
    ("log(x^2+y^2)", "cos(x*y)", Rect(0.5, 2, 0.5, 2)),            # alternating2d
    ("sin(x+y)", "exp(-x)", Rect(0, 3, 0, 3)),                     # indefinite
    ("x^2*y - y^2*x", "1 + x*y", Rect(0, 1, 0, 1)),                # indefinite
]

# Catalog entries certifying monotone2d on the unit square.
MONOTONE_CATALOG = [
    "Pi",
    "C",
    "exp_decay",
    "neg_convex_diff(t^2)",
    "convex_sum(t^2, 1)",
]

# The classification fixtures: (expression, rectangle, expected verdict).
CLASSIFICATION_FIXTURES = [
    ("x*y", Rect(-1, 1, -1, 1), "monotone2d"),
    ("x^2 + y^2", Rect(-1, 1, -1, 1), "modular"),
    ("1/(exp(x)+exp(y)-1)", Rect(0, 1, 0, 1), "monotone2d"),
    ("log(x^2+y^2)", Rect(0.5, 2, 0.5, 2), "alternating2d"),
    # unary minus binds tighter than ^, so the negation needs parentheses
    ("-((x-y)^2)", Rect(-1, 1, -1, 1), "monotone2d"),
    ("(x-y)^2/4", Rect(-1, 1, -1, 1), "alternating2d"),
    ("exp(-x-y)", Rect(0, 1, 0, 1), "monotone2d"),
    ("x - y", Rect(0, 1, 0, 1), "modular"),
]


def random_h_expression(rng: np.random.Generator) -> str:
    """Continuous test integrand with bounded, seeded coefficients."""
    c = np.round(rng.uniform(-2, 2, size=5), 6)
    a, b = np.round(rng.uniform(0.5, 3, size=2), 6)
    return (
        f"{c[0]} + {c[1]}*x + {c[2]}*y + {c[3]}*x*y"
        f" + {c[4]}*sin({a}*x + {b}*y)"
    )


def random_positive_smooth(rng: np.random.Generator) -> str:
    """Strictly positive smooth expression for the double-sum identity."""
    kind = rng.integers(0, 3)
    s = round(float(rng.uniform(2.0, 6.0)), 4)
    k = int(rng.integers(1, 4))
    c = round(float(rng.uniform(0.5, 2.0)), 4)
    if kind == 0:
        return f"exp(-(x+y)/{s}) + {c}/(x+y+{k})"
    if kind == 1:
        return f"{c} + x*y/{s} + 1/(x+y+{k})"
    return f"sqrt(x+y+{k}) + {c}*exp(-x/{s})"


def random_integer_rect(rng: np.random.Generator, limit: int = 4) -> Rect:
    a = int(rng.integers(0, 2))
    b = int(rng.integers(a + 2, limit + 1))
    c = int(rng.integers(0, 2))
    d = int(rng.integers(c + 2, limit + 1))
    return Rect(a, b, c, d)


@pytest.fixture
def rng():
    return np.random.default_rng(42)
