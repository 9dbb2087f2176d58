"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np

from cayleyflow.exterior import BLADE_COUNTS, Form, Metric


def random_metric(rng: np.random.Generator, scale: float = 0.2) -> Metric:
    """A generic SPD frame metric near the identity."""
    r = np.eye(8) + scale * rng.normal(size=(8, 8))
    return Metric(r.T @ r + 0.05 * np.eye(8))


def random_form(rng: np.random.Generator, degree: int) -> Form:
    return Form(degree, rng.normal(size=BLADE_COUNTS[degree]))
