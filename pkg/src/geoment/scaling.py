"""Least-squares fits of entanglement scaling laws and residual reports."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParseError

MODELS = ("inverse_n_plus_1", "sqrt_over_n_plus_1")


@dataclass(frozen=True)
class ScalingDataset:
    """Rows of (n, e_g) with strictly increasing n."""

    rows: tuple[tuple[int, float], ...]

    def __post_init__(self):
        rows = tuple((int(n), float(e)) for n, e in self.rows)
        if any(n2 <= n1 for (n1, _), (n2, _) in zip(rows, rows[1:])):
            raise ValueError("n must be strictly increasing")
        for n, e in rows:
            if n < 1:
                raise ValueError("n must be positive")
            if not 0.0 <= e < 1.0:
                raise ValueError("e_g must lie in [0, 1)")
        object.__setattr__(self, "rows", rows)

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("n,e_g\n")
        for n, e in self.rows:
            out.write(f"{n},{e!r}\n")
        return out.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ScalingDataset":
        lines = [line for line in text.splitlines() if line.strip()]
        if not lines:
            raise ParseError("empty CSV", line=1)
        header = [h.strip() for h in lines[0].split(",")]
        try:
            n_col, e_col = header.index("n"), header.index("e_g")
        except ValueError:
            raise ParseError('CSV header must contain "n" and "e_g" columns', line=1) from None
        rows = []
        for lineno, line in enumerate(lines[1:], start=2):
            cells = line.split(",")
            if len(cells) < len(header):
                raise ParseError(f"expected {len(header)} cells, got {len(cells)}", line=lineno)
            try:
                rows.append((int(cells[n_col]), float(cells[e_col])))
            except ValueError:
                raise ParseError(f"non-numeric row {line!r}", line=lineno) from None
        try:
            return cls(tuple(rows))
        except ValueError as exc:
            raise ParseError(str(exc)) from None


@dataclass(frozen=True)
class ScalingFit:
    """A fitted scaling constant and its root-mean-square residual."""

    model: str
    constant: float
    rms_residual: float

    def __post_init__(self):
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        if not self.constant > 0.0:
            raise ValueError("constant must be positive")
        if self.rms_residual < 0.0:
            raise ValueError("rms_residual must be non-negative")

    def predict(self, n: int) -> float:
        return 1.0 - self.constant * _regressor(self.model, n)


def _regressor(model: str, n) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    if model == "inverse_n_plus_1":
        return 1.0 / (n + 1.0)
    if model == "sqrt_over_n_plus_1":
        return np.sqrt(2.0 * math.pi * n) / (n + 1.0)
    raise ValueError(f"model must be one of {MODELS}")


def fit_scaling(data: ScalingDataset, model: str) -> ScalingFit:
    """Through-origin least squares of (1 - e_g) against the model regressor.

    Both scaling laws have no intercept, so the single constant is
    sum(x*y)/sum(x*x).
    """
    if len(data.rows) < 3:
        raise ValueError("need at least 3 rows to fit")
    n = np.array([row[0] for row in data.rows], dtype=float)
    e = np.array([row[1] for row in data.rows])
    x = _regressor(model, n)
    xx = float(np.dot(x, x))
    if xx < 1e-300:
        raise ValueError("degenerate regressor")
    constant = float(np.dot(x, 1.0 - e) / xx)
    residuals = e - (1.0 - constant * x)
    rms = float(np.sqrt(np.mean(residuals**2)))
    return ScalingFit(model=model, constant=constant, rms_residual=rms)


def residual_report(data: ScalingDataset, fit: ScalingFit) -> tuple[tuple[int, float], ...]:
    """Pointwise residuals e_g - model(n) of a fit over a dataset."""
    return tuple((n, e - fit.predict(n)) for n, e in data.rows)
