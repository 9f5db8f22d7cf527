"""CSV input, column standardization, and the optional PCA rotation."""

from __future__ import annotations

import csv

import numpy as np


def load_matrix_csv(path) -> tuple[np.ndarray, list[str]]:
    """Read a numeric CSV with a header row into (matrix, column names).

    Every cell must parse as a finite float; missing or non-numeric values
    are rejected with the offending column and row named.  Column names
    must be unique and nonempty.
    """
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        names = [h.strip() for h in header]
        if any(not name for name in names):
            raise ValueError(f"{path}: blank column name in header")
        if len(set(names)) != len(names):
            raise ValueError(f"{path}: duplicate column names in header")
        rows = []
        for line_no, record in enumerate(reader, start=2):
            if len(record) != len(names):
                raise ValueError(
                    f"{path}: line {line_no} has {len(record)} fields, expected {len(names)}"
                )
            parsed = []
            for name, cell in zip(names, record):
                try:
                    value = float(cell)
                except ValueError:
                    raise ValueError(
                        f"{path}: line {line_no}, column {name!r}: "
                        f"cannot parse {cell.strip()!r} as a number"
                    ) from None
                if not np.isfinite(value):
                    raise ValueError(
                        f"{path}: line {line_no}, column {name!r}: non-finite value"
                    )
                parsed.append(value)
            rows.append(parsed)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.asarray(rows, dtype=np.float64), names


def standardize(matrix, names: list[str] | None = None) -> np.ndarray:
    """Center each column and scale it by its sample standard deviation.

    Constant columns cannot be standardized; the error names them.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError("expected a two-dimensional matrix")
    if m.shape[0] < 2:
        raise ValueError("standardization needs at least two rows")
    sd = m.std(axis=0, ddof=1)
    constant = np.flatnonzero(sd == 0.0)
    if constant.size:
        labels = (
            ", ".join(names[j] for j in constant)
            if names is not None
            else ", ".join(str(j) for j in constant)
        )
        raise ValueError(f"constant column(s) cannot be standardized: {labels}")
    return (m - m.mean(axis=0)) / sd


def pca_rotate(matrix, k: int) -> np.ndarray:
    """Project the centered matrix onto its top-k principal directions.

    Directions come from a symmetric eigensolve of the sample covariance,
    ordered by decreasing variance; component i then has variance equal to
    the i-th eigenvalue.  Axis signs are fixed by making each loading
    vector's largest-magnitude entry positive, so the rotation is
    deterministic.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError("expected a two-dimensional matrix")
    n, p = m.shape
    if not 1 <= k <= min(n, p):
        raise ValueError(f"component count must lie in [1, {min(n, p)}], got {k}")
    centered = m - m.mean(axis=0)
    cov = (centered.T @ centered) / (n - 1)
    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    order = np.argsort(eigenvalues)[::-1][:k]
    basis = eigenvectors[:, order]
    signs = np.sign(basis[np.abs(basis).argmax(axis=0), np.arange(k)])
    signs[signs == 0.0] = 1.0
    return centered @ (basis * signs)
