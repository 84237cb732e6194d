"""Plain-text file formats shared by the CLI and tests.

Matrix: first line is the integer dimension n, followed by n rows of n
space-separated floats printed with 17 significant digits (lossless for
float64). Loading checks symmetry within 1e-9 and then symmetrizes.

Vector set: first line "M N", then M rows of N floats. The prior format is
the same with header "K N"; its loader enforces orthonormality within 1e-8
and refuses (rather than re-orthogonalizes) on failure.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import numpy as np

from .cone import EigenPrior
from .errors import FormatError

LOAD_SYMMETRY_TOL = 1e-9
PRIOR_ORTHONORMAL_TOL = 1e-8


def _format_row(row: np.ndarray) -> str:
    return " ".join(f"{v:.17g}" for v in row)


def _parse_rows(lines: list[str], count: int, width: int, path, kind: str) -> np.ndarray:
    if len(lines) != count:
        raise FormatError(f"{path}: expected {count} {kind} rows, found {len(lines)}")
    out = np.empty((count, width))
    for r, line in enumerate(lines):
        parts = line.split()
        if len(parts) != width:
            raise FormatError(
                f"{path}: row {r} has {len(parts)} values, expected {width}"
            )
        try:
            out[r] = [float(p) for p in parts]
        except ValueError as exc:
            raise FormatError(f"{path}: row {r} is not numeric: {exc}") from None
    if not np.all(np.isfinite(out)):
        raise FormatError(f"{path}: non-finite values")
    return out


def save_matrix(path, a: np.ndarray) -> None:
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    lines = [str(n)] + [_format_row(a[i]) for i in range(n)]
    Path(path).write_text("\n".join(lines) + "\n")


def load_matrix(path) -> np.ndarray:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise FormatError(f"{path}: empty file")
    try:
        n = int(lines[0])
    except ValueError:
        raise FormatError(f"{path}: first line must be the integer dimension") from None
    if n < 1:
        raise FormatError(f"{path}: dimension must be >= 1, got {n}")
    m = _parse_rows(lines[1:], n, n, path, "matrix")
    skew = float(np.abs(m - m.T).max())
    if skew > LOAD_SYMMETRY_TOL:
        raise FormatError(
            f"{path}: matrix is not symmetric (max |A - A^T| = {skew:.3e})"
        )
    return 0.5 * (m + m.T)


def save_vectors(path, x: np.ndarray) -> None:
    x = np.atleast_2d(np.asarray(x, dtype=float))
    lines = [f"{x.shape[0]} {x.shape[1]}"] + [_format_row(row) for row in x]
    Path(path).write_text("\n".join(lines) + "\n")


def load_vectors(path) -> np.ndarray:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise FormatError(f"{path}: empty file")
    head = lines[0].split()
    if len(head) != 2:
        raise FormatError(f'{path}: first line must be "M N"')
    try:
        m, n = int(head[0]), int(head[1])
    except ValueError:
        raise FormatError(f'{path}: first line must be "M N"') from None
    if m < 1 or n < 1:
        raise FormatError(f"{path}: sizes must be >= 1, got M={m}, N={n}")
    return _parse_rows(lines[1:], m, n, path, "vector")


def save_prior(path, prior: EigenPrior) -> None:
    save_vectors(path, prior.vectors)


def load_prior(path) -> EigenPrior:
    vectors = load_vectors(path)
    try:
        return EigenPrior(vectors, tol=PRIOR_ORTHONORMAL_TOL)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
