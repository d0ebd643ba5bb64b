"""Deterministic text and CSV output helpers.

Every number that leaves the package through a report goes through
:func:`format_sig`, so identical inputs produce byte-identical files on
any platform.
"""

from __future__ import annotations

import csv
from typing import Iterable, Sequence

SIG_DIGITS = 12


def format_sig(value, digits: int = SIG_DIGITS) -> str:
    """Render a real number with a fixed number of significant digits.

    Negative zero is normalized to "0" so that sign noise below the
    printed precision cannot flip output bytes between runs.
    """
    x = float(value)
    if x != x:
        return "nan"
    if x in (float("inf"), float("-inf")):
        return "inf" if x > 0 else "-inf"
    text = "%.*g" % (digits, x)
    if float(text) == 0.0:
        return "0"
    return text


def format_complex(value, digits: int = SIG_DIGITS) -> str:
    z = complex(value)
    re = format_sig(z.real, digits)
    im = format_sig(z.imag, digits)
    if im.startswith("-"):
        return f"{re}{im}i"
    return f"{re}+{im}i"


def write_rows(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write a CSV file with formatted numeric cells.

    Strings pass through untouched; everything else is formatted with
    :func:`format_sig`.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(header))
        for row in rows:
            writer.writerow(
                [cell if isinstance(cell, str) else format_sig(cell) for cell in row]
            )


def write_spectrum_csv(path, eigenvalues, residuals) -> None:
    """Columns: index, eigenvalue, residual."""
    rows = [
        (str(i), ev, r)
        for i, (ev, r) in enumerate(zip(eigenvalues, residuals))
    ]
    write_rows(path, ("index", "eigenvalue", "residual"), rows)


def write_evolution_csv(path, times, norms, expectations=None) -> None:
    """Columns: t, norm, one column per tracked expectation value."""
    expectations = expectations or {}
    names = sorted(expectations)
    header = ["t", "norm"] + names
    rows = []
    for i, (t, n) in enumerate(zip(times, norms)):
        row = [t, n]
        row.extend(expectations[name][i] for name in names)
        rows.append(row)
    write_rows(path, header, rows)
