"""Reader for the plain-text source specification format.

::

    # ternary uniform
    memoryless 3
    1/3 1/3 1/3

    markov 2            # or: markov K order r  (K**r conditional rows)
    9/10 1/10
    1/2 1/2
    initial 5/6 1/6     # optional; stationary law otherwise

Numbers must be exact integers or ``num/den`` fractions.
"""
from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path

from ..source import (
    MarkovSource,
    MemorylessSource,
    ReducibleChainError,
    SourceValidationError,
    expand_order,
)

__all__ = ["SourceSpecError", "parse_source_spec", "parse_source_text", "format_source_spec"]

_RATIONAL = re.compile(r"[+-]?\d+(/\d+)?")


class SourceSpecError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def _rationals(tokens, lineno):
    out = []
    for tok in tokens:
        if not _RATIONAL.fullmatch(tok):
            if re.fullmatch(r"[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?", tok):
                raise SourceSpecError(f"decimal literal {tok!r} rejected; write an exact fraction", lineno)
            raise SourceSpecError(f"malformed rational {tok!r}", lineno)
        try:
            out.append(Fraction(tok))
        except ZeroDivisionError:
            raise SourceSpecError(f"zero denominator in {tok!r}", lineno) from None
    return out


def _check_row(row, k, lineno, what):
    if len(row) != k:
        raise SourceSpecError(f"{what} has {len(row)} entries, expected {k}", lineno)
    if any(p < 0 for p in row):
        raise SourceSpecError(f"{what} has a negative entry", lineno)
    if sum(row) != 1:
        raise SourceSpecError(f"{what} sums to {sum(row)}, not 1", lineno)


def parse_source_text(text: str):
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].split()
        if body:
            lines.append((lineno, body))
    if not lines:
        raise SourceSpecError("empty source specification")

    lineno, head = lines[0]
    kind = head[0].lower()
    try:
        k = int(head[1])
    except (IndexError, ValueError):
        raise SourceSpecError("header must be 'memoryless K' or 'markov K [order r]'", lineno) from None
    order = 1
    if kind == "markov" and len(head) > 2:
        if len(head) != 4 or head[2].lower() != "order" or not head[3].isdigit():
            raise SourceSpecError("expected 'markov K order r'", lineno)
        order = int(head[3])
    elif kind not in ("memoryless", "markov") or len(head) != 2:
        raise SourceSpecError("header must be 'memoryless K' or 'markov K [order r]'", lineno)
    if k < 1 or order < 1:
        raise SourceSpecError("K and order must be positive", lineno)
    body = lines[1:]

    try:
        if kind == "memoryless":
            if len(body) != 1:
                raise SourceSpecError(f"memoryless spec needs exactly one line of {k} rationals",
                                      body[1][0] if len(body) > 1 else lineno)
            row_line, toks = body[0]
            row = _rationals(toks, row_line)
            if len(row) != k:
                raise SourceSpecError(f"expected {k} probabilities, got {len(row)}", row_line)
            try:
                return MemorylessSource(tuple(row))
            except SourceValidationError as exc:
                raise SourceSpecError(str(exc), row_line) from None

        n_rows = k**order
        initial = None
        rows = []
        for i, (ln, toks) in enumerate(body):
            if toks[0].lower() == "initial":
                rest = toks[1:]
                if not rest and i + 1 < len(body):
                    raise SourceSpecError("put the initial distribution on the 'initial' line", ln)
                initial = _rationals(rest, ln)
                _check_row(initial, n_rows, ln, "initial distribution")
                if i != len(body) - 1:
                    raise SourceSpecError("'initial' must be the last line", body[i + 1][0])
                break
            row = _rationals(toks, ln)
            _check_row(row, k, ln, f"row {len(rows)}")
            rows.append(row)
        if len(rows) != n_rows:
            raise SourceSpecError(f"expected {n_rows} transition rows, got {len(rows)}",
                                  body[-1][0] if body else lineno)
        if order == 1:
            return MarkovSource(tuple(map(tuple, rows)), None if initial is None else tuple(initial))
        return expand_order(rows, k, order, initial)
    except ReducibleChainError as exc:
        raise SourceSpecError(f"{exc}; give an explicit 'initial' line", lineno) from None
    except SourceValidationError as exc:
        raise SourceSpecError(str(exc)) from None


def parse_source_spec(path):
    return parse_source_text(Path(path).read_text())


def format_source_spec(source) -> str:
    """Inverse of :func:`parse_source_text` for first-order sources."""
    if isinstance(source, MemorylessSource):
        return f"memoryless {source.n_letters}\n" + " ".join(map(str, source.probs)) + "\n"
    lines = [f"markov {source.n_states}"]
    lines += [" ".join(map(str, row)) for row in source.transition]
    lines.append("initial " + " ".join(map(str, source.initial)))
    return "\n".join(lines) + "\n"
