"""Closed-form delay bounds and the curve scans behind the two figures.

Bounds mix logarithms and powers, so they are evaluated in floating point:
a private mpmath context at 80 bits of precision (``e`` is taken from that
context, i.e. correct to 80 bits). All logarithms are base 2.

Notation: ``alpha`` / ``beta`` are the largest / smallest letter
probabilities of a memoryless source.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from mpmath.ctx_mp import MPContext

__all__ = [
    "PRECISION_BITS",
    "UncertifiedSourceError",
    "BoundPoint",
    "BoundCurve",
    "to_mpf",
    "tail_bound",
    "d1_bound",
    "gallager_bound",
    "modified_gallager",
    "d0_of",
    "d1_of",
    "d2_bound",
    "d3_bound",
    "memory_delay_bound",
    "parse_grid",
    "scan_curves",
    "find_crossovers",
    "curve_summary",
]

PRECISION_BITS = 80
mp = MPContext()
mp.prec = PRECISION_BITS

# log2(8 e^2), shared by both Gallager-type bounds
_LOG2_8E2 = 3 + 2 * mp.log(mp.e, 2)
_D1_SCAN_LIMIT = 10**6


class UncertifiedSourceError(ValueError):
    pass


def to_mpf(x):
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    if isinstance(x, str) and "/" in x:
        return to_mpf(Fraction(x))
    return mp.mpf(x)


def _log2(x):
    """log2 of a positive number; exact Fractions are split to avoid underflow."""
    if isinstance(x, Fraction):
        return mp.log(x.numerator, 2) - mp.log(x.denominator, 2)
    return mp.log(to_mpf(x), 2)


def _alpha(alpha):
    a = to_mpf(alpha)
    if not 0 < a < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return a


def tail_bound(alpha, d: int):
    """Upper bound on ``Pr(D > d)``: ``4 a^d (1 + d log2(1/a))``."""
    a = _alpha(alpha)
    if d < 0:
        raise ValueError("d must be non-negative")
    return 4 * a**d * (1 + d * mp.log(1 / a, 2))


def d1_bound(alpha):
    a = _alpha(alpha)
    return 1 + 4 * a * (1 - a + mp.log(1 / a, 2)) / (1 - a) ** 2


def gallager_bound(alpha, beta):
    a = _alpha(alpha)
    b = to_mpf(beta)
    if not 0 < b <= a:
        raise ValueError(f"need 0 < beta <= alpha, got beta={beta}, alpha={alpha}")
    return (_LOG2_8E2 - mp.log(b, 2)) / mp.log(1 / a, 2)


def modified_gallager(alpha):
    a = _alpha(alpha)
    return 1 + _LOG2_8E2 / mp.log(1 / a, 2)


def d0_of(alpha) -> int:
    a = _alpha(alpha)
    return int(mp.floor(2 / mp.log(1 / a, 2)))


def d1_of(alpha) -> int:
    """Largest ``d1 >= d0`` with ``2 a^d (1 + 2 d log2(1/a)) > 1`` for all ``d0 < d <= d1``.

    Past ``d0`` the expression is strictly decreasing in ``d`` (its derivative
    changes sign at ``d = (2/ln 2 - 1) / (2 log2(1/a)) < d0 + 1``), so the
    answer is the last ``d`` where it still exceeds one, found by galloping and
    bisection.
    """
    a = _alpha(alpha)
    lg = mp.log(1 / a, 2)
    d0 = int(mp.floor(2 / lg))

    def above(d):
        return 2 * a**d * (1 + 2 * d * lg) > 1

    if not above(d0 + 1):
        return d0
    lo, step = d0 + 1, 1
    while above(lo + step):
        lo += step
        step *= 2
        if lo - d0 > _D1_SCAN_LIMIT:
            raise ArithmeticError(f"d1 scan exceeded d0 + {_D1_SCAN_LIMIT} for alpha={alpha}")
    hi = lo + step  # above(lo) and not above(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if above(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _tighter_bound(a, d):
    lg = mp.log(1 / a, 2)
    t = a ** (d + 1)
    return 1 + d + 2 * t / (1 - a) + 4 * t * (d * (1 - a) + 1) * lg / (1 - a) ** 2


def d2_bound(alpha):
    return _tighter_bound(_alpha(alpha), d1_of(alpha))


def d3_bound(alpha):
    return _tighter_bound(_alpha(alpha), d0_of(alpha))


# g(x) = x (1 + log2(1/x)) increases on (0, _G_PEAK]
_G_PEAK = mp.power(2, 1 - 1 / mp.log(2))


def _delay_term(g):
    if g == 0:
        return mp.mpf(0)
    return to_mpf(g) * (1 - _log2(g))


def memory_delay_bound(gammas, n_states: int, xi, tol=1e-12, max_terms: int = 10**6):
    """``1 + 4 sum_d gamma(d) (1 + log2(1/gamma(d)))`` with a certified truncation.

    ``gammas`` maps ``d >= 1`` to gamma(d) (a callable, or a sequence indexed
    from d = 1). The sum is cut at ``d = K M - 1`` once the analytic tail over
    ``d >= K M``, bounded through ``gamma(d) <= xi ** (d // K)``, drops below
    ``tol``. Returns ``(partial_sum_value, truncation_error)``; the exact series
    lies in ``[value, value + truncation_error]``.
    """
    if not callable(gammas):
        seq = gammas
        gammas = lambda d: seq[d - 1]  # noqa: E731
    xi_f = Fraction(xi) if not isinstance(xi, Fraction) else xi
    if xi_f >= 1:
        raise UncertifiedSourceError("xi = 1: no geometric decay certificate (deterministic cycle)")
    if xi_f <= 0:
        raise ValueError("xi must be positive")
    k = n_states
    x = to_mpf(xi_f)
    c = _log2(1 / xi_f)
    tol = to_mpf(tol)

    def tail(m):
        xm = x**m
        return k * (xm / (1 - x) + c * xm * (m * (1 - x) + x) / (1 - x) ** 2)

    total = mp.mpf(0)
    d = 1
    m = 1
    while True:
        while d < k * m:
            total += _delay_term(gammas(d))
            d += 1
            if d > max_terms:
                raise ArithmeticError("memory delay series did not converge within max_terms")
        if x**m <= _G_PEAK and 4 * tail(m) < tol:
            return 1 + 4 * total, 4 * tail(m)
        m += 1


def parse_grid(spec: str) -> list:
    """``"lo:hi:step"`` to an exact, strictly increasing list of Fractions."""
    try:
        lo, hi, step = (Fraction(s) for s in spec.split(":"))
    except ValueError:
        raise ValueError(f"grid must look like lo:hi:step, got {spec!r}") from None
    if step <= 0 or not 0 < lo <= hi < 1:
        raise ValueError(f"grid {spec!r} must satisfy 0 < lo <= hi < 1 and step > 0")
    n = int((hi - lo) / step)
    return [lo + i * step for i in range(n + 1)]


@dataclass
class BoundPoint:
    alpha: object
    beta: object = None
    values: dict = field(default_factory=dict)
    d0: int = 0
    d1: int = 0
    p: object = None


@dataclass
class BoundCurve:
    mode: str
    points: list

    @property
    def columns(self) -> list:
        if self.mode == "ternary":
            return ["p", "alpha", "beta", "dg", "dmg", "d1"]
        return ["alpha", "r1", "r2", "r3"]

    def rows(self):
        for pt in self.points:
            if self.mode == "ternary":
                v = pt.values
                yield [pt.p, pt.alpha, pt.beta, v["Dg"], v["Dmg"], v["D1"]]
            else:
                yield [pt.alpha] + [self.ratio(pt, name) for name in ("D1", "D2", "D3")]

    @staticmethod
    def ratio(pt, name):
        return pt.values[name] / pt.values["Dmg"]

    def column(self, name) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows()]


def _ratio_point(alpha) -> BoundPoint:
    return BoundPoint(
        alpha=alpha,
        values={
            "D1": d1_bound(alpha),
            "Dmg": modified_gallager(alpha),
            "D2": d2_bound(alpha),
            "D3": d3_bound(alpha),
        },
        d0=d0_of(alpha),
        d1=d1_of(alpha),
    )


def _ternary_point(p) -> BoundPoint:
    p = Fraction(p)
    other = (1 - p) / 2
    alpha, beta = max(p, other), min(p, other)
    return BoundPoint(
        alpha=alpha,
        beta=beta,
        p=p,
        values={
            "Dg": gallager_bound(alpha, beta),
            "Dmg": modified_gallager(alpha),
            "D1": d1_bound(alpha),
        },
    )


def scan_curves(mode: str, grid: Sequence) -> BoundCurve:
    """Evaluate the figure data: ``"ternary"`` over p or ``"ratios"`` over alpha."""
    grid = list(grid)
    if any(not 0 < g < 1 for g in grid):
        raise ValueError("grid points must lie in (0, 1)")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid must be strictly increasing")
    if mode == "ternary":
        return BoundCurve(mode, [_ternary_point(p) for p in grid])
    if mode == "ratios":
        return BoundCurve(mode, [_ratio_point(a) for a in grid])
    raise ValueError(f"unknown curve mode {mode!r}")


def find_crossovers(fn: Callable, grid: Sequence, level=1, resolution=1e-4, values=None) -> list:
    """Points where ``fn`` crosses ``level``: grid sign changes refined by bisection.

    ``values`` may carry ``fn`` already evaluated on ``grid``.
    """
    out = []
    vals = [v - level for v in (values if values is not None else map(fn, grid))]
    for (a, fa), (b, fb) in zip(zip(grid, vals), zip(grid[1:], vals[1:])):
        if fa == 0:
            out.append(to_mpf(a))
        elif fa * fb < 0:
            lo, hi = to_mpf(a), to_mpf(b)
            while hi - lo > resolution:
                mid = (lo + hi) / 2
                if (fn(mid) - level) * fa > 0:
                    lo = mid
                else:
                    hi = mid
            out.append((lo + hi) / 2)
    return out


def curve_summary(grid: Sequence) -> dict:
    """Crossovers and maxima of the bound ratios to the modified Gallager bound."""
    curve = scan_curves("ratios", grid)
    r1 = curve.column("r1")
    r2 = curve.column("r2")
    return {
        "r1_crossovers": find_crossovers(lambda a: d1_bound(a) / modified_gallager(a), grid, values=r1),
        "r2_crossovers": find_crossovers(lambda a: d2_bound(a) / modified_gallager(a), grid, values=r2),
        "r1_max": max(r1),
        "r1_argmax": grid[r1.index(max(r1))],
        "r2_max": max(r2),
        "r2_argmax": grid[r2.index(max(r2))],
    }
