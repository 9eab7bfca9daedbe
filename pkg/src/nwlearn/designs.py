"""Polynomial combinatorial designs over a prime field.

Row ``i`` of a design is the graph of a polynomial ``q_i`` of degree at most
``deg`` over GF(p), restricted to the evaluation points ``0..l-1``; the cell
``(j, q_i(j))`` is the universe index ``j*p + q_i(j)``.  Two distinct
polynomials agree on at most ``deg`` points, which bounds pairwise row
intersections.  Seeds are Python ints of ``universe`` bits.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, StructuralError


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    f = 2
    while f * f <= p:
        if p % f == 0:
            return False
        f += 1
    return True


def smallest_prime_at_least(l: int) -> int:
    p = max(2, l)
    while not is_prime(p):
        p += 1
    return p


@dataclass(frozen=True)
class DesignMatrix:
    log_rows: int
    set_size: int
    degree_bound: int
    field_prime: int
    rows: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def universe(self) -> int:
        return self.set_size * self.field_prime

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    def row(self, x: int) -> tuple[int, ...]:
        if not 0 <= x < len(self.rows):
            raise StructuralError(f"row {x} outside 0..{len(self.rows) - 1}")
        return self.rows[x]

    @functools.cached_property
    def complements(self) -> tuple[tuple[int, ...], ...]:
        """Sorted universe positions outside each row."""
        everything = range(self.universe)
        out = []
        for J in self.rows:
            inside = set(J)
            out.append(tuple(i for i in everything if i not in inside))
        return tuple(out)

    def incidence(self) -> np.ndarray:
        inc = np.zeros((self.num_rows, self.universe), dtype=np.float32)
        for i, J in enumerate(self.rows):
            inc[i, list(J)] = 1.0
        return inc

    def intersection_counts(self) -> np.ndarray:
        inc = self.incidence()
        return np.rint(inc @ inc.T).astype(np.int64)

    def max_intersection(self) -> int:
        """Largest ``|J_i & J_j|`` over distinct rows (0 for a one-row design)."""
        if self.num_rows < 2:
            return 0
        counts = self.intersection_counts()
        np.fill_diagonal(counts, -1)
        return int(counts.max())

    def to_text(self) -> str:
        head = f"{self.log_rows} {self.set_size} {self.degree_bound} {self.field_prime} {self.universe}"
        return "\n".join([head] + [" ".join(map(str, J)) for J in self.rows]) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "DesignMatrix":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        b, l, deg, p, m = map(int, lines[0].split())
        rows = tuple(tuple(map(int, ln.split())) for ln in lines[1:])
        design = cls(b, l, deg, p, rows)
        if design.universe != m or len(rows) != 1 << b:
            raise StructuralError("design dump header does not match its rows")
        return design


def polynomial_coefficients(i: int, p: int, deg: int) -> tuple[int, ...]:
    """Base-``p`` digits of ``i``, constant term first."""
    coeffs = []
    for _ in range(deg + 1):
        coeffs.append(i % p)
        i //= p
    return tuple(coeffs)


def eval_poly(coeffs, x: int, p: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


@functools.lru_cache(maxsize=32)
def make_design(log_rows: int, set_size: int, degree_bound: int) -> DesignMatrix:
    """Build the ``2^log_rows``-row design with sets of size ``set_size``."""
    b, l, deg = log_rows, set_size, degree_bound
    if b < 0 or l < 1 or deg < 0:
        raise ParameterError("need log_rows >= 0, set_size >= 1, degree_bound >= 0")
    p = smallest_prime_at_least(l)
    if p ** (deg + 1) < 1 << b:
        raise ParameterError(
            f"only {p}^{deg + 1} polynomials of degree <= {deg} over GF({p}), need {1 << b} rows")
    rows = []
    for i in range(1 << b):
        q = polynomial_coefficients(i, p, deg)
        rows.append(tuple(j * p + eval_poly(q, j, p) for j in range(l)))
    return DesignMatrix(b, l, deg, p, tuple(rows))


def restrict(w: int, J) -> int:
    """Bits of ``w`` at the positions ``J`` (sorted), packed LSB-first."""
    out = 0
    for k, pos in enumerate(J):
        out |= ((w >> pos) & 1) << k
    return out


def complement(w: int, x: int, A: DesignMatrix) -> int:
    """Bits of ``w`` outside row ``x``, in increasing position order."""
    return restrict(w, A.complements[x])


def assemble(x: int, u: int, v: int, A: DesignMatrix) -> int:
    """Seed with ``u`` on row ``x`` and ``v`` filling the remaining positions."""
    J = A.row(x)
    rest = A.complements[x]
    if u >> len(J) or v >> len(rest) or u < 0 or v < 0:
        raise StructuralError("u or v longer than the positions it fills")
    w = 0
    for k, pos in enumerate(J):
        w |= ((u >> k) & 1) << pos
    for k, pos in enumerate(rest):
        w |= ((v >> k) & 1) << pos
    return w


def check_seed(w: int, A: DesignMatrix) -> None:
    if w < 0 or w >> A.universe:
        raise StructuralError(f"seed does not fit in the {A.universe}-bit universe")


__all__ = [
    "DesignMatrix", "assemble", "check_seed", "complement", "eval_poly", "is_prime",
    "make_design", "polynomial_coefficients", "restrict", "smallest_prime_at_least",
]
