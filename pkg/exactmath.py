"""Exact rational primitives.

Everything the exact paths need lives here: the ``Rational`` scalar (a
``fractions.Fraction``, always in lowest terms with a positive
denominator), dense lower-triangular matrices with exact inversion, and
truncated power series with coefficient division. Nothing in this module
touches floating point.
"""

import math
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple

Rational = Fraction

Vector = List[Rational]


class SingularMatrixError(ValueError):
    """A triangular matrix has a zero on its diagonal."""

    def __init__(self, index: int):
        super().__init__(f"Matrix is singular: diagonal entry {index} is zero")
        self.index = index


class SeriesDivisionError(ValueError):
    pass


class LowerTriangularMatrix:
    """Dense square matrix of Rationals with a zero strictly-upper part.

    Instances are immutable; arithmetic returns new matrices.
    """

    def __init__(self, rows: Iterable[Iterable]):
        rows = tuple(tuple(Fraction(x) for x in row) for row in rows)
        dim = len(rows)
        if dim == 0:
            raise ValueError("Matrix must have at least one row")
        for i, row in enumerate(rows):
            if len(row) != dim:
                raise ValueError(f"Row {i} has {len(row)} entries, expected {dim}")
            if any(row[j] != 0 for j in range(i + 1, dim)):
                raise ValueError(f"Row {i} has nonzero entries above the diagonal")
        self._rows = rows

    @classmethod
    def identity(cls, dim: int) -> "LowerTriangularMatrix":
        return cls([[1 if i == j else 0 for j in range(dim)] for i in range(dim)])

    @classmethod
    def zeros(cls, dim: int) -> "LowerTriangularMatrix":
        return cls([[0] * dim for _ in range(dim)])

    @property
    def dim(self) -> int:
        return len(self._rows)

    @property
    def rows(self) -> Tuple[Tuple[Rational, ...], ...]:
        return self._rows

    def __getitem__(self, index: Tuple[int, int]) -> Rational:
        i, j = index
        return self._rows[i][j]

    def row(self, i: int) -> Tuple[Rational, ...]:
        return self._rows[i]

    def diagonal(self) -> Tuple[Rational, ...]:
        return tuple(self._rows[i][i] for i in range(self.dim))

    def split(self) -> Tuple["LowerTriangularMatrix", "LowerTriangularMatrix"]:
        """Return (D, R): the diagonal part and the strictly lower part."""
        dim = self.dim
        d = [[self._rows[i][i] if i == j else 0 for j in range(dim)] for i in range(dim)]
        r = [[self._rows[i][j] if j < i else 0 for j in range(dim)] for i in range(dim)]
        return LowerTriangularMatrix(d), LowerTriangularMatrix(r)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self._rows for x in row)

    def scale(self, factor) -> "LowerTriangularMatrix":
        factor = Fraction(factor)
        return LowerTriangularMatrix([[x * factor for x in row] for row in self._rows])

    def apply(self, v: Sequence) -> Vector:
        """Matrix-vector product ``A v``."""
        if len(v) != self.dim:
            raise ValueError(f"Dimension mismatch: matrix is {self.dim}x{self.dim}, "
                             f"vector has length {len(v)}")
        return [sum((row[j] * v[j] for j in range(i + 1)), Fraction(0))
                for i, row in enumerate(self._rows)]

    def _check_same_dim(self, other: "LowerTriangularMatrix"):
        if other.dim != self.dim:
            raise ValueError(f"Dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if not isinstance(other, LowerTriangularMatrix):
            return NotImplemented
        self._check_same_dim(other)
        return LowerTriangularMatrix([[a + b for a, b in zip(r1, r2)]
                                      for r1, r2 in zip(self._rows, other._rows)])

    def __sub__(self, other):
        if not isinstance(other, LowerTriangularMatrix):
            return NotImplemented
        self._check_same_dim(other)
        return LowerTriangularMatrix([[a - b for a, b in zip(r1, r2)]
                                      for r1, r2 in zip(self._rows, other._rows)])

    def __neg__(self):
        return self.scale(-1)

    def __matmul__(self, other):
        if isinstance(other, LowerTriangularMatrix):
            self._check_same_dim(other)
            dim = self.dim
            # (AB)(i, j) only collects k in [j, i] for triangular factors
            return LowerTriangularMatrix([
                [sum((self._rows[i][k] * other._rows[k][j] for k in range(j, i + 1)), Fraction(0))
                 if j <= i else 0 for j in range(dim)]
                for i in range(dim)
            ])
        if isinstance(other, (list, tuple)):
            return self.apply(other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, LowerTriangularMatrix):
            return NotImplemented
        return self._rows == other._rows

    def __hash__(self):
        return hash(self._rows)

    def __repr__(self):
        body = ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in self._rows)
        return f"LowerTriangularMatrix([{body}])"


def invert_lower_triangular(a: LowerTriangularMatrix) -> LowerTriangularMatrix:
    """Exact inverse by forward substitution, one column at a time."""
    dim = a.dim
    for i, d in enumerate(a.diagonal()):
        if d == 0:
            raise SingularMatrixError(i)

    inv = [[Fraction(0)] * dim for _ in range(dim)]
    for j in range(dim):
        inv[j][j] = 1 / a[j, j]
        for i in range(j + 1, dim):
            acc = sum((a[i, k] * inv[k][j] for k in range(j, i)), Fraction(0))
            inv[i][j] = -acc / a[i, i]
    return LowerTriangularMatrix(inv)


def invert_by_nilpotent_expansion(a: LowerTriangularMatrix) -> LowerTriangularMatrix:
    """Inverse as ``sum_{k<dim} (-D^{-1} R)^k D^{-1}`` with ``A = D + R``.

    ``D^{-1} R`` is strictly lower triangular, hence nilpotent of index at
    most ``dim``, so the finite sum is exact.
    """
    dim = a.dim
    d, r = a.split()
    diag = d.diagonal()
    for i, x in enumerate(diag):
        if x == 0:
            raise SingularMatrixError(i)

    d_inv = LowerTriangularMatrix([[1 / diag[i] if i == j else 0 for j in range(dim)]
                                   for i in range(dim)])
    step = -(d_inv @ r)
    term = LowerTriangularMatrix.identity(dim)
    total = LowerTriangularMatrix.zeros(dim)
    for _ in range(dim):
        total = total + term
        term = term @ step
    return total @ d_inv


def matrix_power(a: LowerTriangularMatrix, k: int) -> LowerTriangularMatrix:
    if k < 0:
        raise ValueError("Power must be nonnegative")
    result = LowerTriangularMatrix.identity(a.dim)
    for _ in range(k):
        result = result @ a
    return result


def matrix_power_apply(a: LowerTriangularMatrix, k: int, v: Sequence) -> Vector:
    """``A^k v`` by ``k`` successive exact matrix-vector products."""
    if k < 0:
        raise ValueError("Power must be nonnegative")
    if len(v) != a.dim:
        raise ValueError(f"Dimension mismatch: matrix is {a.dim}x{a.dim}, "
                         f"vector has length {len(v)}")
    result = [Fraction(x) for x in v]
    for _ in range(k):
        result = a.apply(result)
    return result


# ----------------------------------------------------------------------
# Power series
# ----------------------------------------------------------------------
class SeriesCoefficients:
    """Truncated ordinary power series ``sum_{k<=order} c_k x^k``.

    Coefficients past ``order`` are unknown, so products and sums truncate
    to the smaller order of their operands.
    """

    def __init__(self, coeffs: Iterable):
        coeffs = tuple(Fraction(c) for c in coeffs)
        if not coeffs:
            raise ValueError("A series needs at least one coefficient")
        self._coeffs = coeffs

    @property
    def order(self) -> int:
        return len(self._coeffs) - 1

    @property
    def coeffs(self) -> Tuple[Rational, ...]:
        return self._coeffs

    def __getitem__(self, k: int) -> Rational:
        return self._coeffs[k]

    def __len__(self):
        return len(self._coeffs)

    def __iter__(self):
        return iter(self._coeffs)

    def coefficient(self, k: int) -> Rational:
        """Coefficient of ``x^k``; zero past the stored terms."""
        return self._coeffs[k] if k < len(self._coeffs) else Fraction(0)

    def truncate(self, order: int) -> "SeriesCoefficients":
        return SeriesCoefficients(self.coefficient(k) for k in range(order + 1))

    def valuation(self) -> int:
        """Index of the first nonzero coefficient, or -1 if all are zero."""
        for k, c in enumerate(self._coeffs):
            if c != 0:
                return k
        return -1

    def scale(self, factor) -> "SeriesCoefficients":
        factor = Fraction(factor)
        return SeriesCoefficients(c * factor for c in self._coeffs)

    def dilate(self, factor) -> "SeriesCoefficients":
        """Coefficients of ``f(factor * x)``."""
        factor = Fraction(factor)
        return SeriesCoefficients(c * factor ** k for k, c in enumerate(self._coeffs))

    def __add__(self, other):
        if not isinstance(other, SeriesCoefficients):
            return NotImplemented
        order = min(self.order, other.order)
        return SeriesCoefficients(self[k] + other[k] for k in range(order + 1))

    def __sub__(self, other):
        if not isinstance(other, SeriesCoefficients):
            return NotImplemented
        order = min(self.order, other.order)
        return SeriesCoefficients(self[k] - other[k] for k in range(order + 1))

    def __mul__(self, other):
        if not isinstance(other, SeriesCoefficients):
            return NotImplemented
        order = min(self.order, other.order)
        return SeriesCoefficients(
            sum((self[j] * other[k - j] for j in range(k + 1)), Fraction(0))
            for k in range(order + 1)
        )

    def __eq__(self, other):
        if not isinstance(other, SeriesCoefficients):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self):
        return hash(self._coeffs)

    def __repr__(self):
        return f"SeriesCoefficients([{', '.join(str(c) for c in self._coeffs)}])"


def egf_values(series: SeriesCoefficients) -> List[Rational]:
    """Sequence ``a_k = k! c_k`` encoded by ``series`` read as an EGF."""
    return [c * math.factorial(k) for k, c in enumerate(series)]


def from_egf_values(values: Iterable) -> SeriesCoefficients:
    """Series whose exponential generating coefficients are ``values``."""
    return SeriesCoefficients(Fraction(a) / math.factorial(k) for k, a in enumerate(values))


def exp_series(c, order: int) -> SeriesCoefficients:
    """``e^{c x}`` truncated at ``x^order``: coefficients ``c^k / k!``."""
    if order < 0:
        raise ValueError("Order must be nonnegative")
    c = Fraction(c)
    return from_egf_values(c ** k for k in range(order + 1))


def series_divide(numerator: SeriesCoefficients, denominator: SeriesCoefficients,
                  order: int) -> SeriesCoefficients:
    """Quotient series up to ``x^order``.

    A common factor ``x^m`` (``m`` the valuation of the denominator) is
    cancelled first, then the quotient is solved coefficient by coefficient.
    Stored terms are read as exact; missing terms are zero, so callers that
    divide transcendental series must pass at least ``order + m`` terms.
    """
    if order < 0:
        raise ValueError("Order must be nonnegative")
    m = denominator.valuation()
    if m < 0:
        raise SeriesDivisionError("Denominator is identically zero up to its order")

    num_val = numerator.valuation()
    if 0 <= num_val < m:
        raise SeriesDivisionError(
            f"Numerator valuation {num_val} is below denominator valuation {m}; "
            "the quotient is not a power series"
        )

    a = [numerator.coefficient(k + m) for k in range(order + 1)]
    b = [denominator.coefficient(k + m) for k in range(order + 1)]
    lead = b[0]

    q: List[Rational] = []
    for k in range(order + 1):
        acc = a[k] - sum((b[j] * q[k - j] for j in range(1, k + 1)), Fraction(0))
        q.append(acc / lead)
    return SeriesCoefficients(q)
