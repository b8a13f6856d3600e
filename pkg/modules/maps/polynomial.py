"""
Polynomial maps f: R^d -> R^n with rational coefficients

Components are sympy Poly objects over QQ in the generators x1..xd. Exact
evaluation and differentiation go through sympy and Fractions; vectorised
float evaluation and interval enclosures go through numpy.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy
from sympy import QQ, Poly

from shared.errors import ConfigError, DimensionMismatch, PreconditionFailed
from shared.interval_utils import batch_poly_enclosure, poly_enclosure
from shared.rational_utils import format_rational, parse_real

Monomial = Tuple[int, ...]
Term = Tuple[Monomial, Fraction]
MultiIndex = Tuple[int, ...]


def generators(d: int) -> Tuple[sympy.Symbol, ...]:
    if d < 1:
        raise PreconditionFailed(f"Domain dimension must be >= 1, got {d}")
    return tuple(sympy.symbols(f"x1:{d + 1}"))


def _to_fraction(c) -> Fraction:
    c = sympy.Rational(c)
    return Fraction(int(c.p), int(c.q))


def _is_exact_point(x: Sequence) -> bool:
    return all(isinstance(v, (int, Fraction)) and not isinstance(v, bool) for v in x)


class ScalarPolynomial:
    """A real polynomial g(x1..xd) with rational coefficients"""

    def __init__(self, poly: Poly):
        self.poly = poly
        self.d = len(poly.gens)

    @classmethod
    def from_terms(cls, d: int, terms: Sequence[Term]) -> "ScalarPolynomial":
        """
        Build from (monomial, coefficient) pairs; repeated monomials add up.

        Examples:
            >>> ScalarPolynomial.from_terms(1, [((2,), 1)]).evaluate((Fraction(1, 2),))
            Fraction(1, 4)
        """
        rep: Dict[Monomial, sympy.Rational] = {}
        for monomial, coef in terms:
            monomial = tuple(int(e) for e in monomial)
            if len(monomial) != d or any(e < 0 for e in monomial):
                raise DimensionMismatch(f"Monomial {monomial} does not fit {d} variables")
            coef = Fraction(coef)
            rep[monomial] = rep.get(monomial, sympy.Integer(0)) + sympy.Rational(coef.numerator, coef.denominator)
        return cls(Poly.from_dict(rep or {(0,) * d: 0}, *generators(d), domain=QQ))

    @classmethod
    def from_expression(cls, expression: Union[str, sympy.Expr], d: int) -> "ScalarPolynomial":
        gens = generators(d)
        try:
            expr = sympy.sympify(expression, locals={str(g): g for g in gens})
            return cls(Poly(expr, *gens, domain=QQ))
        except (sympy.SympifyError, sympy.BasePolynomialError, TypeError) as e:
            raise ConfigError(f"Not a rational polynomial in x1..x{d}: {expression!r} ({e})")

    @classmethod
    def constant(cls, d: int, value) -> "ScalarPolynomial":
        return cls.from_terms(d, [((0,) * d, Fraction(value))])

    @cached_property
    def terms(self) -> List[Term]:
        return [(tuple(int(e) for e in m), _to_fraction(c)) for m, c in self.poly.terms() if c != 0]

    @cached_property
    def float_terms(self) -> List[Tuple[Monomial, float]]:
        return [(m, float(c)) for m, c in self.terms]

    @property
    def degree(self) -> int:
        return int(self.poly.total_degree()) if not self.is_zero else 0

    @property
    def is_zero(self) -> bool:
        return self.poly.is_zero

    def __add__(self, other: "ScalarPolynomial") -> "ScalarPolynomial":
        return ScalarPolynomial(self.poly + other.poly)

    def __mul__(self, scalar) -> "ScalarPolynomial":
        scalar = Fraction(scalar)
        return ScalarPolynomial(self.poly * sympy.Rational(scalar.numerator, scalar.denominator))

    __rmul__ = __mul__

    def _check_point(self, x: Sequence):
        if len(x) != self.d:
            raise DimensionMismatch(f"Point has {len(x)} coordinates, polynomial has {self.d} variables")

    def evaluate(self, x: Sequence) -> Union[Fraction, float]:
        """Exact on rational points, double otherwise"""
        self._check_point(x)
        if _is_exact_point(x):
            x = [Fraction(v) for v in x]
            total = Fraction(0)
            for monomial, coef in self.terms:
                term = coef
                for v, e in zip(x, monomial):
                    if e:
                        term *= v ** e
                total += term
            return total
        return float(self.evaluate_points(np.asarray([x], dtype=float))[0])

    def evaluate_points(self, points: np.ndarray) -> np.ndarray:
        """Values at the rows of an (N, d) float array"""
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != self.d:
            raise DimensionMismatch(f"Expected points of shape (N, {self.d}), got {points.shape}")
        total = np.zeros(points.shape[0])
        for monomial, coef in self.float_terms:
            term = np.full(points.shape[0], coef)
            for axis, e in enumerate(monomial):
                if e:
                    term = term * points[:, axis] ** e
            total += term
        return total

    def derivative(self, j: MultiIndex) -> "ScalarPolynomial":
        """
        Exact partial derivative d^j.

        Examples:
            >>> ScalarPolynomial.from_expression("x1*x2**2", 2).derivative((1, 1)).terms
            [((0, 1), Fraction(2, 1))]
        """
        j = tuple(int(e) for e in j)
        if len(j) != self.d or any(e < 0 for e in j):
            raise DimensionMismatch(f"Multi-index {j} does not fit {self.d} variables")
        specs = [(axis, e) for axis, e in enumerate(j) if e]
        if not specs:
            return self
        return ScalarPolynomial(self.poly.diff(*specs))

    def enclose(self, lo: np.ndarray, hi: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Certified enclosures over the boxes [lo[b], hi[b]] of (N, d) corner arrays"""
        return batch_poly_enclosure(self.float_terms, np.atleast_2d(lo), np.atleast_2d(hi))

    def enclose_iv(self, box):
        """mpmath interval enclosure over a list of per-axis intervals"""
        return poly_enclosure(self.terms, box)

    def as_expr(self) -> sympy.Expr:
        return self.poly.as_expr()

    def __repr__(self):
        return f"ScalarPolynomial({self.as_expr()})"


@dataclass(frozen=True)
class PolynomialMap:
    """
    f = (f_1, ..., f_n) with components in d variables and curvature order l.

    snap_radius records how far snapped irrational coefficients may sit from
    the requested reals.
    """
    d: int
    components: Tuple[ScalarPolynomial, ...]
    l: int = 1
    snap_radius: float = 0.0
    sources: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.components:
            raise PreconditionFailed("A map needs at least one component")
        if self.l < 1:
            raise PreconditionFailed(f"Curvature order l must be >= 1, got {self.l}")
        for c in self.components:
            if c.d != self.d:
                raise DimensionMismatch(f"Component in {c.d} variables inside a map of {self.d} variables")

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def degree(self) -> int:
        return max(c.degree for c in self.components)

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------
    @classmethod
    def from_terms(cls, d: int, components: Sequence[Sequence[Term]], l: int = 1) -> "PolynomialMap":
        return cls(d, tuple(ScalarPolynomial.from_terms(d, terms) for terms in components), l)

    @classmethod
    def from_expressions(cls, expressions: Sequence[str], d: int, l: int = 1) -> "PolynomialMap":
        return cls(d, tuple(ScalarPolynomial.from_expression(e, d) for e in expressions), l)

    @classmethod
    def from_config(cls, spec: Dict[str, Any], bits: int = 128) -> "PolynomialMap":
        """
        Parse {"d": 1, "n": 2, "l": 2, "components": [[["1", 0], ["1", 1]], ...],
        "shift": [...]}: each term is [coefficient, e_1, ..., e_d]. Coefficients
        and shift entries may be irrational expressions ("phi",
        "(1+sqrt(5))/2"), snapped to convergents with denominators below 2^bits.
        """
        if not isinstance(spec, dict):
            raise ConfigError(f"Map spec must be an object, got {spec!r}")
        try:
            d = int(spec["d"])
            l = int(spec.get("l", 1))
            raw_components = spec["components"]
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"Invalid map spec: {e}")
        if "n" in spec and int(spec["n"]) != len(raw_components):
            raise ConfigError(f"Map spec declares n={spec['n']} but lists {len(raw_components)} components")

        radius = 0.0
        components = []
        for index, raw_terms in enumerate(raw_components):
            terms = []
            for raw in raw_terms:
                if not isinstance(raw, (list, tuple)) or len(raw) != d + 1:
                    raise ConfigError(
                        f"Term {raw!r} of component {index + 1} must be [coefficient, e_1..e_{d}]"
                    )
                snapped = parse_real(raw[0], bits)
                radius = max(radius, snapped.radius)
                try:
                    monomial = tuple(int(e) for e in raw[1:])
                except (TypeError, ValueError):
                    raise ConfigError(f"Exponents of term {raw!r} must be integers")
                terms.append((monomial, snapped.value))
            components.append(ScalarPolynomial.from_terms(d, terms))

        f = cls(d, tuple(components), l, radius, {"spec": spec})
        if "shift" in spec:
            shift = [parse_real(v, bits) for v in spec["shift"]]
            radius = max([radius] + [s.radius for s in shift])
            f = shifted_map([s.value for s in shift], f)
            f = PolynomialMap(f.d, f.components, f.l, radius, {"spec": spec})
        return f

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d": self.d,
            "n": self.n,
            "l": self.l,
            "components": [
                [[format_rational(c)] + list(m) for m, c in comp.terms] for comp in self.components
            ],
        }

    # ------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------
    def evaluate(self, x: Sequence) -> Tuple:
        """
        f(x), exact on rational points.

        Examples:
            >>> moment_curve(2).evaluate((Fraction(1, 2),))
            (Fraction(1, 2), Fraction(1, 4))
        """
        return tuple(c.evaluate(x) for c in self.components)

    __call__ = evaluate

    def evaluate_float(self, x: Sequence) -> np.ndarray:
        return self.evaluate_points(np.asarray([x], dtype=float))[0]

    def evaluate_points(self, points: np.ndarray) -> np.ndarray:
        """f at the rows of an (N, d) array, as an (N, n) array"""
        return np.stack([c.evaluate_points(points) for c in self.components], axis=1)

    def value_at_origin(self) -> Tuple[Fraction, ...]:
        return self.evaluate((Fraction(0),) * self.d)

    # ------------------------------------------------------------------
    # Differentiation
    # ------------------------------------------------------------------
    def derivative(self, j: MultiIndex) -> "PolynomialMap":
        """Componentwise d^j f"""
        return PolynomialMap(self.d, tuple(c.derivative(j) for c in self.components), self.l, self.snap_radius)

    def jacobian(self) -> List[List[ScalarPolynomial]]:
        """Entries d f_c / d x_e as an n x d table of polynomials"""
        units = [tuple(int(a == e) for a in range(self.d)) for e in range(self.d)]
        return [[c.derivative(u) for u in units] for c in self.components]

    def jacobian_at(self, x: Sequence) -> np.ndarray:
        point = np.asarray([x], dtype=float)
        return np.array([[entry.evaluate_points(point)[0] for entry in row] for row in self.jacobian()])

    # ------------------------------------------------------------------
    # Transformations
    # ------------------------------------------------------------------
    def linear_form(self, i: Sequence[int]) -> ScalarPolynomial:
        """(f(x), i) as a scalar polynomial"""
        if len(i) != self.n:
            raise DimensionMismatch(f"Vector of length {len(i)} paired with a map into R^{self.n}")
        total = ScalarPolynomial.constant(self.d, 0)
        for coef, comp in zip(i, self.components):
            if coef:
                total = total + comp * coef
        return total

    def compose_linear(self, A: Sequence[Sequence], b: Optional[Sequence] = None) -> "PolynomialMap":
        """x -> f(Ax + b) for a rational d x d matrix A"""
        gens = generators(self.d)
        if len(A) != self.d or any(len(row) != self.d for row in A):
            raise DimensionMismatch(f"Reparametrization must be {self.d} x {self.d}")
        b = b if b is not None else [0] * self.d
        subs = {}
        for e, g in enumerate(gens):
            expr = sum(sympy.Rational(Fraction(A[e][c]).numerator, Fraction(A[e][c]).denominator) * gens[c]
                       for c in range(self.d))
            shift = Fraction(b[e])
            subs[g] = expr + sympy.Rational(shift.numerator, shift.denominator)
        components = tuple(
            ScalarPolynomial(Poly(c.as_expr().xreplace(subs), *gens, domain=QQ)) for c in self.components
        )
        return PolynomialMap(self.d, components, self.l, self.snap_radius)

    def taylor_truncation(self, order: Optional[int] = None) -> "PolynomialMap":
        """Drop monomials of total degree above order (default l) at the origin"""
        order = self.l if order is None else order
        components = tuple(
            ScalarPolynomial.from_terms(self.d, [(m, c) for m, c in comp.terms if sum(m) <= order])
            for comp in self.components
        )
        return PolynomialMap(self.d, components, self.l, self.snap_radius)


def moment_curve(n: int) -> PolynomialMap:
    """x -> (x, x^2, ..., x^n), curved of order n"""
    return PolynomialMap.from_terms(1, [[((e,), 1)] for e in range(1, n + 1)], l=n)


def shifted_map(alpha: Sequence, f: PolynomialMap) -> PolynomialMap:
    """x -> alpha + f(x), so the image of the origin moves by alpha"""
    if len(alpha) != f.n:
        raise DimensionMismatch(f"Shift of length {len(alpha)} for a map into R^{f.n}")
    components = tuple(
        c + ScalarPolynomial.constant(f.d, Fraction(a)) for a, c in zip(alpha, f.components)
    )
    return PolynomialMap(f.d, components, f.l, f.snap_radius)
