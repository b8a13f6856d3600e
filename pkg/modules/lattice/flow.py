"""Schmidt embedding [alpha], the diagonal flow g_t and the small-divisor lemma"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
from mpmath import iv

from modules.exterior.subgroup import DiscreteSubgroup
from modules.lattice.shortest import DEFAULT_DELTA_BUDGET, DeltaResult, delta
from modules.lattice.target import IntVector, TargetVector, norm_sq
from shared.errors import DimensionMismatch, PreconditionFailed
from shared.interval_utils import interval_bounds, to_interval
from shared.logger import get_logger

logger = get_logger()


def schmidt_embedding(alpha: TargetVector) -> DiscreteSubgroup:
    """
    [alpha] = {(i, (alpha, i)) : i in Z^n}, basis rows (e_j, alpha_j).

    Examples:
        >>> schmidt_embedding(TargetVector.from_spec(["1/2"])).basis.tolist()
        [[1.0, 0.5]]
    """
    n = alpha.n
    rows = [
        tuple(Fraction(int(c == j)) for c in range(n)) + (alpha.coordinates[j],)
        for j in range(n)
    ]
    return DiscreteSubgroup.from_rational_rows(rows)


@dataclass(frozen=True)
class DiagonalFlow:
    """g_t = diag(e^{-t}, ..., e^{-t}, e^{nt}) acting on R^{n+1}"""
    t: float
    n: int

    @property
    def factors(self) -> np.ndarray:
        return np.array([math.exp(-self.t)] * self.n + [math.exp(self.n * self.t)])

    @property
    def determinant(self) -> float:
        return float(np.prod(self.factors))

    @property
    def log_determinant(self) -> float:
        return -self.n * self.t + self.n * self.t

    def apply(self, v: Sequence[float]) -> np.ndarray:
        """Scale a vector, or every row of a matrix"""
        v = np.asarray(v, dtype=float)
        if v.shape[-1] != self.n + 1:
            raise DimensionMismatch(f"g_t acts on R^{self.n + 1}, got length {v.shape[-1]}")
        return v * self.factors

    def apply_subgroup(self, gamma: DiscreteSubgroup) -> DiscreteSubgroup:
        if gamma.dimension != self.n + 1:
            raise DimensionMismatch(
                f"g_t acts on R^{self.n + 1}, subgroup lives in R^{gamma.dimension}"
            )
        return DiscreteSubgroup(
            self.apply(gamma.basis),
            exact_basis=gamma.rational_basis(),
            flow_times=gamma.flow_times + (self.t,),
        )

    def compose(self, other: "DiagonalFlow") -> "DiagonalFlow":
        if other.n != self.n:
            raise DimensionMismatch("Flows act on different dimensions")
        return DiagonalFlow(self.t + other.t, self.n)


def g_flow(t: float, n: int) -> DiagonalFlow:
    return DiagonalFlow(float(t), int(n))


@dataclass(frozen=True)
class LemmaParameters:
    epsilon: float
    t: float


def _check_lemma_domain(a, i: Sequence[int]) -> Tuple[Fraction, int]:
    a = Fraction(a)
    q = norm_sq(i)
    if q == 0:
        raise PreconditionFailed("Lemma needs a nonzero integer vector")
    if a <= 0:
        raise PreconditionFailed(f"Lemma needs a > 0, got {a}", {"a": float(a)})
    if a * a > q:
        raise PreconditionFailed(
            "Lemma needs a <= ||i|| (t would be negative)",
            {"a": float(a), "norm": math.sqrt(q)},
        )
    return a, q


def _log_fraction(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


def lemma_eps_t(a, i: Sequence[int], n: int) -> LemmaParameters:
    """
    epsilon = sqrt(2) (a ||i||^n)^(1/(n+1)) and t = log(||i|| / a) / (n+1).

    Examples:
        >>> lemma_eps_t(5, (3, 4), 2).t
        0.0
    """
    a, q = _check_lemma_domain(a, i)
    if a * a == q:
        return LemmaParameters(math.sqrt(2.0) * math.sqrt(q), 0.0)
    log_a = _log_fraction(a)
    log_norm = 0.5 * math.log(q)
    t = (log_norm - log_a) / (n + 1)
    epsilon = math.sqrt(2.0) * math.exp((log_a + n * log_norm) / (n + 1))
    return LemmaParameters(epsilon, t)


def lemma_epsilon_interval(a, i: Sequence[int], n: int):
    """Outward-rounded enclosure of epsilon"""
    a, q = _check_lemma_domain(a, i)
    norm_power = iv.mpf(q) ** (n // 2) if n % 2 == 0 else iv.sqrt(iv.mpf(q)) ** n
    inner = to_interval(a) * norm_power
    return iv.sqrt(2) * iv.exp(iv.log(inner) / (n + 1))


@dataclass(frozen=True)
class LemmaCheck:
    """
    Outcome of delta(g_t[alpha]) <= epsilon at the lemma's (epsilon, t).

    status is "holds" when the delta enclosure lies below the epsilon
    enclosure, "violated" when above, and "tight" when they overlap
    (equality up to rounding).
    """
    i: IntVector
    a: Fraction
    dot: Fraction
    epsilon: float
    t: float
    delta: DeltaResult
    status: str

    def to_dict(self):
        return {
            "i": list(self.i),
            "a": float(self.a),
            "dot": float(self.dot),
            "epsilon": self.epsilon,
            "t": self.t,
            "delta": self.delta.value,
            "delta_certified": self.delta.certified,
            "status": self.status,
        }


def lemma_check(alpha: TargetVector, i: Sequence[int], a, node_budget: int = DEFAULT_DELTA_BUDGET) -> LemmaCheck:
    """Flow [alpha] by the lemma's t and compare its shortest vector with epsilon"""
    i = tuple(int(x) for x in i)
    a = Fraction(a)
    dot = alpha.dot(i)
    if abs(dot) > a:
        raise PreconditionFailed(
            "Lemma needs |(alpha, i)| <= a",
            {"dot": float(dot), "a": float(a), "i": list(i)},
        )
    params = lemma_eps_t(a, i, alpha.n)
    flowed = g_flow(params.t, alpha.n).apply_subgroup(schmidt_embedding(alpha))
    result = delta(flowed, node_budget=node_budget)
    eps_lo, eps_hi = interval_bounds(lemma_epsilon_interval(a, i, alpha.n))
    d_lo, d_hi = result.interval
    if d_hi <= eps_lo:
        status = "holds"
    elif d_lo > eps_hi:
        status = "violated"
        logger.warning("small-divisor lemma violated", {"i": i, "a": float(a), "delta": result.value})
    else:
        status = "tight"
    return LemmaCheck(i, a, dot, params.epsilon, params.t, result, status)


@dataclass(frozen=True)
class TrajectoryPoint:
    t: float
    delta: DeltaResult
    witness_bounds: Tuple[float, ...]


def witness_vector_norm(alpha: TargetVector, i: Sequence[int], t: float) -> float:
    """||g_t (i, (alpha, i))||, an upper bound for delta(g_t[alpha])"""
    n = alpha.n
    return math.sqrt(math.exp(-2 * t) * norm_sq(i) + math.exp(2 * n * t) * float(alpha.dot(i)) ** 2)


def flow_trajectory(
    alpha: TargetVector,
    t_grid: Sequence[float],
    witnesses: Optional[Sequence[IntVector]] = None,
    norm: str = "euclidean",
    node_budget: int = DEFAULT_DELTA_BUDGET,
) -> List[TrajectoryPoint]:
    """
    delta(g_t[alpha]) along a t-grid with single-witness upper bounds.

    The witness bounds are euclidean lengths, which also bound the sup norm.
    """
    embedding = schmidt_embedding(alpha)
    witnesses = list(witnesses or [])
    points = []
    for t in t_grid:
        result = delta(g_flow(t, alpha.n).apply_subgroup(embedding), norm=norm, node_budget=node_budget)
        bounds = tuple(witness_vector_norm(alpha, w, t) for w in witnesses)
        points.append(TrajectoryPoint(float(t), result, bounds))
    logger.info("flow trajectory computed", {"points": len(points), "witnesses": len(witnesses)})
    return points
