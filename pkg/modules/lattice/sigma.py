"""
Approximation profile sigma(alpha)_k = min{|(alpha, i)| : 0 < ||i|| <= 2^k}

Two engines compute the exact minimum:
  - exhaustive: every canonical point of the ball, float prefilter in numpy
    followed by exact comparison of the near-minimal candidates;
  - branch-and-bound: Fincke-Pohst enumeration of the ellipsoid
    ||i||^2/R^2 + (alpha, i)^2/b^2 <= 2 in an LLL-reduced basis, where b is
    the best value found so far.
Ties are broken by (value, ||i||^2, i) so both engines return the same witness.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from modules.lattice.enumeration import ball_points_array
from modules.lattice.reduction import NodeCounter, enumerate_ellipsoid_exact, lll_reduce
from modules.lattice.target import IntVector, TargetVector, canonical, is_canonical, norm_sq
from shared.errors import ArithDensityError, DegenerateFit, PreconditionFailed
from shared.logger import get_logger
from shared.rational_utils import format_float
from shared.report_writer import read_csv_report, write_csv_report

logger = get_logger()

DEFAULT_EXHAUSTIVE_LIMIT = 10 ** 6
DEFAULT_NODE_BUDGET = 10 ** 9
PROFILE_COLUMNS = ["k", "value_num", "value_den", "value_float", "witness"]

_Key = Tuple[Fraction, int, IntVector]


@dataclass(frozen=True)
class SigmaResult:
    """sigma(alpha)_k with its witness"""
    k: int
    value: Fraction
    witness: IntVector
    engine: str = "exhaustive"
    nodes: int = 0

    def to_dict(self):
        return {
            "k": self.k,
            "value": f"{self.value.numerator}/{self.value.denominator}",
            "value_float": float(self.value),
            "witness": list(self.witness),
            "engine": self.engine,
        }


@dataclass
class SigmaProfile:
    """sigma(alpha)_k for k = 0..K"""
    alpha: TargetVector
    entries: List[SigmaResult] = field(default_factory=list)

    @property
    def values(self) -> List[Fraction]:
        return [e.value for e in self.entries]

    def __getitem__(self, k: int) -> SigmaResult:
        return self.entries[k]

    def __len__(self) -> int:
        return len(self.entries)


def sigma(
    alpha: TargetVector,
    k: int,
    engine: str = "auto",
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
    node_budget: int = DEFAULT_NODE_BUDGET,
    workers: int = 1,
) -> SigmaResult:
    """
    Exact sigma(alpha)_k and a witness attaining it.

    Args:
        engine: "auto", "exhaustive" or "bnb"
        exhaustive_limit: auto uses the exhaustive engine while (2*2^k+1)^n fits
        node_budget: branch-and-bound node cap (BudgetExceeded beyond it)
        workers: threads for the exhaustive engine (split by leading coordinate)

    Examples:
        >>> sigma(TargetVector.from_spec(["1", "1/2"]), 2).witness
        (1, -2)
    """
    if k < 0:
        raise PreconditionFailed(f"sigma needs k >= 0, got {k}")
    R = 2 ** k
    if engine == "auto":
        engine = "exhaustive" if (2 * R + 1) ** alpha.n <= exhaustive_limit else "bnb"
        logger.debug("sigma engine selected", {"k": k, "n": alpha.n, "engine": engine})

    if engine == "exhaustive":
        key = _sigma_exhaustive(alpha, R, workers)
        return SigmaResult(k, key[0], key[2], "exhaustive", 0)
    if engine == "bnb":
        key, nodes = _sigma_branch_and_bound(alpha, R, node_budget)
        return SigmaResult(k, key[0], key[2], "bnb", nodes)
    raise PreconditionFailed(f"Unknown sigma engine '{engine}'")


# ----------------------------------------------------------------------
# Exhaustive engine
# ----------------------------------------------------------------------

def _exhaustive_block(alpha: TargetVector, R: int, first: Optional[Sequence[int]]) -> Optional[_Key]:
    points = ball_points_array(alpha.n, R, first)
    if points.shape[0] == 0:
        return None
    shadow = alpha.float_shadow
    values = np.abs(points.astype(float) @ shadow)
    # Bound on |float - exact| for every point of the ball
    tol = 4.0 * (alpha.n + 2) * np.finfo(float).eps * R * float(np.abs(shadow).sum())
    candidates = points[values <= values.min() + 2.0 * tol + np.finfo(float).tiny]
    best = None
    for row in candidates:
        i = tuple(int(x) for x in row)
        key = (abs(alpha.dot(i)), norm_sq(i), i)
        if best is None or key < best:
            best = key
    return best


def _sigma_exhaustive(alpha: TargetVector, R: int, workers: int) -> _Key:
    if workers <= 1:
        return _exhaustive_block(alpha, R, None)
    slices = [list(range(w, R + 1, workers)) for w in range(workers)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        keys = [key for key in pool.map(lambda s: _exhaustive_block(alpha, R, s), slices) if key]
    return min(keys)


# ----------------------------------------------------------------------
# Branch-and-bound engine
# ----------------------------------------------------------------------

def _sigma_branch_and_bound(alpha: TargetVector, R: int, node_budget: int) -> Tuple[_Key, int]:
    A = alpha.integer_form
    D = alpha.common_denominator
    n = alpha.n
    R2 = R * R
    counter = NodeCounter(node_budget)

    # Unit vectors always lie in the ball
    best = min((abs(A[j]), 1, canonical(tuple(int(c == j) for c in range(n)))) for j in range(n))

    def offer(i: IntVector):
        nonlocal best
        i = canonical(i)
        q = norm_sq(i)
        if q > R2:
            return
        key = (abs(sum(a * x for a, x in zip(A, i))), q, i)
        if key < best:
            best = key

    restarts = 0
    while True:
        B = best[0]
        b = Fraction(B) if B > 0 else Fraction(1, 2)
        lam, mu = (B, R) if B > 0 else (1, 2 * R)
        rows = [[lam if c == j else 0 for c in range(n)] + [mu * A[j]] for j in range(n)]
        _, T = lll_reduce(rows)
        for row in T:
            offer(tuple(row))
        if best[0] < B:
            restarts += 1
            continue

        gram_i = [
            [Fraction(int(r == c), R2) + Fraction(A[r] * A[c]) / (b * b) for c in range(n)]
            for r in range(n)
        ]
        gram_y = [
            [sum(T[p][r] * gram_i[r][c] * T[q][c] for r in range(n) for c in range(n)) for q in range(n)]
            for p in range(n)
        ]

        restart = False
        for y in enumerate_ellipsoid_exact(gram_y, Fraction(2), counter):
            i = tuple(sum(y[r] * T[r][c] for r in range(n)) for c in range(n))
            if not is_canonical(i):
                continue
            offer(i)
            if B > 0 and 4 * best[0] < B:
                restart = True
                break
        if not restart:
            break
        restarts += 1

    logger.debug("branch-and-bound sigma finished", {"R": R, "nodes": counter.count, "restarts": restarts})
    value, q, witness = best
    return (Fraction(value, D), q, witness), counter.count


# ----------------------------------------------------------------------
# Profiles
# ----------------------------------------------------------------------

def sigma_profile(
    alpha: TargetVector,
    K: int,
    engine: str = "auto",
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
    node_budget: int = DEFAULT_NODE_BUDGET,
    workers: int = 1,
) -> SigmaProfile:
    """sigma(alpha)_k for k = 0..K; values are checked to be nonincreasing"""
    def run(k: int) -> SigmaResult:
        return sigma(alpha, k, engine, exhaustive_limit, node_budget)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(run, range(K + 1)))
    else:
        entries = [run(k) for k in range(K + 1)]

    for prev, cur in zip(entries, entries[1:]):
        if cur.value > prev.value:
            raise ArithDensityError(
                f"sigma profile increased at k={cur.k}",
                {"previous": str(prev.value), "current": str(cur.value)},
            )
    return SigmaProfile(alpha, entries)


def write_profile_csv(profile: SigmaProfile, path) -> Path:
    rows = [
        (
            e.k,
            e.value.numerator,
            e.value.denominator,
            format_float(float(e.value)),
            ";".join(str(x) for x in e.witness),
        )
        for e in profile.entries
    ]
    return write_csv_report(path, "sigma_profile", PROFILE_COLUMNS, rows)


def read_profile_csv(path) -> List[SigmaResult]:
    _, rows = read_csv_report(path)
    return [
        SigmaResult(
            int(row["k"]),
            Fraction(int(row["value_num"]), int(row["value_den"])),
            tuple(int(x) for x in row["witness"].split(";")),
        )
        for row in rows
    ]


@dataclass(frozen=True)
class DecayFit:
    """sigma_k ~ 2^(intercept - exponent * k) over the fitted range"""
    exponent: float
    intercept: float
    r_value: float
    points: int


def decay_exponent(profile: SigmaProfile, k_min: int = 1) -> DecayFit:
    """
    Empirical decay exponent of a profile: slope of -log2 sigma_k against k.

    Zero values (exact hits) are skipped.
    """
    ks = [e.k for e in profile.entries if e.k >= k_min and e.value > 0]
    if len(ks) < 3:
        raise DegenerateFit(
            f"Need at least 3 positive profile values beyond k={k_min}, got {len(ks)}",
            {"points": len(ks)},
        )
    logs = [math.log2(profile[k].value.denominator) - math.log2(profile[k].value.numerator) for k in ks]
    fit = stats.linregress(ks, logs)
    return DecayFit(float(fit.slope), float(-fit.intercept), float(fit.rvalue), len(ks))
