"""
Arithmetic class membership C(a) = {alpha : sigma(alpha)_k >= a_k for all k},
decided up to an explicit cutoff K
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Optional, Sequence

from modules.classes.sequences import DecreasingSequence, DyadicValue
from modules.lattice.sigma import DEFAULT_EXHAUSTIVE_LIMIT, DEFAULT_NODE_BUDGET, SigmaResult, sigma
from modules.lattice.target import IntVector, TargetVector, norm_sq
from shared.errors import PreconditionFailed
from shared.logger import get_logger
from shared.rational_utils import format_rational

logger = get_logger()

IN_CLASS = "in_class"
VIOLATED = "violated"


def exp_index(i: Sequence[int]) -> int:
    """
    floor(log2 ||i||) + 1, exact from the integer ||i||^2.

    Examples:
        >>> exp_index((3, 4))
        3
        >>> exp_index((0, 4))
        3
    """
    q = norm_sq(i)
    if q == 0:
        raise PreconditionFailed("exp_index is undefined for the zero vector")
    # 4^m <= q < 4^(m+1)  <=>  m = floor(log2 sqrt(q))
    return (q.bit_length() - 1) // 2 + 1


@dataclass(frozen=True)
class ClassVerdict:
    """
    Outcome of a membership test up to cutoff K.

    For a violation, k is the first profile index with sigma(alpha)_k < a_k,
    witness attains sigma(alpha)_k and block = exp_index(witness).
    """
    status: str
    cutoff: int
    witness: Optional[IntVector] = None
    k: Optional[int] = None
    value: Optional[Fraction] = None
    threshold: Optional[DyadicValue] = None
    block: Optional[int] = None

    @property
    def in_class(self) -> bool:
        return self.status == IN_CLASS

    def certify(self, alpha: TargetVector, a: DecreasingSequence) -> bool:
        """Re-evaluate the witness exactly; True when the violation reproduces"""
        if self.in_class:
            return False
        value = abs(alpha.dot(self.witness))
        if value != self.value or norm_sq(self.witness) > 4 ** self.k:
            return False
        # ||i|| = 2^k exactly puts the witness in block k+1; a_k is the binding term then
        level = self.block if self.block <= self.k else self.k
        return value < a.term(level)

    def to_dict(self) -> Dict[str, Any]:
        doc: Dict[str, Any] = {"status": self.status, "cutoff": self.cutoff}
        if not self.in_class:
            doc.update({
                "witness": list(self.witness),
                "k": self.k,
                "block": self.block,
                "value": format_rational(self.value),
                "value_float": float(self.value),
                "threshold_float": float(self.threshold),
            })
        return doc


def membership(
    alpha: TargetVector,
    a: DecreasingSequence,
    K: int,
    engine: str = "auto",
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
    node_budget: int = DEFAULT_NODE_BUDGET,
    workers: int = 1,
) -> ClassVerdict:
    """
    Decide sigma(alpha)_k >= a_k for k = 0..K exactly.

    Equality counts as in-class. With workers > 1 the profile indices are
    evaluated concurrently and the first failing k is kept.

    Examples:
        >>> a = DecreasingSequence.geometric(Fraction(1, 4), 3)
        >>> membership(TargetVector.from_spec(["1", "1/2"]), a, 2).witness
        (1, -2)
    """
    if K < 0:
        raise PreconditionFailed(f"Cutoff K must be >= 0, got {K}")
    a.check_domain(K)

    def evaluate(k: int) -> SigmaResult:
        return sigma(alpha, k, engine, exhaustive_limit, node_budget)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate, range(K + 1)))
    else:
        results = []
        for k in range(K + 1):
            result = evaluate(k)
            results.append(result)
            if result.value < a.term(k):
                break

    for result in results:
        threshold = a.term(result.k)
        if result.value < threshold:
            verdict = ClassVerdict(
                VIOLATED,
                K,
                witness=result.witness,
                k=result.k,
                value=result.value,
                threshold=threshold,
                block=exp_index(result.witness),
            )
            logger.info("Class membership violated", {
                "k": result.k, "witness": list(result.witness), "value": float(result.value),
            })
            return verdict

    return ClassVerdict(IN_CLASS, K)
