"""
Property Verification Module

This module runs seeded randomized property suites over the exact linear
algebra, the ambient fans of random defining matrices, the Picard index
routes and the minor identities. Each suite reports pass/fail counts and
keeps its first failing instance for replay.
"""

import logging
import math
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

from src.analyzers.kstarindex import (
    hat_system_explicit,
    minor_sets,
    nu,
    nu_hat,
    nu_hat_divides,
    nu_relation_coefficients,
    picard_index_formula,
    vanishing_minor_violations,
)
from src.analyzers.toricpic import (
    complete_fan_2d,
    formula_quotient,
    hat_maps,
    picard_direct,
    picard_via_hat,
    weighted_projective_fan,
)
from src.core.defmat import ambient_fan, random_defining_matrix
from src.core.errors import DegenerateFanError, KStarError
from src.core.exactlin import (
    as_int_matrix,
    cokernel,
    determinant,
    hnf,
    is_hnf,
    kernel_basis,
    matmul,
    maximal_minors,
    snf,
)

logger = logging.getLogger(__name__)

# Row subsets of P_hat enumerated per instance; larger systems take the gcd from the Smith form
SUITE_MINOR_LIMIT = 200

# A check yields (instance, failure message or None) per drawn case
Check = Callable[[random.Random], Tuple[Any, Optional[str]]]


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    failed: int = 0
    first_failure: Optional[Dict[str, Any]] = None
    failure_instance: Any = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {'suite': self.name, 'passed': self.passed, 'failed': self.failed}
        if self.first_failure is not None:
            out['first_failure'] = self.first_failure
        return out


def random_matrix(rng: random.Random, max_rows: int = 6, max_cols: int = 8, bound: int = 9):
    m, n = rng.randint(1, max_rows), rng.randint(1, max_cols)
    return as_int_matrix([[rng.randint(-bound, bound) for _ in range(n)] for _ in range(m)])


def check_exactlin(rng: random.Random) -> Tuple[Any, Optional[str]]:
    A = random_matrix(rng)
    m, n = A.shape
    form = snf(A)
    d = form.nonzero
    if any(b % a for a, b in zip(d, d[1:])):
        return A, f"invariant factors {d} are not a divisibility chain"
    if form.rank == min(m, n) and math.prod(d) != math.gcd(*maximal_minors(A)):
        return A, "product of invariant factors differs from the gcd of maximal minors"
    H, U = hnf(A, return_transform=True)
    if (matmul(A, U) != H).any() or abs(determinant(U)) != 1 or not is_hnf(H):
        return A, "hnf transform or shape is wrong"
    K = kernel_basis(A)
    if K.shape[1] != n - form.rank or (K.shape[1] and (matmul(A, K) != 0).any()):
        return A, "kernel basis has the wrong rank or does not lie in the kernel"
    return A, None


def check_ambient_fan(rng: random.Random) -> Tuple[Any, Optional[str]]:
    dm = random_defining_matrix(rng)
    fan = ambient_fan(dm)
    violations = fan.validate()
    if violations:
        return dm, "; ".join(str(v) for v in violations)
    if not fan.is_simplicial():
        return dm, "ambient fan is not simplicial"
    if vanishing_minor_violations(dm):
        return dm, "a minor missing two whole blocks is nonzero"
    if not nu_hat_divides(dm):
        return dm, "gcd(l_in_i, nu_hat) does not divide l_ij"
    for i, n_i in enumerate(dm.n_blocks):
        for j in range(1, n_i + 1):
            for j2 in range(1, n_i + 1):
                a, b = nu_relation_coefficients(dm, i, j, j2)
                if nu(dm, i, j, j2) != a * nu_hat(dm, i, j) - b * nu_hat(dm, i, j2):
                    return dm, f"nu relation fails at ({i}, {j}, {j2})"
    return dm, None


def check_picard_routes(rng: random.Random) -> Tuple[Any, Optional[str]]:
    dm = random_defining_matrix(rng)
    fan = ambient_fan(dm)
    direct, hat = picard_direct(fan), picard_via_hat(fan)
    formula = picard_index_formula(dm)
    if not formula == direct.pic_index == hat.pic_index:
        return dm, f"routes disagree: formula={formula} direct={direct.pic_index} hat={hat.pic_index}"
    if not direct.pic_torsion_free:
        return dm, f"Picard group {direct.pic_group} has torsion"
    if not (direct.check_product_identity() and hat.check_product_identity()):
        return dm, "pic_index * |K_hat| differs from the product of local orders"
    return dm, None


def check_minor_gcds(rng: random.Random) -> Tuple[Any, Optional[str]]:
    dm = random_defining_matrix(rng)
    system = hat_system_explicit(dm)
    ms = minor_sets(dm, system, limit=SUITE_MINOR_LIMIT)
    values = {ms.gcd_P, ms.gcd_prime_P, ms.gcd_Phat}
    if ms.gcd_red_Phat is not None:
        values.add(ms.gcd_red_Phat)
    if len(values) != 1:
        return dm, (f"minor gcds differ: M(P)={ms.gcd_P} M'(P)={ms.gcd_prime_P} "
                    f"M(P_hat)={ms.gcd_Phat} reduced={ms.gcd_red_Phat}")
    coker = cokernel(system.Phat.T)
    if coker.order != ms.gcd_P:
        return dm, f"|coker(P_hat^T)| = {coker.order} differs from |Cl^tors| = {ms.gcd_P}"
    generic = cokernel(hat_maps(ambient_fan(dm)).Phat.T)
    if generic != coker:
        return dm, f"coker(P_hat^T) is {coker} from the chart bases but {generic} from the fan"
    return dm, None


def _coprime_triple(rng: random.Random, bound: int) -> Tuple[int, int, int]:
    while True:
        w = tuple(rng.randint(1, bound) for _ in range(3))
        if math.gcd(w[0], w[1]) == math.gcd(w[0], w[2]) == math.gcd(w[1], w[2]) == 1:
            return w


def check_weighted_projective(rng: random.Random) -> Tuple[Any, Optional[str]]:
    w = _coprime_triple(rng, 50)
    fan = weighted_projective_fan(w)
    data = picard_direct(fan)
    if data.pic_index != math.prod(w):
        return fan, f"P{w}: Picard index {data.pic_index} != {math.prod(w)}"
    return fan, None


def _random_complete_fan(rng: random.Random, max_rays: int = 7, bound: int = 9):
    while True:
        k = rng.randint(3, max_rays)
        rays = set()
        while len(rays) < k:
            v = (rng.randint(-bound, bound), rng.randint(-bound, bound))
            if v != (0, 0) and math.gcd(*v) == 1:
                rays.add(v)
        try:
            return complete_fan_2d(sorted(rays))
        except DegenerateFanError:
            continue


def check_surface_fans(rng: random.Random) -> Tuple[Any, Optional[str]]:
    fan = _random_complete_fan(rng)
    data = picard_direct(fan)
    hat = picard_via_hat(fan)
    if hat.pic_index != data.pic_index:
        return fan, f"routes disagree: direct={data.pic_index} hat={hat.pic_index}"
    check = formula_quotient(fan, data.pic_index)
    if not check.formula_holds:
        return fan, f"quotient {check.quotient} differs from Picard index {data.pic_index}"
    return fan, None


SUITES: Dict[str, Check] = {
    'exactlin': check_exactlin,
    'ambient_fans': check_ambient_fan,
    'picard_routes': check_picard_routes,
    'minor_gcds': check_minor_gcds,
    'weighted_projective': check_weighted_projective,
    'surface_fans': check_surface_fans,
}


def _instance_to_json(instance: Any) -> Any:
    if hasattr(instance, 'to_dict'):
        return instance.to_dict()
    if hasattr(instance, 'tolist'):
        return [[int(x) for x in row] for row in instance.tolist()]
    return repr(instance)


def run_suite(name: str, count: int, seed: int) -> SuiteResult:
    """
    Run one suite on ``count`` instances drawn from a generator seeded by (seed, name).

    Exceptions raised by the library count as failures.
    """
    check = SUITES[name]
    rng = random.Random(f"{seed}:{name}")
    result = SuiteResult(name)
    for case in range(count):
        try:
            instance, message = check(rng)
        except KStarError as e:
            instance, message = getattr(e, 'instance', None), f"{type(e).__name__}: {e}"
        if message is None:
            result.passed += 1
            continue
        result.failed += 1
        logger.error(f"{name} case {case} failed: {message}")
        if result.first_failure is None:
            result.first_failure = {'case': case, 'message': message, 'instance': _instance_to_json(instance)}
            result.failure_instance = instance
    logger.info(f"suite {name}: {result.passed} passed, {result.failed} failed")
    return result


def run_suites(count: int, seed: int, names: Optional[List[str]] = None) -> List[SuiteResult]:
    return [run_suite(name, count, seed) for name in (names or list(SUITES))]


__all__ = [
    'SuiteResult',
    'SUITES',
    'random_matrix',
    'check_exactlin',
    'check_ambient_fan',
    'check_picard_routes',
    'check_minor_gcds',
    'check_weighted_projective',
    'check_surface_fans',
    'run_suite',
    'run_suites',
]
