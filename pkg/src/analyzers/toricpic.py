"""
Toric Picard Analyzer Module

This module computes divisor class groups, local class groups, Picard groups
and Picard indices of toric varieties given by simplicial fans.

Two independent routes compute the Picard index:
- direct: Pic is the kernel of the restriction K -> (+) K_sigma
- hat: via the induced map between the kernels of alpha and beta,
  pic_index = prod |K_sigma| / |K_hat|
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.core.defmat import Fan, sort_by_angle
from src.core.errors import DegenerateFanError, InvariantViolation, UnsupportedFanError
from src.core.exactlin import (
    AbelianGroup,
    IntMatrix,
    as_int_matrix,
    block_diagonal,
    cokernel,
    determinant,
    gcd_maximal_minors,
    hnf,
    identity,
    kernel_basis,
    matmul,
    rank,
    saturation_basis,
    snf,
    solve_exact,
    zeros,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LocalChart:
    """
    Local data of one maximal cone.

    Attributes:
        cone: Index of the maximal cone
        N_sigma_basis: Columns form a lattice basis of lin(sigma) intersected with N
        P_sigma: Coordinates of the cone's rays in that basis
        group: Local class group K_sigma = coker(P_sigma^T)
    """

    cone: int
    N_sigma_basis: IntMatrix
    P_sigma: IntMatrix
    group: AbelianGroup

    @property
    def is_simplicial(self) -> bool:
        return self.P_sigma.shape[0] == self.P_sigma.shape[1]


@dataclass(frozen=True)
class PicardData:
    """
    Class group, local class groups and Picard index of a fan.

    Attributes:
        class_group: K = Cl(Z)
        local_groups: K_sigma per maximal cone, in cone order
        pic_index: [K : Pic]
        pic_rank: Free rank of Pic
        khat: Cokernel of the summed restriction map
        pic_torsion_free: Whether Pic has no torsion
        route: 'direct' or 'hat'
        pic_group: Structure of Pic when computed directly
        pic_generators: Generators of Pic in the coordinates of ``class_group``
    """

    class_group: AbelianGroup
    local_groups: Tuple[AbelianGroup, ...]
    pic_index: int
    pic_rank: int
    khat: AbelianGroup
    pic_torsion_free: bool
    route: str
    pic_group: Optional[AbelianGroup] = None
    pic_generators: Tuple[Tuple[int, ...], ...] = field(default_factory=tuple)

    @property
    def local_orders(self) -> Tuple[int, ...]:
        return tuple(g.order for g in self.local_groups)

    def check_product_identity(self) -> bool:
        """pic_index * |K_hat| equals the product of the local orders."""
        if self.khat.order is None or any(o is None for o in self.local_orders):
            return False
        return self.pic_index * self.khat.order == math.prod(self.local_orders)


@dataclass(frozen=True)
class IndexFormulaCheck:
    """Product of local orders over torsion order, compared with the Picard index."""

    quotient: Fraction
    pic_index: int

    @property
    def formula_holds(self) -> bool:
        return self.quotient == self.pic_index


class ClassGroupPresentation:
    """
    K = Z^rays / im(P^T) with explicit coordinates.

    A divisor x in Z^rays maps to U*x; coordinates with invariant factor 1
    vanish, those with factor t > 1 are read modulo t, and the remaining ones
    are free. ``coordinates`` lists the free part first.
    """

    def __init__(self, fan: Fan):
        self.P = fan.ray_matrix()
        self.n = self.P.shape[1]
        self.form = snf(self.P.T)
        d = list(self.form.d) + [0] * (self.n - len(self.form.d))
        self.free_rows = [i for i, x in enumerate(d) if x == 0]
        self.torsion_rows = [(i, x) for i, x in enumerate(d) if x > 1]
        self.group = AbelianGroup.from_invariants(len(self.free_rows), [x for _, x in self.torsion_rows])

    def coordinates(self, x: Sequence[int]) -> Tuple[int, ...]:
        y = matmul(self.form.U, as_int_matrix([[int(v)] for v in x]))
        free = [int(y[i, 0]) for i in self.free_rows]
        tors = [int(y[i, 0]) % t for i, t in self.torsion_rows]
        return tuple(free + tors)

    def coordinate_moduli(self) -> Tuple[int, ...]:
        """0 for free coordinates, the invariant factor for torsion ones."""
        return tuple([0] * len(self.free_rows) + [t for _, t in self.torsion_rows])

    def lift_matrix(self) -> IntMatrix:
        """Columns are divisors representing the coordinate generators of K."""
        U_inv = solve_exact(self.form.U, identity(self.n))
        cols = self.free_rows + [i for i, _ in self.torsion_rows]
        return U_inv[:, cols].copy() if cols else zeros(self.n, 0)


def class_group(fan: Fan) -> AbelianGroup:
    """Cl(Z) as the cokernel of the transposed ray matrix."""
    fan.require_valid()
    return cokernel(fan.ray_matrix().T)


def local_chart(fan: Fan, cone: int) -> LocalChart:
    """Saturated basis of lin(sigma), the local generator map and K_sigma."""
    V = fan.cone_matrix(cone)
    B = saturation_basis(V)
    X = solve_exact(B, V)
    return LocalChart(cone, B, X, cokernel(X.T))


def local_class_group(fan: Fan, cone: int) -> AbelianGroup:
    """K_sigma = Cl(U_sigma) for a maximal cone."""
    if not 0 <= cone < len(fan.max_cones):
        raise IndexError(f"cone index {cone} out of range")
    return local_chart(fan, cone).group


def _charts(fan: Fan) -> List[LocalChart]:
    fan.require_valid()
    charts = [local_chart(fan, c) for c in range(len(fan.max_cones))]
    for chart in charts:
        if not chart.is_simplicial:
            raise UnsupportedFanError(f"maximal cone {chart.cone} = {list(fan.max_cones[chart.cone])} is not simplicial")
    return charts


def _selection_matrix(fan: Fan) -> IntMatrix:
    """Pi: Z^rays -> (+) Z^{rays of sigma}, restricting divisors to each cone."""
    sizes = [len(c) for c in fan.max_cones]
    Pi = zeros(sum(sizes), len(fan.rays))
    row = 0
    for cone in fan.max_cones:
        for idx in cone:
            Pi[row, idx] = 1
            row += 1
    return Pi


def restriction_matrix(fan: Fan, cone: int, presentation: Optional[ClassGroupPresentation] = None) -> IntMatrix:
    """
    Matrix of pi_sigma from K-coordinates to coordinates of K_sigma.

    K_sigma coordinates come from the Smith form of P_sigma^T; entries are
    meaningful modulo its invariant factors.
    """
    presentation = presentation or ClassGroupPresentation(fan)
    chart = local_chart(fan, cone)
    local_form = snf(chart.P_sigma.T)
    lifts = presentation.lift_matrix()
    selected = lifts[list(fan.max_cones[cone]), :]
    return matmul(local_form.U, selected)


def restrict_class(fan: Fan, cone: int, coords: Sequence[int],
                   presentation: Optional[ClassGroupPresentation] = None) -> Tuple[int, ...]:
    """Image of a class given in K-coordinates in K_sigma, reduced modulo the invariant factors."""
    R = restriction_matrix(fan, cone, presentation)
    local_form = snf(local_chart(fan, cone).P_sigma.T)
    moduli = list(local_form.d) + [0] * (R.shape[0] - len(local_form.d))
    image = matmul(R, as_int_matrix([[int(v)] for v in coords], cols=1))
    return tuple(int(v) % t if t else int(v) for v, t in zip(image[:, 0], moduli))


def _pic_lattice(fan: Fan, charts: List[LocalChart]) -> IntMatrix:
    """HNF basis of the divisors whose class restricts to zero on every chart."""
    Pi = _selection_matrix(fan)
    Q = block_diagonal(chart.P_sigma.T for chart in charts)
    n = len(fan.rays)
    kb = kernel_basis(np.hstack([Pi, Q]))
    H = hnf(kb[:n, :])
    r = rank(H)
    if r != n:
        raise InvariantViolation(f"Picard lattice has rank {r}, expected {n}", fan)
    return H[:, :n].copy()


def _khat_direct(fan: Fan, charts: List[LocalChart]) -> AbelianGroup:
    """K_hat = (+) K_sigma / im(pi) from presentations."""
    Pi = _selection_matrix(fan)
    Q = block_diagonal(chart.P_sigma.T for chart in charts)
    return cokernel(np.hstack([Q, Pi]))


def picard_direct(fan: Fan) -> PicardData:
    """
    Pic as the intersection of the kernels of the restrictions to all charts.

    Returns:
        PicardData with the structure of Pic and its generators in K
    """
    charts = _charts(fan)
    presentation = ClassGroupPresentation(fan)
    basis = _pic_lattice(fan, charts)
    index = abs(determinant(basis))
    Y = solve_exact(basis, fan.ray_matrix().T)
    pic = cokernel(Y)

    # generators of Pic in K-coordinates, canonically reduced
    moduli = presentation.coordinate_moduli()
    images = [presentation.coordinates(basis[:, j]) for j in range(basis.shape[1])]
    relations = [[t if k == i else 0 for k in range(len(moduli))] for i, t in enumerate(moduli) if t]
    columns = images + relations
    generators: List[Tuple[int, ...]] = []
    if moduli and columns:
        gen_matrix = hnf(as_int_matrix([list(col) for col in columns]).T)
        for j in range(gen_matrix.shape[1]):
            coords = tuple(int(v) % t if t else int(v) for v, t in zip(gen_matrix[:, j], moduli))
            if any(coords):
                generators.append(coords)
    for g in generators:
        for cone in range(len(fan.max_cones)):
            if any(restrict_class(fan, cone, g, presentation)):
                raise InvariantViolation(f"Picard generator {g} does not vanish on cone {cone}", fan)

    data = PicardData(
        class_group=presentation.group,
        local_groups=tuple(c.group for c in charts),
        pic_index=index,
        pic_rank=pic.rank,
        khat=_khat_direct(fan, charts),
        pic_torsion_free=not pic.torsion,
        route='direct',
        pic_group=pic,
        pic_generators=tuple(generators),
    )
    logger.debug(f"direct route: Cl = {data.class_group}, Pic = {pic}, index {index}")
    return data


@dataclass(frozen=True)
class HatMaps:
    """alpha, beta, the block generator map, their kernels gamma, delta and P_hat."""

    alpha: IntMatrix
    beta: IntMatrix
    block_P: IntMatrix
    gamma: IntMatrix
    delta: IntMatrix
    Phat: IntMatrix


def hat_maps(fan: Fan, charts: Optional[List[LocalChart]] = None) -> HatMaps:
    """Solve gamma * P_hat = (+)P_sigma * delta for the induced map P_hat."""
    charts = charts if charts is not None else _charts(fan)
    alpha = np.hstack([chart.N_sigma_basis for chart in charts])
    beta = _selection_matrix(fan).T
    block_P = block_diagonal(chart.P_sigma for chart in charts)
    gamma = kernel_basis(alpha)
    delta = kernel_basis(beta)
    Phat = solve_exact(gamma, matmul(block_P, delta))
    return HatMaps(alpha, beta, block_P, gamma, delta, Phat)


def picard_via_hat(fan: Fan) -> PicardData:
    """
    Picard index as prod |K_sigma| / |K_hat|.

    K_hat is the cokernel of P_hat^T when alpha is surjective; otherwise it
    is computed from the presentations of the local class groups.
    """
    charts = _charts(fan)
    maps = hat_maps(fan, charts)
    alpha_surjective = cokernel(maps.alpha).is_trivial
    if alpha_surjective:
        khat = cokernel(maps.Phat.T)
    else:
        logger.info("alpha is not surjective, computing K_hat from the local presentations")
        khat = _khat_direct(fan, charts)
    if khat.order is None:
        raise InvariantViolation(f"K_hat = {khat} is infinite", fan)
    local_product = math.prod(c.group.order for c in charts)
    index, rest = divmod(local_product, khat.order)
    if rest:
        raise InvariantViolation(f"|K_hat| = {khat.order} does not divide {local_product}", fan)

    cl = cokernel(fan.ray_matrix().T)
    if alpha_surjective:
        torsion_free = True
    else:
        torsion_free = picard_direct(fan).pic_torsion_free
    return PicardData(
        class_group=cl,
        local_groups=tuple(c.group for c in charts),
        pic_index=index,
        pic_rank=cl.rank,
        khat=khat,
        pic_torsion_free=torsion_free,
        route='hat',
    )


def local_orders(fan: Fan) -> Tuple[int, ...]:
    """|K_sigma| per maximal cone as the gcd of the cone's maximal minors."""
    return tuple(gcd_maximal_minors(fan.cone_matrix(c).T) for c in range(len(fan.max_cones)))


def formula_quotient(fan: Fan, pic_index: Optional[int] = None) -> IndexFormulaCheck:
    """Product of local class group orders divided by |Cl^tors|."""
    fan.require_valid()
    cl = cokernel(fan.ray_matrix().T)
    quotient = Fraction(math.prod(local_orders(fan)), cl.torsion_order)
    if pic_index is None:
        pic_index = picard_direct(fan).pic_index
    check = IndexFormulaCheck(quotient, pic_index)
    if not check.formula_holds:
        logger.warning(f"local order product / torsion = {quotient} differs from the Picard index {pic_index}")
    return check


def weighted_projective_fan(weights: Sequence[int]) -> Fan:
    """
    Fan of the weighted projective space P(w_0, ..., w_d).

    Rays are the columns of a d x (d+1) matrix with kernel Z*w whose
    maximal minors have gcd 1; maximal cones are all d-subsets.
    """
    w = [int(x) for x in weights]
    if len(w) < 2 or any(x < 1 for x in w):
        raise DegenerateFanError(f"weights {w} must be at least two positive integers", "weights")
    if math.gcd(*w) != 1:
        raise DegenerateFanError(f"weights {w} have a common factor", "weights")
    form = snf(as_int_matrix([[x] for x in w]))
    P = form.U[1:, :]
    dim = len(w) - 1
    rays = [tuple(int(v) for v in P[:, j]) for j in range(len(w))]
    cones = [c for c in combinations(range(len(w)), dim)]
    return Fan(dim, tuple(rays), tuple(cones)).require_valid()


def complete_fan_2d(rays: Sequence[Sequence[int]]) -> Fan:
    """Complete plane fan whose 2-cones join angularly consecutive rays."""
    rays = [tuple(int(x) for x in ray) for ray in rays]
    order = sort_by_angle(rays)
    cones = [tuple(sorted((a, b))) for a, b in zip(order, order[1:] + order[:1])]
    fan = Fan(2, tuple(rays), tuple(cones))
    if not fan.is_complete_2d():
        raise DegenerateFanError(f"rays {rays} do not form a complete simplicial plane fan", "rays")
    return fan.require_valid()


__all__ = [
    'LocalChart',
    'PicardData',
    'IndexFormulaCheck',
    'ClassGroupPresentation',
    'HatMaps',
    'class_group',
    'local_chart',
    'local_class_group',
    'restriction_matrix',
    'restrict_class',
    'picard_direct',
    'hat_maps',
    'picard_via_hat',
    'local_orders',
    'formula_quotient',
    'weighted_projective_fan',
    'complete_fan_2d',
]
