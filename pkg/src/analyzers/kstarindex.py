"""
K*-Surface Picard Index Analyzer Module

This module evaluates the Picard index of a rational projective K*-surface
X(P) from its defining matrix. It provides the local-order formula, the
explicit kernel maps alpha, beta, gamma, delta and P_hat in the chart bases
of the ambient fan, and the maximal-minor sets whose gcds govern the torsion
of the class group.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations, product
from typing import Dict, Iterable, List, Optional, Tuple

from src.analyzers.toricpic import PicardData, formula_quotient, local_orders, picard_direct, picard_via_hat
from src.core.defmat import (
    ConeLabel,
    DefiningMatrix,
    FixedPoint,
    ambient_cones,
    ambient_fan,
    assemble,
    fixed_points,
    require_valid,
)
from src.core.errors import InvariantViolation
from src.core.exactlin import (
    MINOR_ENUMERATION_LIMIT,
    AbelianGroup,
    IntMatrix,
    cokernel,
    determinant,
    exgcd,
    gcd_maximal_minors,
    matmul,
    maximal_minors,
    zeros,
)

logger = logging.getLogger(__name__)


def _gcd(values: Iterable[int]) -> int:
    return reduce(math.gcd, values, 0)


def _check_j(dm: DefiningMatrix, i: int, j: int) -> None:
    if not 0 <= i <= dm.r:
        raise IndexError(f"block index {i} out of range 0..{dm.r}")
    if not 1 <= j <= dm.n_blocks[i]:
        raise IndexError(f"index j = {j} out of range 1..{dm.n_blocks[i]} in block {i}")


def mu(dm: DefiningMatrix, js: Tuple[int, ...]) -> int:
    """
    mu(j_0, ..., j_r) = sum over i0 of d_{i0 j_i0} * prod_{i != i0} l_{i j_i}.

    Args:
        dm: Defining matrix
        js: One 1-based column position per block
    """
    if len(js) != dm.r + 1:
        raise IndexError(f"expected {dm.r + 1} indices, got {len(js)}")
    for i, j in enumerate(js):
        _check_j(dm, i, j)
    ls = [dm.l[i][j - 1] for i, j in enumerate(js)]
    ds = [dm.d[i][j - 1] for i, j in enumerate(js)]
    return sum(ds[i0] * math.prod(ls[:i0] + ls[i0 + 1:]) for i0 in range(dm.r + 1))


def mu_hat(dm: DefiningMatrix) -> int:
    return mu(dm, dm.n_blocks)


def nu(dm: DefiningMatrix, i: int, j: int, j2: int) -> int:
    """nu(i, j, j') = l_ij d_ij' - l_ij' d_ij."""
    _check_j(dm, i, j)
    _check_j(dm, i, j2)
    l, d = dm.l[i], dm.d[i]
    return l[j - 1] * d[j2 - 1] - l[j2 - 1] * d[j - 1]


def nu_hat(dm: DefiningMatrix, i: int, j: int) -> int:
    return nu(dm, i, j, dm.n_blocks[i])


def nu_relation_coefficients(dm: DefiningMatrix, i: int, j: int, j2: int) -> Tuple[int, int]:
    """
    Integers (a, b) with nu(i, j, j') = a * nu_hat(i, j) - b * nu_hat(i, j').
    """
    _check_j(dm, i, j)
    _check_j(dm, i, j2)
    n_i = dm.n_blocks[i]
    l, d = dm.l[i], dm.d[i]
    g, x, y = exgcd(l[n_i - 1], d[n_i - 1])
    if g != 1:
        raise InvariantViolation(f"gcd(l{i}{n_i}, d{i}{n_i}) = {g} != 1", dm)
    return x * l[j2 - 1] + y * d[j2 - 1], x * l[j - 1] + y * d[j - 1]


def nu_hat_divides(dm: DefiningMatrix) -> bool:
    """gcd(l_in_i, nu_hat(i, j)) divides l_ij for every block and position."""
    for i, n_i in enumerate(dm.n_blocks):
        for j in range(1, n_i + 1):
            if dm.l[i][j - 1] % math.gcd(dm.l[i][n_i - 1], nu_hat(dm, i, j)):
                return False
    return True


def _products(choices: Iterable[Tuple[int, ...]]) -> set:
    """All products picking one entry from each tuple."""
    out = {1}
    for options in choices:
        out = {p * x for p in out for x in options}
    return out


def minors_prime(dm: DefiningMatrix) -> Tuple[int, ...]:
    """
    The reduced generating set M'(P) of the maximal minors of P.

    Zeros are dropped; the result is sorted and duplicate free.
    """
    r = dm.r
    values = set()
    if dm.type == 'ee':
        values.add(abs(mu_hat(dm)))
        for i0 in range(r + 1):
            for i1 in range(r + 1):
                if i0 == i1:
                    continue
                others = [dm.l[i] for i in range(r + 1) if i not in (i0, i1)]
                rest = _products(others)
                for j in range(1, dm.n_blocks[i0] + 1):
                    v = abs(nu_hat(dm, i0, j))
                    values.update(v * p for p in rest)
    else:
        for i1 in range(r + 1):
            values.update(_products(dm.l[i] for i in range(r + 1) if i != i1))
    values.discard(0)
    return tuple(sorted(values))


def vanishing_minor_violations(dm: DefiningMatrix) -> List[Tuple[int, ...]]:
    """
    Column subsets of size r+1 avoiding v+/v- and missing two whole blocks
    whose determinant is nonzero; empty for every defining matrix.
    """
    P = assemble(dm)
    block_of = [i for i, n_i in enumerate(dm.n_blocks) for _ in range(n_i)]
    bad = []
    for cols in combinations(range(dm.n), dm.r + 1):
        if len({block_of[c] for c in cols}) > dm.r - 1:
            continue
        if determinant(P[:, list(cols)]) != 0:
            bad.append(cols)
    return bad


@dataclass(frozen=True)
class HatSystem:
    """
    Explicit matrices of alpha, beta, the block generator map, gamma, delta, P_hat.

    Row and column labels name the chart basis vectors, e.g. ``e+1``,
    ``u01``, ``f+02``, ``eh01``, ``fh02``.
    """

    alpha: IntMatrix
    beta: IntMatrix
    block_P: IntMatrix
    gamma: IntMatrix
    delta: IntMatrix
    Phat: IntMatrix
    N_labels: Tuple[str, ...]
    F_labels: Tuple[str, ...]
    Nhat_labels: Tuple[str, ...]
    Fhat_labels: Tuple[str, ...]
    pairs: Tuple[Tuple[int, int, int, int, int], ...] = field(default_factory=tuple)


class _ChartBases:
    """Index bookkeeping for the sum of the chart lattices of the ambient fan."""

    def __init__(self, dm: DefiningMatrix):
        self.dm = dm
        self.cones = ambient_cones(dm)
        self.N: Dict[Tuple, int] = {}
        self.F: Dict[Tuple, int] = {}
        self.N_labels: List[str] = []
        self.F_labels: List[str] = []
        r, ns = dm.r, dm.n_blocks
        for label, _ in self.cones:
            if label.kind in ('sigma+', 'sigma-'):
                s = label.kind[-1]
                for i in range(1, r + 1):
                    self._add_n(('e' + s, i), f"e{s}{i}")
                self._add_n(('u' + s,), f"u{s}")
                for i in range(r + 1):
                    j = 1 if s == '+' else ns[i]
                    self._add_f(('f' + ('+' if s == '+' else '-'), i, j), f"f{s}{i}{j}")
            else:
                i, j = label.i, label.j
                self._add_n(('e', i, j), f"e{i}{j}")
                self._add_n(('u', i, j), f"u{i}{j}")
                self._add_f(('f-', i, j), f"f-{i}{j}")
                self._add_f(('f+', i, j + 1), f"f+{i}{j + 1}")

    def _add_n(self, key, name):
        self.N[key] = len(self.N)
        self.N_labels.append(name)

    def _add_f(self, key, name):
        self.F[key] = len(self.F)
        self.F_labels.append(name)

    def left(self, i: int, j: int) -> ConeLabel:
        """Chart containing the ray v_{i,j-1} and v_ij."""
        if j - 1 == 0 and not self.dm.has_plus:
            return ConeLabel('sigma+')
        return ConeLabel('tau', i, j - 1)

    def right(self, i: int, j: int) -> ConeLabel:
        """Chart containing v_ij and v_{i,j+1}."""
        if j == self.dm.n_blocks[i] and not self.dm.has_minus:
            return ConeLabel('sigma-')
        return ConeLabel('tau', i, j)

    def e(self, chart: ConeLabel, i: int) -> Dict[int, int]:
        """The e_i basis vector of a chart; e_0 in a sigma chart is -(e_1 + ... + e_r)."""
        if chart.kind == 'tau':
            return {self.N[('e', chart.i, chart.j)]: 1}
        s = chart.kind[-1]
        if i == 0:
            return {self.N[('e' + s, k)]: -1 for k in range(1, self.dm.r + 1)}
        return {self.N[('e' + s, i)]: 1}

    def u(self, chart: ConeLabel) -> Dict[int, int]:
        if chart.kind == 'tau':
            return {self.N[('u', chart.i, chart.j)]: 1}
        return {self.N[('u' + chart.kind[-1],)]: 1}


def _add(target: Dict[int, int], vec: Dict[int, int], coeff: int = 1) -> Dict[int, int]:
    for k, v in vec.items():
        target[k] = target.get(k, 0) + coeff * v
    return target


def _column_entries(dm: DefiningMatrix, i: int, j: int) -> Tuple[int, int]:
    """(l, d) of v_ij, with v+ = (0, 1) at j = 0 and v- = (0, -1) at j = n_i + 1."""
    if j == 0:
        return 0, 1
    if j == dm.n_blocks[i] + 1:
        return 0, -1
    return dm.l[i][j - 1], dm.d[i][j - 1]


def hat_system_explicit(dm: DefiningMatrix) -> HatSystem:
    """
    alpha, beta, gamma, delta and P_hat in the chart bases of the ambient fan.

    Raises:
        InvariantViolation: If alpha*gamma, beta*delta or
            gamma*P_hat - P*delta do not vanish
    """
    r, ns = dm.r, dm.n_blocks
    bases = _ChartBases(dm)
    N_rank, F_rank = len(bases.N), len(bases.F)

    alpha = zeros(r + 1, N_rank)
    for key, idx in bases.N.items():
        if key[0] in ('e+', 'e-'):
            alpha[key[1] - 1, idx] = 1
        elif key[0] == 'e':
            if key[1] == 0:
                for k in range(r):
                    alpha[k, idx] = -1
            else:
                alpha[key[1] - 1, idx] = 1
        else:
            alpha[r, idx] = 1

    beta = zeros(dm.n + dm.m, F_rank)
    for (_, i, j), idx in bases.F.items():
        beta[dm.column_index(i, j), idx] = 1

    block_P = zeros(N_rank, F_rank)
    for label, _ in bases.cones:
        if label.kind == 'tau':
            i, j = label.i, label.j
            for key, jj in ((('f-', i, j), j), (('f+', i, j + 1), j + 1)):
                l_ij, d_ij = _column_entries(dm, i, jj)
                col = {}
                _add(col, bases.e(label, i), l_ij)
                _add(col, bases.u(label), d_ij)
                for k, v in col.items():
                    block_P[k, bases.F[key]] += v
        else:
            plus = label.kind == 'sigma+'
            for i in range(r + 1):
                j = 1 if plus else ns[i]
                key = ('f+' if plus else 'f-', i, j)
                col = {}
                _add(col, bases.e(label, i), dm.l[i][j - 1])
                _add(col, bases.u(label), dm.d[i][j - 1])
                for k, v in col.items():
                    block_P[k, bases.F[key]] += v

    # N_hat: (eh_ij, uh_ij) pairs for j <= n_i', then the extra symbols
    n_prime = [n_i - 1 if dm.type == 'ee' else n_i for n_i in ns]
    Nhat_labels: List[str] = []
    gamma_cols: List[Dict[int, int]] = []
    pair_rows: Dict[Tuple[int, int], Tuple[int, int]] = {}
    for i in range(r + 1):
        for j in range(1, n_prime[i] + 1):
            lc, rc = bases.left(i, j), bases.right(i, j)
            pair_rows[(i, j)] = (len(Nhat_labels), len(Nhat_labels) + 1)
            Nhat_labels += [f"eh{i}{j}", f"uh{i}{j}"]
            gamma_cols.append(_add(_add({}, bases.e(lc, i)), bases.e(rc, i), -1))
            gamma_cols.append(_add(_add({}, bases.u(lc)), bases.u(rc), -1))
    tilde: Dict[Tuple, int] = {}
    if dm.type == 'ee':
        plus, minus = ConeLabel('sigma+'), ConeLabel('sigma-')
        for i in range(1, r + 1):
            tilde[('e', i)] = len(Nhat_labels)
            Nhat_labels.append(f"et{i}")
            gamma_cols.append(_add(_add({}, bases.e(plus, i)), bases.e(minus, i), -1))
        tilde[('u',)] = len(Nhat_labels)
        Nhat_labels.append("ut")
        gamma_cols.append(_add(_add({}, bases.u(plus)), bases.u(minus), -1))
    elif dm.type == 'pp':
        for i in range(1, r + 1):
            tilde[('u', i)] = len(Nhat_labels)
            Nhat_labels.append(f"ut{i}")
            col = _add({}, bases.u(ConeLabel('tau', i, ns[i])))
            gamma_cols.append(_add(col, bases.u(ConeLabel('tau', i - 1, ns[i - 1])), -1))
        tilde[('e',)] = len(Nhat_labels)
        Nhat_labels.append("et")
        col = {}
        for i in range(r + 1):
            _add(col, bases.e(ConeLabel('tau', i, 0), i))
        gamma_cols.append(col)

    # F_hat: fh_ij for all j, then the extra symbols
    Fhat_labels: List[str] = []
    delta_cols: List[Dict[int, int]] = []
    phat_cols: List[Dict[int, int]] = []
    for i in range(r + 1):
        for j in range(1, ns[i] + 1):
            Fhat_labels.append(f"fh{i}{j}")
            delta_cols.append({bases.F[('f+', i, j)]: 1, bases.F[('f-', i, j)]: -1})
            l_ij, d_ij = dm.l[i][j - 1], dm.d[i][j - 1]
            col: Dict[int, int] = {}
            if j <= n_prime[i]:
                e_row, u_row = pair_rows[(i, j)]
                _add(col, {e_row: 1}, l_ij)
                _add(col, {u_row: 1}, d_ij)
            else:
                # ee, j = n_i: l (et_i - sum eh_ik) + d (ut - sum uh_ik), et_0 = -(et_1 + ... + et_r)
                if i == 0:
                    _add(col, {tilde[('e', k)]: -1 for k in range(1, r + 1)}, l_ij)
                else:
                    _add(col, {tilde[('e', i)]: 1}, l_ij)
                _add(col, {tilde[('u',)]: 1}, d_ij)
                for k in range(1, ns[i]):
                    e_row, u_row = pair_rows[(i, k)]
                    _add(col, {e_row: 1}, -l_ij)
                    _add(col, {u_row: 1}, -d_ij)
            phat_cols.append(col)

    def u_sum(i: int) -> Dict[int, int]:
        return {pair_rows[(i, k)][1]: 1 for k in range(1, n_prime[i] + 1)}

    extra = []
    if dm.type in ('pe', 'pp'):
        extra += [('-', i) for i in range(1, r + 1)]
    if dm.type in ('ep', 'pp'):
        extra += [('+', i) for i in range(1, r + 1)]
    for sign, i in extra:
        Fhat_labels.append(f"fh{sign}{i}")
        if sign == '-':
            delta_cols.append({bases.F[('f-', i - 1, 0)]: 1, bases.F[('f-', i, 0)]: -1})
        else:
            delta_cols.append({
                bases.F[('f+', i - 1, ns[i - 1] + 1)]: 1,
                bases.F[('f+', i, ns[i] + 1)]: -1,
            })
        col = _add(_add({}, u_sum(i - 1)), u_sum(i), -1)
        if dm.type == 'pp':
            if sign == '-':
                _add(col, {tilde[('u', i)]: 1}, -1)
            else:
                col = {tilde[('u', i)]: 1}
        phat_cols.append(col)

    gamma = _from_columns(gamma_cols, N_rank)
    delta = _from_columns(delta_cols, F_rank)
    Phat = _from_columns(phat_cols, len(Nhat_labels))
    system = HatSystem(
        alpha, beta, block_P, gamma, delta, Phat,
        tuple(bases.N_labels), tuple(bases.F_labels), tuple(Nhat_labels), tuple(Fhat_labels),
        tuple((i, j, e, u, Fhat_labels.index(f"fh{i}{j}")) for (i, j), (e, u) in pair_rows.items()),
    )
    _check_hat_system(dm, system)
    return system


def _from_columns(cols: List[Dict[int, int]], rows: int) -> IntMatrix:
    M = zeros(rows, len(cols))
    for j, col in enumerate(cols):
        for i, v in col.items():
            M[i, j] += v
    return M


def _check_hat_system(dm: DefiningMatrix, s: HatSystem) -> None:
    if (matmul(s.alpha, s.gamma) != 0).any():
        raise InvariantViolation("alpha * gamma != 0", dm)
    if (matmul(s.beta, s.delta) != 0).any():
        raise InvariantViolation("beta * delta != 0", dm)
    if (matmul(s.gamma, s.Phat) != matmul(s.block_P, s.delta)).any():
        raise InvariantViolation("gamma * P_hat != P * delta", dm)
    expected_n = 2 * dm.n + (dm.m - 1) * (dm.r + 1)
    expected_f = dm.n + dm.m * dm.r
    if s.gamma.shape[1] != expected_n or s.delta.shape[1] != expected_f:
        raise InvariantViolation(
            f"kernel ranks {s.gamma.shape[1]}, {s.delta.shape[1]} differ from {expected_n}, {expected_f}", dm)


def reduced_minors(system: HatSystem, limit: int = MINOR_ENUMERATION_LIMIT) -> Optional[Tuple[int, ...]]:
    """
    Reduced minors of P_hat: for each row subset A, drop every pair (eh_ij, uh_ij)
    of which exactly one row lies in A together with the column fh_ij.

    Returns:
        Sorted distinct nonzero values, or None when there are more than
        ``limit`` row subsets
    """
    P = system.Phat
    g, h = P.shape
    if math.comb(g, h) > limit:
        return None
    pair_of_row = {}
    for i, j, e_row, u_row, col in system.pairs:
        pair_of_row[e_row] = (u_row, col)
        pair_of_row[u_row] = (e_row, col)
    values = set()
    for rows in combinations(range(g), h):
        chosen = set(rows)
        drop_rows, drop_cols = set(), set()
        for row in rows:
            if row in pair_of_row:
                partner, col = pair_of_row[row]
                if partner not in chosen:
                    drop_rows.add(row)
                    drop_cols.add(col)
        keep_rows = [x for x in rows if x not in drop_rows]
        keep_cols = [c for c in range(h) if c not in drop_cols]
        values.add(abs(determinant(P[keep_rows][:, keep_cols])))
    values.discard(0)
    return tuple(sorted(values))


@dataclass(frozen=True)
class MinorSets:
    """
    Maximal-minor data of P and P_hat.

    M_P and M_Phat keep zeros and subset order; M_prime_P and M_red_Phat are
    sorted sets of nonzero values. Sets over P_hat are None when their
    enumeration exceeds the subset limit; the gcds are always exact.
    """

    M_P: Tuple[int, ...]
    M_prime_P: Tuple[int, ...]
    mu_hat: int
    nu_hat: Dict[Tuple[int, int], int]
    M_Phat: Optional[Tuple[int, ...]]
    M_red_Phat: Optional[Tuple[int, ...]]
    gcd_P: int
    gcd_prime_P: int
    gcd_Phat: int
    gcd_red_Phat: Optional[int]


def minor_sets(dm: DefiningMatrix, system: Optional[HatSystem] = None,
               limit: int = MINOR_ENUMERATION_LIMIT) -> MinorSets:
    """All maximal-minor sets of P and P_hat with their gcds."""
    P = assemble(dm)
    system = system or hat_system_explicit(dm)
    M_P = maximal_minors(P)
    M_prime = minors_prime(dm)
    g, h = system.Phat.shape
    M_Phat = maximal_minors(system.Phat) if math.comb(g, h) <= limit else None
    M_red = reduced_minors(system, limit)
    return MinorSets(
        M_P=M_P,
        M_prime_P=M_prime,
        mu_hat=mu_hat(dm),
        nu_hat={(i, j): nu_hat(dm, i, j) for i, n_i in enumerate(dm.n_blocks) for j in range(1, n_i + 1)},
        M_Phat=M_Phat,
        M_red_Phat=M_red,
        gcd_P=_gcd(M_P),
        gcd_prime_P=_gcd(M_prime),
        gcd_Phat=gcd_maximal_minors(system.Phat, limit),
        gcd_red_Phat=_gcd(M_red) if M_red is not None else None,
    )


def picard_index_formula(dm: DefiningMatrix) -> int:
    """
    Picard index as the product of the local class group orders over |Cl^tors|.

    Raises:
        InvariantViolation: If the quotient is not an integer
    """
    P = assemble(dm)
    torsion = gcd_maximal_minors(P)
    if torsion == 0:
        raise InvariantViolation("defining matrix does not have full rank", dm)
    fan = ambient_fan(dm)
    local = local_orders(fan)
    index, rest = divmod(math.prod(local), torsion)
    if rest:
        raise InvariantViolation(f"local order product {math.prod(local)} is not divisible by {torsion}", dm)
    return index


@dataclass
class KStarReport:
    """Everything ``analyze`` reports about one K*-surface."""

    dm: DefiningMatrix
    class_group: AbelianGroup
    cone_labels: Tuple[str, ...]
    local_groups: Tuple[AbelianGroup, ...]
    fixed_points: List[FixedPoint]
    pic_index_formula: int
    pic_index_hat: int
    pic_index_direct: int
    direct: PicardData
    hat: PicardData
    minors: MinorSets
    coker_phat_dual: AbelianGroup
    formula_quotient: str

    @property
    def routes_agree(self) -> bool:
        return self.pic_index_formula == self.pic_index_hat == self.pic_index_direct


def analyze(dm: DefiningMatrix) -> KStarReport:
    """
    Full analysis of X(P): three Picard index routes, minor sets and fixed points.

    Raises:
        InputError: If dm is not a defining matrix
        InvariantViolation: If the routes or the torsion identities disagree
    """
    require_valid(dm)
    fan = ambient_fan(dm)
    direct = picard_direct(fan)
    hat = picard_via_hat(fan)
    system = hat_system_explicit(dm)
    minors = minor_sets(dm, system)
    coker = cokernel(system.Phat.T)
    report = KStarReport(
        dm=dm,
        class_group=direct.class_group,
        cone_labels=tuple(str(label) for label, _ in ambient_cones(dm)),
        local_groups=direct.local_groups,
        fixed_points=fixed_points(dm),
        pic_index_formula=picard_index_formula(dm),
        pic_index_hat=hat.pic_index,
        pic_index_direct=direct.pic_index,
        direct=direct,
        hat=hat,
        minors=minors,
        coker_phat_dual=coker,
        formula_quotient=str(formula_quotient(fan, direct.pic_index).quotient),
    )
    if not report.routes_agree:
        raise InvariantViolation(
            f"Picard index routes disagree: formula={report.pic_index_formula} "
            f"hat={report.pic_index_hat} direct={report.pic_index_direct}", dm)
    if coker.order != direct.class_group.torsion_order:
        raise InvariantViolation(
            f"|coker(P_hat^T)| = {coker.order} differs from |Cl^tors| = {direct.class_group.torsion_order}", dm)
    logger.info(f"analyzed {dm.type} surface with r={dm.r}: Cl = {report.class_group}, "
                f"Picard index {report.pic_index_direct}")
    return report


__all__ = [
    'mu',
    'mu_hat',
    'nu',
    'nu_hat',
    'nu_relation_coefficients',
    'nu_hat_divides',
    'minors_prime',
    'vanishing_minor_violations',
    'HatSystem',
    'hat_system_explicit',
    'reduced_minors',
    'MinorSets',
    'minor_sets',
    'picard_index_formula',
    'KStarReport',
    'analyze',
]
