"""
Defining Matrix Module

This module handles the block data (l, d, type) that defines a rational
projective K*-surface: validation, assembly of the column matrix P, the
ambient toric fan, and the fixed points of the K*-action.
"""

import logging
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from src.core.cones import positively_spans
from src.core.errors import DegenerateFanError, InputError
from src.core.exactlin import IntMatrix, gcd_maximal_minors, rank, zeros

logger = logging.getLogger(__name__)

FAN_TYPES = ('ee', 'pe', 'ep', 'pp')


@dataclass(frozen=True)
class Violation:
    """One failed invariant of a defining matrix or fan."""

    kind: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


@dataclass(frozen=True)
class DefiningMatrix:
    """
    Block data of a K*-surface.

    Attributes:
        type: Source/sink type, one of ee, pe, ep, pp
        l: Per block i = 0..r the positive entries l_i1, ..., l_in_i
        d: Per block the integers d_i1, ..., d_in_i
    """

    type: str
    l: Tuple[Tuple[int, ...], ...]
    d: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_blocks(cls, type: str, l: Iterable[Iterable[int]], d: Iterable[Iterable[int]]) -> 'DefiningMatrix':
        """
        Build from nested sequences, coercing entries to int.

        Raises:
            InputError: If the type is unknown or the entries are not integers
        """
        if type not in FAN_TYPES:
            raise InputError(f"unknown type {type!r}, expected one of {', '.join(FAN_TYPES)}", "type")
        try:
            lt = tuple(tuple(int(x) for x in block) for block in l)
            dt = tuple(tuple(int(x) for x in block) for block in d)
        except (TypeError, ValueError) as e:
            raise InputError(f"block entries must be integers ({e})", "l/d")
        return cls(type, lt, dt)

    @property
    def r(self) -> int:
        return len(self.l) - 1

    @property
    def n_blocks(self) -> Tuple[int, ...]:
        return tuple(len(block) for block in self.l)

    @property
    def n(self) -> int:
        return sum(self.n_blocks)

    @property
    def has_plus(self) -> bool:
        """True when the source is parabolic, i.e. v+ is a column."""
        return self.type in ('pe', 'pp')

    @property
    def has_minus(self) -> bool:
        return self.type in ('ep', 'pp')

    @property
    def m(self) -> int:
        return int(self.has_plus) + int(self.has_minus)

    def column_index(self, i: int, j: int) -> int:
        """
        Column of v_ij for 1 <= j <= n_i; j = 0 gives v+ and j = n_i + 1 gives v-.
        """
        if not 0 <= i <= self.r:
            raise IndexError(f"block index {i} out of range 0..{self.r}")
        n_i = self.n_blocks[i]
        if j == 0:
            if not self.has_plus:
                raise IndexError(f"type {self.type} has no column v+")
            return self.n
        if j == n_i + 1:
            if not self.has_minus:
                raise IndexError(f"type {self.type} has no column v-")
            return self.n + int(self.has_plus)
        if not 1 <= j <= n_i:
            raise IndexError(f"column index {j} out of range 1..{n_i} in block {i}")
        return sum(self.n_blocks[:i]) + j - 1

    @property
    def column_labels(self) -> Tuple[str, ...]:
        labels = [f"v{i}{j}" for i, n_i in enumerate(self.n_blocks) for j in range(1, n_i + 1)]
        if self.has_plus:
            labels.append("v+")
        if self.has_minus:
            labels.append("v-")
        return tuple(labels)

    def to_dict(self) -> Dict:
        return {'type': self.type, 'l': [list(b) for b in self.l], 'd': [list(b) for b in self.d]}


@dataclass(frozen=True)
class Fan:
    """
    Lattice fan given by primitive rays and maximal cones.

    Attributes:
        dim: Rank of the ambient lattice
        rays: Ray generators
        max_cones: Index sets into ``rays``
    """

    dim: int
    rays: Tuple[Tuple[int, ...], ...]
    max_cones: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_rays(cls, rays: Iterable[Iterable[int]], max_cones: Iterable[Iterable[int]],
                  dim: Optional[int] = None) -> 'Fan':
        rt = tuple(tuple(int(x) for x in ray) for ray in rays)
        ct = tuple(tuple(int(x) for x in cone) for cone in max_cones)
        if dim is None:
            if not rt:
                raise InputError("cannot infer the dimension of a fan without rays", "rays")
            dim = len(rt[0])
        return cls(dim, rt, ct)

    def ray_matrix(self) -> IntMatrix:
        """dim x (#rays) matrix P with the rays as columns."""
        P = zeros(self.dim, len(self.rays))
        for j, ray in enumerate(self.rays):
            for i, x in enumerate(ray):
                P[i, j] = x
        return P

    def cone_matrix(self, cone: int) -> IntMatrix:
        P = self.ray_matrix()
        return P[:, list(self.max_cones[cone])].copy()

    def is_simplicial(self) -> bool:
        return all(rank(self.cone_matrix(c)) == len(cone) for c, cone in enumerate(self.max_cones))

    def is_complete_2d(self) -> bool:
        """Complete fan in the plane: consecutive rays by angle form the 2-cones."""
        if self.dim != 2 or len(self.rays) < 3:
            return False
        order = sort_by_angle(self.rays)
        expected = set()
        for a, b in zip(order, order[1:] + order[:1]):
            u, v = self.rays[a], self.rays[b]
            if u[0] * v[1] - u[1] * v[0] <= 0:
                return False
            expected.add(frozenset((a, b)))
        return expected == {frozenset(c) for c in self.max_cones}

    def validate(self) -> List[Violation]:
        """Primitive rays, every ray in some cone, rays spanning as a cone."""
        violations = []
        for j, ray in enumerate(self.rays):
            if len(ray) != self.dim:
                violations.append(Violation('shape', f"ray {j} has length {len(ray)}, expected {self.dim}"))
            elif not any(ray):
                violations.append(Violation('primitive', f"ray {j} is zero"))
            elif math.gcd(*ray) != 1:
                violations.append(Violation('primitive', f"ray {j} = {list(ray)} is not primitive"))
        used = set()
        for c, cone in enumerate(self.max_cones):
            if not cone:
                violations.append(Violation('cone', f"maximal cone {c} is empty"))
            for idx in cone:
                if not 0 <= idx < len(self.rays):
                    violations.append(Violation('cone', f"maximal cone {c} refers to missing ray {idx}"))
                used.add(idx)
        for j in range(len(self.rays)):
            if j not in used:
                violations.append(Violation('coverage', f"ray {j} lies in no maximal cone"))
        if violations:
            return violations
        if not positively_spans(self.ray_matrix(), self.dim):
            violations.append(Violation('spanning', "rays do not generate the space as a cone"))
        return violations

    def require_valid(self) -> 'Fan':
        violations = self.validate()
        if violations:
            raise DegenerateFanError("; ".join(str(v) for v in violations), "fan")
        return self

    def to_dict(self) -> Dict:
        return {'rays': [list(r) for r in self.rays], 'max_cones': [list(c) for c in self.max_cones]}


@dataclass(frozen=True)
class ConeLabel:
    """Position of a maximal cone of an ambient fan: sigma+, sigma- or tau_ij."""

    kind: str
    i: Optional[int] = None
    j: Optional[int] = None

    def __str__(self) -> str:
        if self.kind == 'tau':
            return f"tau{self.i}{self.j}"
        return self.kind


@dataclass(frozen=True)
class FixedPoint:
    """
    Fixed point of the K*-action on X(P).

    Attributes:
        kind: elliptic_plus, elliptic_minus, hyperbolic or parabolic
        cone: Index of the associated maximal cone in the ambient fan
        i: Block of a hyperbolic or parabolic point
        j: Position inside the block
        local_order: Order of the local class group
    """

    kind: str
    cone: int
    i: Optional[int] = None
    j: Optional[int] = None
    local_order: Optional[int] = None

    @property
    def name(self) -> str:
        if self.kind == 'elliptic_plus':
            return "x+"
        if self.kind == 'elliptic_minus':
            return "x-"
        return f"x{self.i}{self.j}"

    def to_dict(self) -> Dict:
        out = {'name': self.name, 'kind': self.kind, 'cone': self.cone}
        if self.local_order is not None:
            out['local_order'] = self.local_order
        return out


def _slope_key(l: int, d: int) -> Fraction:
    return Fraction(d, l)


def assemble(dm: DefiningMatrix) -> IntMatrix:
    """
    (r+1) x (n+m) matrix with columns v_ij = l_ij e_i + d_ij e_{r+1}, then v+, v-.

    Block 0 uses e_0 = -(e_1 + ... + e_r).
    """
    r = dm.r
    P = zeros(r + 1, dm.n + dm.m)
    col = 0
    for i in range(r + 1):
        for l_ij, d_ij in zip(dm.l[i], dm.d[i]):
            if i == 0:
                for k in range(r):
                    P[k, col] = -l_ij
            else:
                P[i - 1, col] = l_ij
            P[r, col] = d_ij
            col += 1
    if dm.has_plus:
        P[r, col] = 1
        col += 1
    if dm.has_minus:
        P[r, col] = -1
    return P


def _structure_violations(dm: DefiningMatrix) -> List[Violation]:
    violations = []
    if dm.type not in FAN_TYPES:
        violations.append(Violation('type', f"unknown type {dm.type!r}"))
    if len(dm.l) != len(dm.d):
        violations.append(Violation('shape', f"{len(dm.l)} l-blocks but {len(dm.d)} d-blocks"))
        return violations
    if dm.r < 1:
        violations.append(Violation('shape', "at least two blocks are required"))
    for i, (lb, db) in enumerate(zip(dm.l, dm.d)):
        if not lb:
            violations.append(Violation('shape', f"block {i} is empty"))
        if len(lb) != len(db):
            violations.append(Violation('shape', f"block {i} has {len(lb)} l-entries but {len(db)} d-entries"))
    return violations


def validate(dm: DefiningMatrix) -> List[Violation]:
    """
    Check every defining-matrix invariant.

    Returns:
        List of violations; empty when dm is a defining matrix
    """
    violations = _structure_violations(dm)
    if violations:
        return violations
    for i, (lb, db) in enumerate(zip(dm.l, dm.d)):
        for j, (l_ij, d_ij) in enumerate(zip(lb, db), start=1):
            if l_ij < 1:
                violations.append(Violation('positivity', f"l{i}{j} = {l_ij} < 1"))
            elif math.gcd(l_ij, d_ij) != 1:
                violations.append(Violation('gcd', f"gcd(l{i}{j}, d{i}{j}) = gcd({l_ij}, {d_ij}) != 1"))
        if any(x < 1 for x in lb):
            continue
        for j in range(len(lb) - 1):
            left, right = _slope_key(lb[j], db[j]), _slope_key(lb[j + 1], db[j + 1])
            if not left > right:
                violations.append(Violation(
                    'slope', f"block {i}: d{i}{j + 1}/l{i}{j + 1} = {left} is not > d{i}{j + 2}/l{i}{j + 2} = {right}"))
    if violations:
        return violations
    if not positively_spans(assemble(dm), dm.r + 1):
        violations.append(Violation('spanning', "columns do not generate Q^(r+1) as a cone"))
    return violations


def require_valid(dm: DefiningMatrix) -> DefiningMatrix:
    """Raise InputError listing all violations, otherwise return dm."""
    violations = validate(dm)
    if violations:
        raise InputError("; ".join(str(v) for v in violations), "defining matrix")
    return dm


def ambient_cones(dm: DefiningMatrix) -> List[Tuple[ConeLabel, Tuple[int, ...]]]:
    """
    Maximal cones of the ambient fan with their labels.

    Order: sigma+ (or tau_00, ..., tau_r0), then tau_ij for 1 <= j <= n_i - 1
    block by block, then sigma- (or tau_0n_0, ..., tau_rn_r).
    """
    r, ns = dm.r, dm.n_blocks
    cones = []
    if dm.has_plus:
        for i in range(r + 1):
            cones.append((ConeLabel('tau', i, 0), (dm.column_index(i, 0), dm.column_index(i, 1))))
    else:
        cones.append((ConeLabel('sigma+'), tuple(dm.column_index(i, 1) for i in range(r + 1))))
    for i in range(r + 1):
        for j in range(1, ns[i]):
            cones.append((ConeLabel('tau', i, j), (dm.column_index(i, j), dm.column_index(i, j + 1))))
    if dm.has_minus:
        for i in range(r + 1):
            cones.append((ConeLabel('tau', i, ns[i]), (dm.column_index(i, ns[i]), dm.column_index(i, ns[i] + 1))))
    else:
        cones.append((ConeLabel('sigma-'), tuple(dm.column_index(i, ns[i]) for i in range(r + 1))))
    return cones


def ambient_fan(dm: DefiningMatrix) -> Fan:
    """Fan of the minimal ambient toric variety of X(P)."""
    P = assemble(dm)
    rays = tuple(tuple(int(x) for x in P[:, j]) for j in range(P.shape[1]))
    for j, ray in enumerate(rays):
        if math.gcd(*ray) != 1:
            raise DegenerateFanError(f"column {dm.column_labels[j]} = {list(ray)} is not primitive", "assemble")
    return Fan(dm.r + 1, rays, tuple(cone for _, cone in ambient_cones(dm)))


def fixed_points(dm: DefiningMatrix) -> List[FixedPoint]:
    """One fixed point per maximal cone of the ambient fan, with local class group orders."""
    fan = ambient_fan(dm)
    points = []
    for c, (label, _) in enumerate(ambient_cones(dm)):
        order = gcd_maximal_minors(fan.cone_matrix(c).T)
        if label.kind == 'sigma+':
            points.append(FixedPoint('elliptic_plus', c, local_order=order))
        elif label.kind == 'sigma-':
            points.append(FixedPoint('elliptic_minus', c, local_order=order))
        elif 1 <= label.j <= dm.n_blocks[label.i] - 1:
            points.append(FixedPoint('hyperbolic', c, label.i, label.j, order))
        else:
            points.append(FixedPoint('parabolic', c, label.i, label.j, order))
    return points


def flip(dm: DefiningMatrix) -> DefiningMatrix:
    """Swap source and sink: negate the last row and reverse every block."""
    swapped = {'ee': 'ee', 'pe': 'ep', 'ep': 'pe', 'pp': 'pp'}[dm.type]
    return DefiningMatrix(
        swapped,
        tuple(tuple(reversed(b)) for b in dm.l),
        tuple(tuple(-x for x in reversed(b)) for b in dm.d),
    )


def normalize_shifts(dm: DefiningMatrix) -> DefiningMatrix:
    """
    Bring d_i1 into [0, l_i1) for every block i >= 1.

    Adds integer multiples of the rows 1..r to the last row; block 0 absorbs
    the compensating shift.
    """
    l = [list(b) for b in dm.l]
    d = [list(b) for b in dm.d]
    for i in range(1, dm.r + 1):
        k = d[i][0] // l[i][0]
        if k:
            d[i] = [x - k * y for x, y in zip(d[i], l[i])]
            d[0] = [x + k * y for x, y in zip(d[0], l[0])]
    return DefiningMatrix(dm.type, dm.l, tuple(tuple(b) for b in d))


def elliptic_type(l_tuple: Sequence[int]) -> Optional[str]:
    """
    Type of a log terminal elliptic fixed point from its l-tuple.

    Entries equal to 1 are ignored. Returns 'A', 'D', 'E', or None when the
    point is not log terminal.
    """
    rest = sorted((x for x in l_tuple if x >= 2), reverse=True)
    if len(rest) <= 2:
        return 'A'
    if len(rest) > 3:
        return None
    if rest[1] == 2 and rest[2] == 2:
        return 'D'
    if tuple(rest) in ((3, 3, 2), (4, 3, 2), (5, 3, 2)):
        return 'E'
    return None


def sort_by_angle(vectors: Sequence[Sequence[int]]) -> List[int]:
    """Indices of plane vectors sorted counter-clockwise by angle from the positive x-axis."""

    def half(v):
        return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1

    def compare(a, b):
        u, v = vectors[a], vectors[b]
        if half(u) != half(v):
            return half(u) - half(v)
        cross = u[0] * v[1] - u[1] * v[0]
        return -1 if cross > 0 else (1 if cross < 0 else 0)

    return sorted(range(len(vectors)), key=cmp_to_key(compare))


def random_defining_matrix(rng: random.Random, max_r: int = 3, max_n: int = 3, max_l: int = 7,
                           max_d: int = 9, types: Sequence[str] = FAN_TYPES,
                           max_tries: int = 10000) -> DefiningMatrix:
    """
    Draw a random valid defining matrix.

    Blocks get coprime (l, d) pairs sorted by decreasing slope; draws are
    repeated until the columns span as a cone.
    """
    coprime = [(l, d) for l in range(1, max_l + 1) for d in range(-max_d, max_d + 1) if math.gcd(l, d) == 1]
    for _ in range(max_tries):
        r = rng.randint(1, max_r)
        fan_type = rng.choice(list(types))
        l_blocks, d_blocks = [], []
        for _i in range(r + 1):
            n_i = min(rng.randint(1, max_n), len(coprime))
            # distinct coprime pairs never share a slope
            ordered = sorted(rng.sample(coprime, n_i), key=lambda p: _slope_key(*p), reverse=True)
            l_blocks.append(tuple(p[0] for p in ordered))
            d_blocks.append(tuple(p[1] for p in ordered))
        dm = DefiningMatrix(fan_type, tuple(l_blocks), tuple(d_blocks))
        if not validate(dm):
            return dm
    raise RuntimeError(f"no valid defining matrix found in {max_tries} draws")


__all__ = [
    'FAN_TYPES',
    'Violation',
    'DefiningMatrix',
    'Fan',
    'ConeLabel',
    'FixedPoint',
    'assemble',
    'validate',
    'require_valid',
    'ambient_cones',
    'ambient_fan',
    'fixed_points',
    'flip',
    'normalize_shifts',
    'elliptic_type',
    'sort_by_angle',
    'random_defining_matrix',
]
