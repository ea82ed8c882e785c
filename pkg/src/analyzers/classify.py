"""
Log del Pezzo Classification Module

This module enumerates log del Pezzo surfaces of Picard number one with a
K*-action by their Picard index. Toric surfaces are fake weighted projective
planes, listed through their (n, w, x) normal form. Non-toric surfaces have
two elliptic fixed points (type ee) or one elliptic fixed point and a
parabolic fixed point curve (type ep); their defining matrices are solved
from the index factorization and certified with the Picard index formula.

Each Picard index is classified independently, so ranges are spread over a
process pool and merged in (index, key) order.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import partial
from itertools import permutations, product
from multiprocessing import Pool
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from src.analyzers.toricpic import complete_fan_2d, local_orders, picard_direct
from src.core.defmat import (
    FAN_TYPES,
    DefiningMatrix,
    ambient_fan,
    assemble,
    elliptic_type,
    flip,
    normalize_shifts,
    validate,
)
from src.core.errors import InputError, InvariantViolation
from src.core.exactlin import IntMatrix, as_int_matrix, gcd_maximal_minors, hnf

logger = logging.getLogger(__name__)

NONTORIC_CASES = ('eAeA', 'eAeD', 'eAeE', 'eDeD', 'eDeE', 'eEeE', 'eDp', 'eEp')
CENSUS_COLUMNS = ('toric',) + NONTORIC_CASES

Key = Tuple[int, ...]


def divisors(n: int) -> List[int]:
    small = [k for k in range(1, math.isqrt(n) + 1) if n % k == 0]
    return sorted(set(small + [n // k for k in small]))


def ordered_factorizations(n: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """All ordered tuples of positive integers with the given length and product n."""
    if parts == 1:
        yield (n,)
        return
    for k in divisors(n):
        for rest in ordered_factorizations(n // k, parts - 1):
            yield (k,) + rest


def canonical_key(P: IntMatrix, column_orders: Iterable[Sequence[int]]) -> Key:
    """
    Lexicographic minimum of hnf((P*S)^T) over the given column orders S.

    Two matrices get the same key iff some order makes them equal up to a
    unimodular row transformation.
    """
    best = None
    for order in column_orders:
        H = hnf(P[:, list(order)].T)
        flat = tuple(int(x) for x in H.flat)
        if best is None or flat < best:
            best = flat
    return best


def family_key(dm: DefiningMatrix) -> Key:
    """
    Isomorphism invariant of a K*-surface from its block data.

    Lexicographic minimum of the flattened (type, n, l, d) over all block
    permutations, with d_i normalized into [0, l_i) for i >= 1. Type ee also
    runs over the source-sink flip; ep keeps its parabolic sink.
    """
    variants = [dm, flip(dm)] if dm.type == 'ee' else [dm]
    best = None
    for base in variants:
        for order in permutations(range(base.r + 1)):
            moved = normalize_shifts(DefiningMatrix(
                base.type, tuple(base.l[i] for i in order), tuple(base.d[i] for i in order),
            ))
            flat = ((FAN_TYPES.index(moved.type),) + moved.n_blocks
                    + tuple(x for b in moved.l for x in b) + tuple(x for b in moved.d for x in b))
            if best is None or flat < best:
                best = flat
    return best


def key_to_str(key: Key) -> str:
    return " ".join(str(x) for x in key)


@dataclass(frozen=True)
class FwppRecord:
    """A fake weighted projective plane in (n, w, x) normal form."""

    n: int
    w: Tuple[int, int, int]
    x: int
    P: Tuple[Tuple[int, ...], ...]
    key: Key

    case = 'toric'

    @property
    def picard_index(self) -> int:
        return self.n ** 2 * math.prod(self.w)

    @property
    def local_orders(self) -> Tuple[int, ...]:
        return tuple(self.n * wi for wi in self.w)

    def to_row(self) -> List[str]:
        return [
            str(self.picard_index), self.case, str(self.n),
            " ".join(map(str, self.w)), str(self.x),
            " ".join(map(str, self.local_orders)), key_to_str(self.key),
        ]


def fwpp_matrix(n: int, w: Sequence[int], x: int) -> Optional[IntMatrix]:
    """
    Normal form [[1, x, -(w0 + x w1)/w2], [0, n w2, -n w1]], or None when
    the entries are not integral or a column is not primitive.
    """
    w0, w1, w2 = w
    if (w0 + x * w1) % w2 or math.gcd(x, n * w2) != 1:
        return None
    c = (w0 + x * w1) // w2
    if math.gcd(c, n * w1) != 1:
        return None
    return as_int_matrix([[1, x, -c], [0, n * w2, -n * w1]])


def classify_fwpp(iota: int) -> List[FwppRecord]:
    """
    Fake weighted projective planes with Picard index iota, one per isomorphism class.

    Args:
        iota: Picard index, at least 1

    Returns:
        Records sorted by canonical key
    """
    if iota < 1:
        raise InputError(f"Picard index must be positive, got {iota}", "iota")
    found: Dict[Key, FwppRecord] = {}
    for n in divisors(iota):
        rest, remainder = divmod(iota, n * n)
        if remainder:
            continue
        for w in ordered_factorizations(rest, 3):
            if math.gcd(w[0], w[1]) != 1 or math.gcd(w[0], w[2]) != 1 or math.gcd(w[1], w[2]) != 1:
                continue
            for x in range(n * w[2]):
                P = fwpp_matrix(n, w, x)
                if P is None:
                    continue
                key = canonical_key(P, permutations(range(3)))
                if key not in found:
                    found[key] = FwppRecord(n, w, x, tuple(tuple(int(v) for v in row) for row in P), key)
    logger.debug(f"iota={iota}: {len(found)} fake weighted projective planes")
    return [found[k] for k in sorted(found)]


@dataclass(frozen=True)
class NontoricRecord:
    """A non-toric log del Pezzo K*-surface of Picard number one."""

    case: str
    dm: DefiningMatrix
    lam: int
    local_orders: Tuple[int, ...]
    picard_index: int
    key: Key

    def to_row(self) -> List[str]:
        l_data = ";".join(" ".join(map(str, b)) for b in self.dm.l)
        d_data = ";".join(" ".join(map(str, b)) for b in self.dm.d)
        return [
            str(self.picard_index), self.case, str(self.lam), l_data, d_data,
            " ".join(map(str, self.local_orders)), key_to_str(self.key),
        ]


def _coprime_residues(l: int) -> List[int]:
    return [d for d in range(l) if math.gcd(l, d) == 1]


def _certify(dm: DefiningMatrix, lam: int, iota: int) -> Optional[Tuple[int, ...]]:
    """Local orders of dm when it is valid with torsion lam and Picard index iota."""
    if validate(dm):
        return None
    if gcd_maximal_minors(assemble(dm)) != lam:
        return None
    orders = local_orders(ambient_fan(dm))
    if math.prod(orders) != lam * iota:
        return None
    return orders


def _ee_l_tuples(T: int, L: int) -> Iterator[Tuple[int, ...]]:
    """Sorted tuples (l_1, ..., l_r) of entries >= 2 with product L, each dividing T."""
    for b in range(2, math.isqrt(L) + 1):
        a, rem = divmod(L, b)
        if not rem and T % a == 0 and T % b == 0:
            yield (a, b)
    if L % 4 == 0 and T % 2 == 0:
        y = L // 4
        if y >= 2 and T % y == 0:
            yield (y, 2, 2)
    if L % 6 == 0 and L // 6 in (3, 4, 5):
        z = L // 6
        if T % z == 0 and T % 6 == 0:
            yield (z, 3, 2)


def _ee_block0_candidates(lam: int, w01: int, w02: int, M: int) -> Iterator[Tuple[int, int]]:
    """
    (l01, l02) pairs. An entry l0k >= 3 leaves a platonic triple (l0k, a, b),
    so L = a*b <= 10 and lam*T <= 10M.
    """
    bound = 10 * M
    for l01 in range(1, bound + 1):
        if lam * l01 * w01 > bound and l01 > 2:
            break
        for l02 in range(1, bound + 1):
            T = l01 * w01 + l02 * w02
            if max(l01, l02) > 2 and lam * T > bound:
                break
            yield l01, l02


def _classify_ee(iota: int, found: Dict[Key, NontoricRecord]) -> None:
    for lam, w01, w02, M in ordered_factorizations(iota, 4):
        for l01, l02 in _ee_block0_candidates(lam, w01, w02, M):
            T = l01 * w01 + l02 * w02
            L, rem = divmod(lam * T, M)
            if rem or L < 4:
                continue
            for ls in _ee_l_tuples(T, L):
                type_plus = elliptic_type((l01,) + ls)
                type_minus = elliptic_type((l02,) + ls)
                if type_plus is None or type_minus is None:
                    continue
                case = "".join(sorted((f"e{type_plus}", f"e{type_minus}")))
                for ds in product(*(_coprime_residues(li) for li in ls)):
                    A = sum(di * (L // li) for di, li in zip(ds, ls))
                    d01, rem1 = divmod(lam * w02 - l01 * A, L)
                    d02, rem2 = divmod(-lam * w01 - l02 * A, L)
                    if rem1 or rem2 or math.gcd(l01, d01) != 1 or math.gcd(l02, d02) != 1:
                        continue
                    dm = DefiningMatrix(
                        'ee', ((l01, l02),) + tuple((li,) for li in ls),
                        ((d01, d02),) + tuple((di,) for di in ds),
                    )
                    orders = _certify(dm, lam, iota)
                    if orders is None:
                        continue
                    key = family_key(dm)
                    if key not in found:
                        found[key] = NontoricRecord(case, dm, lam, orders, iota, key)


def _classify_ep(iota: int, found: Dict[Key, NontoricRecord]) -> None:
    tuples = set()
    for y in divisors(iota):
        if y >= 2:
            tuples.add((y, 2, 2))
    for z in (3, 4, 5):
        tuples.add((z, 3, 2))
    for base in tuples:
        L = math.prod(base)
        if iota % L:
            continue
        w_minus = iota // L
        case = f"e{elliptic_type(base)}p"
        l0, l1, l2 = base
        g = math.gcd(l1 * l2, l0 * l2, l0 * l1)
        for lam in divisors(g):
            for d1, d2 in product(_coprime_residues(l1), _coprime_residues(l2)):
                d0, rem = divmod(lam * w_minus - l0 * (d1 * l2 + l1 * d2), l1 * l2)
                if rem or math.gcd(l0, d0) != 1:
                    continue
                dm = DefiningMatrix('ep', ((l0,), (l1,), (l2,)), ((d0,), (d1,), (d2,)))
                orders = _certify(dm, lam, iota)
                if orders is None:
                    continue
                key = family_key(dm)
                if key not in found:
                    if lam > 1:
                        logger.info(f"iota={iota}: ({case}) family with torsion {lam}")
                    found[key] = NontoricRecord(case, dm, lam, orders, iota, key)


def classify_nontoric(iota: int, cases: Optional[Iterable[str]] = None) -> List[NontoricRecord]:
    """
    Non-toric log del Pezzo K*-surfaces of Picard number one with Picard index iota.

    Args:
        iota: Picard index, at least 1
        cases: Restrict the output to these case names

    Returns:
        Records sorted by case and canonical key
    """
    if iota < 1:
        raise InputError(f"Picard index must be positive, got {iota}", "iota")
    wanted = set(cases) if cases is not None else set(NONTORIC_CASES)
    unknown = wanted - set(NONTORIC_CASES)
    if unknown:
        raise InputError(f"unknown cases {sorted(unknown)}", "cases")
    found: Dict[Key, NontoricRecord] = {}
    if wanted & {'eAeA', 'eAeD', 'eAeE', 'eDeD', 'eDeE', 'eEeE'}:
        _classify_ee(iota, found)
    if wanted & {'eDp', 'eEp'}:
        _classify_ep(iota, found)
    records = [rec for rec in found.values() if rec.case in wanted]
    records.sort(key=lambda rec: (rec.case, rec.key))
    logger.debug(f"iota={iota}: {len(records)} non-toric families")
    return records


def certify_fwpp(record: FwppRecord) -> None:
    """
    Recompute class group and Picard index of the plane from its fan.

    Raises:
        InvariantViolation: If either differs from the normal form data
    """
    P = as_int_matrix(record.P)
    fan = complete_fan_2d([tuple(int(v) for v in P[:, j]) for j in range(3)])
    data = picard_direct(fan)
    if data.class_group.rank != 1 or data.class_group.torsion_order != record.n:
        raise InvariantViolation(f"class group {data.class_group} does not match n = {record.n}", record)
    if data.pic_index != record.picard_index:
        raise InvariantViolation(f"Picard index {data.pic_index} != {record.picard_index}", record)


@dataclass
class CensusRow:
    picard_index: int
    counts: Dict[str, int]
    cumulative: Dict[str, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def to_row(self) -> List[str]:
        return ([str(self.picard_index)] + [str(self.counts.get(c, 0)) for c in CENSUS_COLUMNS]
                + [str(self.cumulative.get(c, 0)) for c in CENSUS_COLUMNS])


Engine = Callable[[int], list]


def classify_all(iota: int, cases: Optional[Sequence[str]] = None) -> list:
    """Toric and non-toric records of one Picard index."""
    wanted = set(cases) if cases is not None else set(CENSUS_COLUMNS)
    records: list = []
    if 'toric' in wanted:
        records += classify_fwpp(iota)
    nontoric = [c for c in NONTORIC_CASES if c in wanted]
    if nontoric:
        records += classify_nontoric(iota, nontoric)
    return records


def iter_classified(lo: int, hi: int, engine: Engine, threads: int = 1) -> Iterator[Tuple[int, list]]:
    """
    (iota, records) for lo <= iota <= hi in increasing order.

    Args:
        engine: Picklable per-index function, e.g. classify_fwpp
        threads: Worker processes; 1 runs in-process
    """
    if lo < 1 or hi < lo:
        raise InputError(f"invalid index range {lo}..{hi}", "range")
    indices = range(lo, hi + 1)
    if threads <= 1:
        for iota in indices:
            yield iota, engine(iota)
        return
    with Pool(processes=threads) as pool:
        for iota, records in zip(indices, pool.imap(engine, indices)):
            yield iota, records


def classify_range(lo: int, hi: int, engine: Engine, threads: int = 1) -> list:
    """All records of the range, sorted by (Picard index, case, key)."""
    merged = []
    for iota, records in iter_classified(lo, hi, engine, threads):
        merged.extend(records)
        logger.debug(f"classified iota={iota}: {len(records)} records")
    merged.sort(key=lambda rec: (rec.picard_index, rec.case, rec.key))
    return merged


def count_cases(records: Iterable) -> Dict[str, int]:
    counts = Counter(rec.case for rec in records)
    return {c: counts.get(c, 0) for c in CENSUS_COLUMNS}


def iter_census(lo: int, hi: int, threads: int = 1,
                start: Optional[Dict[str, int]] = None) -> Iterator[CensusRow]:
    """
    Census rows for lo <= iota <= hi.

    Args:
        start: Cumulative counts before lo, for resumed runs
    """
    running = dict(start or {c: 0 for c in CENSUS_COLUMNS})
    for iota, records in iter_classified(lo, hi, classify_all, threads):
        counts = count_cases(records)
        running = {c: running.get(c, 0) + counts[c] for c in CENSUS_COLUMNS}
        logger.info(f"classified iota={iota} toric={counts['toric']} nontoric={sum(counts.values()) - counts['toric']}")
        yield CensusRow(iota, counts, dict(running))


def census(max_iota: int, threads: int = 1) -> List[CensusRow]:
    """Per-index and cumulative counts of all cases up to max_iota."""
    return list(iter_census(1, max_iota, threads))


def histogram(records: Iterable) -> List[CensusRow]:
    """Counts per Picard index, without cumulative columns filled."""
    by_index: Dict[int, list] = {}
    for rec in records:
        by_index.setdefault(rec.picard_index, []).append(rec)
    return [CensusRow(iota, count_cases(by_index[iota])) for iota in sorted(by_index)]


def engine_for(command: str, cases: Optional[Sequence[str]] = None) -> Engine:
    if command == 'classify-toric':
        return classify_fwpp
    if command == 'classify-nontoric':
        return partial(classify_nontoric, cases=tuple(cases) if cases else None)
    raise InputError(f"no classification engine for {command!r}", "command")


__all__ = [
    'NONTORIC_CASES',
    'CENSUS_COLUMNS',
    'divisors',
    'ordered_factorizations',
    'canonical_key',
    'family_key',
    'FwppRecord',
    'fwpp_matrix',
    'classify_fwpp',
    'certify_fwpp',
    'NontoricRecord',
    'classify_nontoric',
    'CensusRow',
    'classify_all',
    'iter_classified',
    'classify_range',
    'count_cases',
    'iter_census',
    'census',
    'histogram',
    'engine_for',
]
