"""
Serialization Module

JSON encoding of defining matrices, fans, abelian groups and Picard data.
Integers beyond 53 bits are written as decimal strings; readers accept
numbers and decimal strings alike.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

from src.analyzers.kstarindex import KStarReport
from src.analyzers.toricpic import PicardData, IndexFormulaCheck
from src.core.defmat import DefiningMatrix, Fan
from src.core.errors import InputError
from src.core.exactlin import AbelianGroup

logger = logging.getLogger(__name__)

SAFE_INT = 2 ** 53 - 1


def encode_int(value: int) -> Union[int, str]:
    value = int(value)
    return value if abs(value) <= SAFE_INT else str(value)


def decode_int(value: Any, field: str) -> int:
    if isinstance(value, bool):
        raise InputError(f"expected an integer, got {value!r}", field)
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value.strip())
        except ValueError:
            pass
    raise InputError(f"expected an integer or decimal string, got {value!r}", field)


def encode_ints(obj: Any) -> Any:
    """Recursively replace large integers by decimal strings."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, int):
        return encode_int(obj)
    if isinstance(obj, dict):
        return {k: encode_ints(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode_ints(v) for v in obj]
    return obj


def _int_blocks(value: Any, field: str) -> list:
    if not isinstance(value, list):
        raise InputError(f"expected a list of lists, got {type(value).__name__}", field)
    blocks = []
    for i, block in enumerate(value):
        if not isinstance(block, list):
            raise InputError(f"expected a list, got {type(block).__name__}", f"{field}[{i}]")
        blocks.append([decode_int(x, f"{field}[{i}]") for x in block])
    return blocks


def read_json(path: Union[str, Path]) -> Any:
    """
    Load a JSON file.

    Raises:
        InputError: If the file is missing or not valid JSON
    """
    path = Path(path)
    try:
        with open(path) as f:
            return json.load(f)
    except FileNotFoundError:
        raise InputError("file not found", str(path))
    except json.JSONDecodeError as e:
        raise InputError(f"invalid JSON ({e})", str(path))


def write_json(data: Any, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(encode_ints(data), f, indent=2)
    return path


def defining_matrix_from_json(data: Any, source: str = "defining matrix") -> DefiningMatrix:
    if not isinstance(data, dict):
        raise InputError("expected a JSON object with keys type, l, d", source)
    missing = {'type', 'l', 'd'} - set(data)
    if missing:
        raise InputError(f"missing keys {sorted(missing)}", source)
    return DefiningMatrix.from_blocks(data['type'], _int_blocks(data['l'], 'l'), _int_blocks(data['d'], 'd'))


def fan_from_json(data: Any, source: str = "fan") -> Fan:
    if not isinstance(data, dict) or 'rays' not in data or 'max_cones' not in data:
        raise InputError("expected a JSON object with keys rays, max_cones", source)
    dim = decode_int(data['dim'], 'dim') if 'dim' in data else None
    return Fan.from_rays(_int_blocks(data['rays'], 'rays'), _int_blocks(data['max_cones'], 'max_cones'), dim)


def dump_defining_matrix(dm: DefiningMatrix, path: Union[str, Path]) -> Path:
    return write_json(dm.to_dict(), path)


def load_defining_matrix(path: Union[str, Path]) -> DefiningMatrix:
    return defining_matrix_from_json(read_json(path), str(path))


def dump_fan(fan: Fan, path: Union[str, Path]) -> Path:
    return write_json(fan.to_dict(), path)


def load_fan(path: Union[str, Path]) -> Fan:
    return fan_from_json(read_json(path), str(path))


def group_to_json(group: AbelianGroup) -> Dict:
    return {'rank': group.rank, 'torsion': [encode_int(t) for t in group.torsion], 'text': str(group)}


def picard_data_to_json(data: PicardData, check: Union[IndexFormulaCheck, None] = None) -> Dict:
    out = {
        'route': data.route,
        'class_group': group_to_json(data.class_group),
        'local_groups': [group_to_json(g) for g in data.local_groups],
        'local_orders': [encode_int(o) if o is not None else None for o in data.local_orders],
        'pic_index': encode_int(data.pic_index),
        'pic_rank': data.pic_rank,
        'pic_torsion_free': data.pic_torsion_free,
        'khat': group_to_json(data.khat),
    }
    if data.pic_group is not None:
        out['pic_group'] = group_to_json(data.pic_group)
    if data.pic_generators:
        out['pic_generators'] = encode_ints(data.pic_generators)
    if check is not None:
        out['formula_quotient'] = str(check.quotient)
        out['formula_holds'] = check.formula_holds
        if not check.formula_holds:
            out['note'] = (f"product of local orders over torsion order is {check.quotient}, "
                           f"not the Picard index {data.pic_index}")
    return out


def kstar_report_to_json(report: KStarReport) -> Dict:
    """Everything ``analyze`` found about one surface, ready for json.dump."""
    ms = report.minors
    return encode_ints({
        'defining_matrix': report.dm.to_dict(),
        'class_group': group_to_json(report.class_group),
        'local_groups': [
            {'cone': label, **group_to_json(group)}
            for label, group in zip(report.cone_labels, report.local_groups)
        ],
        'fixed_points': [p.to_dict() for p in report.fixed_points],
        'pic_index': {
            'formula': report.pic_index_formula,
            'hat': report.pic_index_hat,
            'direct': report.pic_index_direct,
        },
        'pic_generators': [list(g) for g in report.direct.pic_generators],
        'formula_quotient': report.formula_quotient,
        'khat': group_to_json(report.hat.khat),
        'coker_phat_dual': group_to_json(report.coker_phat_dual),
        'minors': {
            'M_P': list(ms.M_P),
            'M_prime_P': list(ms.M_prime_P),
            'mu_hat': ms.mu_hat,
            'nu_hat': {f"{i},{j}": v for (i, j), v in ms.nu_hat.items()},
            'M_Phat': list(ms.M_Phat) if ms.M_Phat is not None else None,
            'M_red_Phat': list(ms.M_red_Phat) if ms.M_red_Phat is not None else None,
            'gcd_P': ms.gcd_P,
            'gcd_prime_P': ms.gcd_prime_P,
            'gcd_Phat': ms.gcd_Phat,
            'gcd_red_Phat': ms.gcd_red_Phat,
        },
    })


__all__ = [
    'SAFE_INT',
    'encode_int',
    'decode_int',
    'encode_ints',
    'read_json',
    'write_json',
    'defining_matrix_from_json',
    'fan_from_json',
    'dump_defining_matrix',
    'load_defining_matrix',
    'dump_fan',
    'load_fan',
    'group_to_json',
    'picard_data_to_json',
    'kstar_report_to_json',
]
