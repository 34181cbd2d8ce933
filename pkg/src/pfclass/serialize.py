"""JSON-friendly encodings for scalars, matrices, group-ring complexes and pairings."""

from __future__ import annotations

import json
from fractions import Fraction

from .cyclo import CycloNumber, parse_fraction
from .detlines import ComplexError


class ParseError(ValueError):
    def __init__(self, message: str, degree: int | None = None):
        super().__init__(message)
        self.degree = degree


def fraction_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def scalar_to_json(x):
    if isinstance(x, CycloNumber):
        return fraction_str(x.to_fraction()) if x.is_rational() else x.to_json()
    return fraction_str(x)


def scalar_from_json(data):
    if isinstance(data, dict):
        return CycloNumber.from_json(data)
    try:
        return parse_fraction(data)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad scalar {data!r}") from exc


def matrix_to_json(m) -> list:
    return [[scalar_to_json(x) for x in row] for row in m]


def matrix_from_json(data) -> list:
    if not isinstance(data, list) or any(not isinstance(r, list) for r in data):
        raise ParseError("matrix must be a list of rows")
    widths = {len(r) for r in data}
    if len(widths) > 1:
        raise ParseError("ragged matrix")
    return [[scalar_from_json(x) for x in row] for row in data]


def element_to_json(a) -> list:
    return [fraction_str(c) for c in a.coeffs]


def element_from_json(group, data):
    from .groups import GroupAlgebraElement

    if isinstance(data, dict):
        terms = {}
        for key, val in data.items():
            g = int(key)
            if not 0 <= g < group.order:
                raise ParseError(f"group element index {g} out of range")
            terms[g] = scalar_from_json(val)
        return GroupAlgebraElement.from_dict(group, terms)
    if not isinstance(data, list) or len(data) != group.order:
        raise ParseError(f"group-ring element needs {group.order} coefficients")
    return GroupAlgebraElement(group, tuple(scalar_from_json(c) for c in data))


def complex_to_json(p) -> dict:
    """{"group", "lo", "hi", "ranks", "boundaries"}; boundary entries are coefficient lists over G."""
    out = {"group": p.group.name, "lo": p.lo, "hi": p.hi, "ranks": list(p.ranks),
           "boundaries": [[[element_to_json(x) for x in row] for row in m] for m in p.boundaries]}
    if p.lambdas:
        out["lambdas"] = {str(i): [[element_to_json(x) for x in row] for row in m] for i, m in p.lambdas.items()}
    return out


def complex_from_json(data: dict, group=None):
    from .complexes import PerfectGComplex
    from .groups import GroupError, catalog_group

    try:
        group = group or catalog_group(data["group"])
        lo, ranks = int(data["lo"]), [int(r) for r in data["ranks"]]
    except (KeyError, TypeError, ValueError, GroupError) as exc:
        raise ParseError(f"bad complex header: {exc}") from exc
    if "hi" in data and int(data["hi"]) != lo + len(ranks) - 1:
        raise ParseError("hi does not match lo and ranks")
    raw = data.get("boundaries", [])
    if len(raw) != max(len(ranks) - 1, 0):
        raise ParseError("need one boundary between consecutive terms")
    bds = []
    for k, m in enumerate(raw):
        r0, r1 = ranks[k], ranks[k + 1]
        if r0 == 0 or r1 == 0:
            bds.append([[element_from_json(group, [0] * group.order) for _ in range(r1)] for _ in range(r0)])
            continue
        if len(m) != r0 or any(len(row) != r1 for row in m):
            raise ParseError(f"boundary at degree {lo + k} has wrong shape", lo + k)
        bds.append([[element_from_json(group, x) for x in row] for row in m])
    lambdas = {}
    for key, m in (data.get("lambdas") or {}).items():
        lambdas[int(key)] = [[element_from_json(group, x) for x in row] for row in m]
    try:
        return PerfectGComplex(group, lo, ranks, bds, lambdas)
    except ComplexError as exc:
        raise ParseError(str(exc), exc.degree) from exc


def pairing_to_json(sigma) -> dict:
    return {"sigma_ev": matrix_to_json(sigma.sigma_ev), "sigma_odd": matrix_to_json(sigma.sigma_odd)}


def pairing_from_json(data: dict):
    from .classgroup import CohomologyPairingData

    return CohomologyPairingData(matrix_from_json(data.get("sigma_ev", [])),
                                 matrix_from_json(data.get("sigma_odd", [])))


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)
