"""Exact verification of the dual certificates showing that a subdivided
tetrahedron always has a (u, v)-path at least k longer than d_M(u, v).

For each position case the primal system is, in ``<=`` normal form,

* ``k - l_ij <= 0`` for every branch pair (family ``tetrasubdiv``),
* the split of the carrier paths at u and v, each equation as two rows
  (family ``uv_breakup``),
* ``d - len(P) <= 0`` for every (u, v)-path P (family ``shortest_path``),
* ``len(P) - d - k <= -1`` for every (u, v)-path P (family ``no_long_path``).

A certificate y >= 0 with ``A^T y = 0`` and ``b^T y < 0`` proves the system
infeasible.  Rows are referenced symbolically and the matrix is rebuilt here
from the segment structure of each case.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Iterable

from .graph import bfs_distances
from .tetra import ROUTE_LABELS, PositionCase, TetraModel, classify_positions

FAMILIES = ("tetrasubdiv", "uv_breakup", "shortest_path", "no_long_path")
CASES = ("a", "b", "c")

_BRANCH_EDGES = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]

# per case: (carrier pair, [(segment endpoint, segment endpoint, variable)])
_SPLITS: dict[str, list[tuple[tuple[int, int], list[tuple[str, str, str]]]]] = {
    "a": [((1, 2), [("b1", "u", "l1u"), ("u", "v", "luv"), ("v", "b2", "l2v")])],
    "b": [((1, 2), [("b1", "u", "l1u"), ("u", "b2", "l2u")]), ((1, 3), [("b1", "v", "l1v"), ("v", "b3", "l3v")])],
    "c": [((1, 2), [("b1", "u", "l1u"), ("u", "b2", "l2u")]), ((3, 4), [("b3", "v", "l3v"), ("v", "b4", "l4v")])],
}

EXPECTED_VARIABLES = {"a": 11, "b": 12, "c": 12}


class CertificateError(ValueError):
    """The certificate does not fit the case's system (structural mismatch)."""


Row = tuple[dict[str, Fraction], Fraction]


def _lvar(i: int, j: int) -> str:
    return f"l{min(i, j)}{max(i, j)}"


def segment_graph(case: str) -> list[tuple[str, str, str]]:
    """Edges (x, y, variable) of the abstract model with u and v as nodes."""
    if case not in _SPLITS:
        raise CertificateError(f"unknown case {case!r}")
    split = {pair for pair, _ in _SPLITS[case]}
    edges = [(f"b{i}", f"b{j}", _lvar(i, j)) for i, j in _BRANCH_EDGES if (i, j) not in split]
    for _, segs in _SPLITS[case]:
        edges.extend(segs)
    return edges


def case_variables(case: str) -> list[str]:
    names = ["d", "k"] + [_lvar(i, j) for i, j in _BRANCH_EDGES]
    for _, segs in _SPLITS[case]:
        names.extend(var for _, _, var in segs)
    return names


def uv_paths(case: str) -> dict[str, list[str]]:
    """Every simple u-v route of the abstract model: label -> segment variables."""
    edges = segment_graph(case)
    inc: dict[str, list[tuple[str, str]]] = {}
    for x, y, var in edges:
        inc.setdefault(x, []).append((y, var))
        inc.setdefault(y, []).append((x, var))
    out: dict[str, list[str]] = {}
    stack = [("u", ["u"], [])]
    while stack:
        x, nodes, vars_ = stack.pop()
        if x == "v":
            out[" ".join(nodes)] = vars_
            continue
        for y, var in inc[x]:
            if y not in nodes:
                stack.append((y, nodes + [y], vars_ + [var]))
    return dict(sorted(out.items()))


@dataclass(frozen=True)
class CaseSystem:
    case: str
    variables: tuple[str, ...]
    rows: dict[tuple, Row]


def case_system(case: str) -> CaseSystem:
    """All rows of the case's primal system, keyed by (family, indices)."""
    variables = case_variables(case)
    if len(variables) != EXPECTED_VARIABLES[case]:
        raise CertificateError(
            f"case {case} has {len(variables)} variables, expected {EXPECTED_VARIABLES[case]}"
        )
    one = Fraction(1)
    rows: dict[tuple, Row] = {}
    for i, j in _BRANCH_EDGES:
        rows[("tetrasubdiv", (i, j))] = ({"k": one, _lvar(i, j): -one}, Fraction(0))
    for r, ((i, j), segs) in enumerate(_SPLITS[case]):
        total = {var: one for _, _, var in segs}
        total[_lvar(i, j)] = -one
        rows[("uv_breakup", (r, "le"))] = (dict(total), Fraction(0))
        rows[("uv_breakup", (r, "ge"))] = ({v: -c for v, c in total.items()}, Fraction(0))
    for label, vars_ in uv_paths(case).items():
        key = tuple(label.split())
        rows[("shortest_path", key)] = ({"d": one, **{v: -one for v in vars_}}, Fraction(0))
        rows[("no_long_path", key)] = ({"d": -one, "k": -one, **{v: one for v in vars_}}, Fraction(-1))
    return CaseSystem(case, tuple(variables), rows)


# ---------------------------------------------------------------------------
# Certificates


@dataclass(frozen=True)
class DualCertificate:
    case: str
    rows: tuple[tuple[str, tuple, Fraction], ...]

    @classmethod
    def from_json(cls, doc: dict) -> "DualCertificate":
        try:
            case = doc["case"]
            rows = []
            for r in doc["rows"]:
                fam = r["family"]
                idx = tuple(tuple(x) if isinstance(x, list) else x for x in r["indices"])
                rows.append((fam, idx, Fraction(int(r["coeff_num"]), int(r["coeff_den"]))))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise CertificateError(f"malformed certificate document: {exc}") from None
        return cls(case, tuple(rows))

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "rows": [
                {"family": f, "indices": list(i), "coeff_num": c.numerator, "coeff_den": c.denominator}
                for f, i, c in self.rows
            ],
        }

    def with_coefficient(self, index: int, value: Fraction) -> "DualCertificate":
        rows = list(self.rows)
        f, i, _ = rows[index]
        rows[index] = (f, i, Fraction(value))
        return DualCertificate(self.case, tuple(rows))


def _row_key(family: str, indices: tuple) -> tuple:
    if family == "uv_breakup":
        return (family, (int(indices[0]), str(indices[1])))
    if family == "tetrasubdiv":
        return (family, tuple(sorted(int(x) for x in indices)))
    return (family, tuple(str(x) for x in indices))


def load_certificate(case: str) -> DualCertificate:
    if case not in CASES:
        raise CertificateError(f"unknown case {case!r}")
    text = resources.files("detour").joinpath("data", f"cert_{case}.json").read_text()
    return DualCertificate.from_json(json.loads(text))


@dataclass
class CertificateReport:
    case: str
    valid: bool
    objective: Fraction
    residual: dict[str, Fraction]
    nonnegative: bool
    uses_no_long_path: bool
    messages: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "valid": self.valid,
            "objective": str(self.objective),
            "residual": {v: str(c) for v, c in self.residual.items() if c != 0},
            "nonnegative": self.nonnegative,
            "uses_no_long_path": self.uses_no_long_path,
            "messages": self.messages,
        }


def verify_certificate(cert: DualCertificate) -> CertificateReport:
    """Check ``y >= 0``, ``A^T y = 0`` and ``b^T y < 0`` exactly."""
    if cert.case not in CASES:
        raise CertificateError(f"unknown case {cert.case!r}")
    system = case_system(cert.case)
    residual = {v: Fraction(0) for v in system.variables}
    objective = Fraction(0)
    msgs = []
    nonneg = True
    uses_nlp = False
    for family, indices, coeff in cert.rows:
        if family not in FAMILIES:
            raise CertificateError(f"unknown row family {family!r}")
        key = _row_key(family, indices)
        if key not in system.rows:
            raise CertificateError(f"row {family} {list(indices)} is not part of case {cert.case}")
        if coeff < 0:
            nonneg = False
            msgs.append(f"negative coefficient {coeff} on {family} {list(indices)}")
        if family == "no_long_path" and coeff > 0:
            uses_nlp = True
        coeffs, bound = system.rows[key]
        for var, a in coeffs.items():
            residual[var] += coeff * a
        objective += coeff * bound
    for var, c in residual.items():
        if c != 0:
            msgs.append(f"column {var} sums to {c}, not 0")
    if objective >= 0:
        msgs.append(f"objective {objective} is not negative")
    valid = nonneg and objective < 0 and all(c == 0 for c in residual.values())
    return CertificateReport(cert.case, valid, objective, residual, nonneg, uses_nlp, msgs)


# ---------------------------------------------------------------------------
# Independent infeasibility check


def fourier_motzkin_feasible(rows: Iterable[Row], variables: Iterable[str]) -> bool:
    """Decide whether ``sum a_v x_v <= b`` (over the rationals) has a solution."""
    cur = []
    for coeffs, bound in rows:
        cur.append(({v: Fraction(c) for v, c in coeffs.items() if c != 0}, Fraction(bound)))
    remaining = set(variables)
    while remaining:
        cur = _dedupe(cur)
        for coeffs, bound in cur:
            if not coeffs and bound < 0:
                return False

        def cost(v: str) -> int:
            pos = sum(1 for c, _ in cur if c.get(v, 0) > 0)
            neg = sum(1 for c, _ in cur if c.get(v, 0) < 0)
            return pos * neg - pos - neg

        x = min(sorted(remaining), key=cost)
        remaining.discard(x)
        pos, neg, keep = [], [], []
        for coeffs, bound in cur:
            a = coeffs.get(x, 0)
            (pos if a > 0 else neg if a < 0 else keep).append((coeffs, bound))
        for (cp, bp), (cn, bn) in itertools.product(pos, neg):
            ap, an = cp[x], -cn[x]
            new = {}
            for v in set(cp) | set(cn):
                if v == x:
                    continue
                val = cp.get(v, 0) * an + cn.get(v, 0) * ap
                if val != 0:
                    new[v] = val
            keep.append((new, bp * an + bn * ap))
        cur = keep
    return all(bound >= 0 for coeffs, bound in cur if not coeffs)


def _dedupe(rows: list[Row]) -> list[Row]:
    best: dict[tuple, Fraction] = {}
    for coeffs, bound in rows:
        if not coeffs:
            key: tuple = ()
        else:
            scale = abs(next(iter(sorted(coeffs.items())))[1])
            coeffs = {v: c / scale for v, c in coeffs.items()}
            bound = bound / scale
            key = tuple(sorted(coeffs.items()))
        if key not in best or bound < best[key]:
            best[key] = bound
    return [(dict(k), b) for k, b in best.items()]


def primal_feasible(case: str) -> bool:
    system = case_system(case)
    return fourier_motzkin_feasible(system.rows.values(), system.variables)


# ---------------------------------------------------------------------------
# Reading an assignment off a concrete model


def assignment_from_model(model: TetraModel, u: int, v: int, pos: PositionCase | None = None) -> dict[str, int]:
    """Values of d, k and all segment lengths for interior u, v."""
    if model.k is None:
        raise CertificateError("the model needs a declared k")
    pos = pos or classify_positions(model, u, v)
    where = {b: i for i, b in enumerate(model.branches)}
    lab = [where[b] for b in pos.labels]  # label index -> model branch index
    vals: dict[str, int] = {"k": model.k}
    g, verts, index = model.as_graph()
    vals["d"] = bfs_distances(g, index[u])[index[v]]
    for i, j in _BRANCH_EDGES:
        vals[_lvar(i, j)] = len(model.path(lab[i - 1], lab[j - 1])) - 1
    named = {"u": u, "v": v}
    for (i, j), segs in _SPLITS[pos.tag]:
        p = model.path(lab[i - 1], lab[j - 1])
        for x, y, var in segs:
            a = p.index(pos.labels[int(x[1]) - 1]) if x.startswith("b") else p.index(named[x])
            b = p.index(pos.labels[int(y[1]) - 1]) if y.startswith("b") else p.index(named[y])
            vals[var] = abs(b - a)
    return vals


def evaluate_rows(case: str, values: dict[str, int]) -> dict[tuple, bool]:
    """Which rows of the case system the assignment satisfies."""
    out = {}
    for key, (coeffs, bound) in case_system(case).rows.items():
        out[key] = sum(c * values[v] for v, c in coeffs.items()) <= bound
    return out


def route_labels_match(case: str) -> bool:
    return set(uv_paths(case)) == set(ROUTE_LABELS[case])
