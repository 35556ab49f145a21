"""JSON dataset and measure files.

Dataset::

    {"X": [...], "Y": [...], "complete": true,
     "tables": [{"A": [...], "B": [...], "p": [{"x": .., "y": .., "pr": "1/5"}]}]}

Measure::

    {"type": "order_pairs" | "orders" | "choice_pairs", "X": [...], "Y": [...],
     "entries": [{"first": [...], "second": [...], "w": "1/2"}]}

``pr``/``w`` accept decimal literals ("0.2") or "num/den"; output always uses
the lowest-terms form produced by ``str(Fraction)``.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .core import (
    AlternativeSet,
    ChoiceError,
    ChoiceFunctionPair,
    JointChoiceRule,
    LinearOrder,
    RandomChoiceRule,
    SignedChoicePairMeasure,
    SignedOrderMeasure,
    SignedPairMeasure,
    ZERO,
    as_fraction,
    bits,
)


class DatasetError(ChoiceError):
    """Malformed dataset or measure file."""


def _load(text: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise DatasetError("top level must be a JSON object")
    return data


def _labels(data: dict, key: str) -> AlternativeSet:
    labels = data.get(key)
    if not isinstance(labels, list):
        raise DatasetError(f"missing label list {key!r}")
    try:
        return AlternativeSet(tuple(labels))
    except ChoiceError as exc:
        raise DatasetError(str(exc)) from exc


def _mask(ground: AlternativeSet, labels, what: str) -> int:
    if not isinstance(labels, list) or not labels:
        raise DatasetError(f"{what} must be a non-empty label list")
    if len(set(labels)) != len(labels):
        raise DatasetError(f"{what} repeats a label")
    try:
        return ground.mask(labels)
    except ChoiceError as exc:
        raise DatasetError(str(exc)) from exc


def parse_dataset(text: str) -> JointChoiceRule:
    data = _load(text)
    xs, ys = _labels(data, "X"), _labels(data, "Y")
    complete = data.get("complete", False)
    if not isinstance(complete, bool):
        raise DatasetError('"complete" must be a boolean')
    raw_tables = data.get("tables")
    if not isinstance(raw_tables, list):
        raise DatasetError('missing "tables" list')
    tables: dict = {}
    for entry in raw_tables:
        if not isinstance(entry, dict):
            raise DatasetError("each table must be an object")
        a = _mask(xs, entry.get("A"), "A")
        b = _mask(ys, entry.get("B"), "B")
        if (a, b) in tables:
            raise DatasetError(f"duplicate table for ({xs.names(a)}, {ys.names(b)})")
        cells: dict = {}
        for c in entry.get("p", []):
            try:
                x, y = xs.index(c["x"]), ys.index(c["y"])
                pr = as_fraction(c["pr"])
            except (KeyError, TypeError) as exc:
                raise DatasetError(f"bad cell {c!r}") from exc
            except ChoiceError as exc:
                raise DatasetError(str(exc)) from exc
            if not (a >> x & 1 and b >> y & 1):
                raise DatasetError(
                    f"cell ({c['x']}, {c['y']}) outside {xs.names(a)} x {ys.names(b)}")
            if (x, y) in cells:
                raise DatasetError(f"duplicate cell ({c['x']}, {c['y']})")
            cells[(x, y)] = pr
        if sum(cells.values(), ZERO) != 1:
            raise DatasetError(
                f"table ({xs.names(a)}, {ys.names(b)}) does not sum to 1")
        tables[(a, b)] = cells
    try:
        return JointChoiceRule(xs, ys, tables, complete=complete)
    except ChoiceError as exc:
        raise DatasetError(str(exc)) from exc


def _fmt(v: Fraction) -> str:
    return str(v)


def rule_to_dict(rule: JointChoiceRule) -> dict:
    xs, ys = rule.x_set, rule.y_set
    tables = []
    for (a, b), cells in sorted(rule.tables.items()):
        tables.append({
            "A": xs.names(a),
            "B": ys.names(b),
            "p": [{"x": xs.labels[x], "y": ys.labels[y], "pr": _fmt(v)}
                  for (x, y), v in sorted(cells.items())],
        })
    return {"X": list(xs.labels), "Y": list(ys.labels), "complete": rule.complete,
            "tables": tables}


def measure_to_dict(measure) -> dict:
    if isinstance(measure, SignedPairMeasure):
        xs, ys = measure.x_set, measure.y_set
        entries = [{"first": [xs.labels[i] for i in r1],
                    "second": [ys.labels[i] for i in r2],
                    "w": _fmt(w)} for (r1, r2), w in measure.weights.items()]
        return {"type": "order_pairs", "X": list(xs.labels), "Y": list(ys.labels),
                "entries": entries}
    if isinstance(measure, SignedOrderMeasure):
        g = measure.ground
        entries = [{"first": [g.labels[i] for i in r], "w": _fmt(w)}
                   for r, w in measure.weights.items()]
        return {"type": "orders", "X": list(g.labels), "entries": entries}
    if isinstance(measure, SignedChoicePairMeasure):
        xs, ys = measure.x_set, measure.y_set

        def side(ground, part):
            return [{"A": ground.names(m), "c": ground.labels[c]} for m, c in part]

        entries = [{"first": side(xs, c.first), "second": side(ys, c.second), "w": _fmt(w)}
                   for c, w in measure.weights.items()]
        return {"type": "choice_pairs", "X": list(xs.labels), "Y": list(ys.labels),
                "entries": entries}
    raise TypeError(f"cannot serialize {type(measure).__name__}")


def serialize(obj) -> str:
    """Canonical JSON text for a rule or a measure."""
    if isinstance(obj, JointChoiceRule):
        data = rule_to_dict(obj)
    elif isinstance(obj, RandomChoiceRule):
        g = obj.ground
        data = {"X": list(g.labels), "menus": [
            {"A": g.names(a), "p": [{"x": g.labels[x], "pr": _fmt(obj[(x, a)])}
                                    for x in bits(a) if obj[(x, a)] != 0]}
            for a in g.subsets()]}
    else:
        data = measure_to_dict(obj)
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def parse_choice_rule(text: str) -> RandomChoiceRule:
    """Single-agent rule in the ``{"X": [...], "menus": [...]}`` layout."""
    data = _load(text)
    g = _labels(data, "X")
    probs = {}
    for menu in data.get("menus", []):
        a = _mask(g, menu.get("A"), "A")
        for c in menu.get("p", []):
            try:
                probs[(g.index(c["x"]), a)] = as_fraction(c["pr"])
            except (KeyError, TypeError, ChoiceError) as exc:
                raise DatasetError(f"bad cell {c!r}") from exc
    try:
        return RandomChoiceRule(g, probs)
    except ChoiceError as exc:
        raise DatasetError(str(exc)) from exc


def parse_measure(text: str, x_set: AlternativeSet | None = None,
                  y_set: AlternativeSet | None = None):
    """Parse a measure file; grounds default to the file's "X"/"Y" keys."""
    data = _load(text)
    kind = data.get("type")
    if x_set is None:
        x_set = _labels(data, "X")
    if y_set is None and kind != "orders":
        y_set = _labels(data, "Y")
    entries = data.get("entries")
    if not isinstance(entries, list):
        raise DatasetError('missing "entries" list')
    try:
        if kind == "order_pairs":
            weights: dict = {}
            for e in entries:
                key = (LinearOrder.from_labels(x_set, e["first"]).ranking,
                       LinearOrder.from_labels(y_set, e["second"]).ranking)
                weights[key] = weights.get(key, ZERO) + as_fraction(e["w"])
            return SignedPairMeasure(x_set, y_set, weights)
        if kind == "orders":
            weights = {}
            for e in entries:
                key = LinearOrder.from_labels(x_set, e["first"]).ranking
                weights[key] = weights.get(key, ZERO) + as_fraction(e["w"])
            return SignedOrderMeasure(x_set, weights)
        if kind == "choice_pairs":
            weights = {}
            for e in entries:
                first = tuple((x_set.mask(s["A"]), x_set.index(s["c"])) for s in e["first"])
                second = tuple((y_set.mask(s["A"]), y_set.index(s["c"])) for s in e["second"])
                key = ChoiceFunctionPair(first, second)
                weights[key] = weights.get(key, ZERO) + as_fraction(e["w"])
            return SignedChoicePairMeasure(x_set, y_set, weights)
    except (KeyError, TypeError) as exc:
        raise DatasetError(f"malformed measure entry: {exc}") from exc
    except ChoiceError as exc:
        raise DatasetError(str(exc)) from exc
    raise DatasetError(f"unknown measure type {kind!r}")
