"""Built-in operad documents: Ass, Comm (generated) and Lie (shipped data file)."""

from __future__ import annotations

import json
from pathlib import Path

DEFAULT_MAX_ARITY = 6
DATA_DIR = Path(__file__).parent / "data"


def _one_dim(name, flavor, max_arity):
    comps = [{"k": k, "l": l, "i": i, "matrix": [["1"]]}
             for k in range(2, max_arity + 1)
             for l in range(2, max_arity + 2 - k)
             for i in range(1, k + 1)]
    actions = {}
    for n in range(2, max_arity + 1):
        gens = {"rotation": [["1"]]}
        if flavor == "symmetric":
            gens.update({f"s{j}": [["1"]] for j in range(1, n)})
        actions[str(n)] = gens
    return {
        "name": name,
        "flavor": flavor,
        "cyclic": True,
        "max_arity": max_arity,
        "components": {str(n): {"dim": 1, "basis_labels": [f"mu{n}"]}
                       for n in range(2, max_arity + 1)},
        "compositions": comps,
        "actions": actions,
    }


def ass_document(max_arity=DEFAULT_MAX_ARITY):
    """Nonsymmetric cyclic Ass: Ass(n) = k, every structure constant 1, trivial rotation."""
    return _one_dim("ass", "nonsymmetric", max_arity)


def comm_document(max_arity=DEFAULT_MAX_ARITY):
    """Symmetric cyclic Comm: Comm(n) = k with trivial actions."""
    return _one_dim("comm", "symmetric", max_arity)


def lie_document(max_arity=4):
    doc = json.loads((DATA_DIR / "lie.json").read_text())
    doc["max_arity"] = min(max_arity, doc["max_arity"])
    return doc


BUILTIN = {"ass": ass_document, "comm": comm_document, "lie": lie_document}
