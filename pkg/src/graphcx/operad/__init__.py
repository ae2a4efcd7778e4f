"""Truncated cyclic operads, the cobar construction and the quotient operad Q."""

from graphcx.operad.core import (
    OperadError,
    OperadSpec,
    check_axioms,
    load_operad,
    operad_from_document,
    perm_sign,
)

__all__ = ["OperadError", "OperadSpec", "check_axioms", "load_operad",
           "operad_from_document", "perm_sign"]
