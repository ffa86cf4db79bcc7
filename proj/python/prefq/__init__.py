"""Preference queries over in-memory relations.

The winnow operator keeps the tuples of a relation that no other tuple is
preferred to, where the preference is a quantifier-free formula over two
tuple variables::

    import prefq

    schema = prefq.Schema("ISBN:str, Vendor:str, Price:num")
    books = prefq.Relation(schema, [
        ("0679726691", "BooksForLess", "14.75"),
        ("0679726691", "LowestPrices", "13.50"),
        ("0062059041", "BooksForLess", "7.30"),
    ])
    cheapest = prefq.pref("t1.ISBN = t2.ISBN and t1.Price < t2.Price", schema)
    prefq.winnow(cheapest, books).rows()

Numbers are exact rationals end to end: they come back as int or
fractions.Fraction, never as floats.
"""

from ._prefq import (
    BudgetError,
    EngineError,
    Formula,
    GateError,
    ParseError,
    Plan,
    Relation,
    Schema,
    SchemaError,
    Script,
    boolean_compose,
    check_properties,
    dominates,
    expand_winnow,
    load_csv,
    load_script,
    optimize,
    pareto,
    parse_script,
    pref,
    prioritized,
    rank,
    restrict_to,
    run_script,
    scoring,
    selection,
    skyline,
    strict_core,
    to_csv,
    transitive_closure,
    weak_winnow,
    winnow,
    winnow_iter,
)

__all__ = [
    "BudgetError",
    "EngineError",
    "Formula",
    "GateError",
    "ParseError",
    "Plan",
    "Relation",
    "Schema",
    "SchemaError",
    "Script",
    "boolean_compose",
    "check_properties",
    "dominates",
    "expand_winnow",
    "load_csv",
    "load_script",
    "optimize",
    "pareto",
    "parse_script",
    "pref",
    "prioritized",
    "rank",
    "restrict_to",
    "run_script",
    "scoring",
    "selection",
    "skyline",
    "strict_core",
    "to_csv",
    "transitive_closure",
    "weak_winnow",
    "winnow",
    "winnow_iter",
]
