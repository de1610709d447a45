"""Search code changes with query patterns.

    >>> import dsx
    >>> corpus = dsx.Corpus.synthetic(1000, seed=1)
    >>> index = dsx.Index.build(corpus)
    >>> dsx.search(corpus, index, "ID = LT;", "ID = LT;")["results"][:1]
"""

from ._dsx import (
    Change,
    Corpus,
    DsxError,
    Index,
    IndexMismatch,
    LexError,
    ParseError,
    QueryParseError,
    featurize_change,
    featurize_query,
    generate_queries,
    matches,
    measure_recall,
    parse,
    prune_by_leaves,
    search,
)

__all__ = [
    "Change",
    "Corpus",
    "DsxError",
    "Index",
    "IndexMismatch",
    "LexError",
    "ParseError",
    "QueryParseError",
    "featurize_change",
    "featurize_query",
    "generate_queries",
    "matches",
    "measure_recall",
    "parse",
    "prune_by_leaves",
    "search",
]
