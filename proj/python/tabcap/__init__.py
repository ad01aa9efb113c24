"""Table caption generation pipeline (Python bindings to the C++ core)."""

import json

from ._tabcap import (
    TabcapError,
    assemble,
    author_match,
    bleu,
    build_record as _build_record,
    check_filter,
    evaluate as _evaluate,
    is_numeral,
    linearize,
    meteor,
    porter_stem,
    rouge_l,
    rouge_n,
    run_grid as _run_grid,
    segment_sentences,
    strip_numerals,
    tokenize,
    top_n,
)

__all__ = [
    "TabcapError",
    "assemble",
    "author_match",
    "bleu",
    "build_record",
    "check_filter",
    "evaluate",
    "is_numeral",
    "linearize",
    "meteor",
    "porter_stem",
    "rouge_l",
    "rouge_n",
    "run_grid",
    "segment_sentences",
    "strip_numerals",
    "tokenize",
    "top_n",
]


def build_record(page_id, lines):
    """Parse annotation lines into a corpus record dict, or raise TabcapError."""
    return json.loads(_build_record(page_id, list(lines)))


def evaluate(pairs, rouge_mode="recall"):
    """Score (candidate, reference) pairs; returns the report as a dict."""
    return json.loads(_evaluate(list(pairs), rouge_mode))


def run_grid(records, conditions=(), styles=(), backend="stub", endpoint=""):
    """Run the condition x style grid over record dicts.

    Returns (matrix dict, csv text).
    """
    corpus = "".join(json.dumps(r) + "\n" for r in records)
    matrix, csv = _run_grid(corpus, list(conditions), list(styles), backend, endpoint)
    return json.loads(matrix), csv
