"""stforge: vendor-aware Structured Text coding assistant.

A dialect compiler oracle (lexer, parser, static checks), a segmented
retrieval knowledge base, constraint-encoding prompt construction,
competitive multi-model generation with a bounded compile-repair loop,
compile-filtered synthetic data curation, and a benchmark harness, all
behind one HTTP service and CLI.
"""

__version__ = "0.1.0"
