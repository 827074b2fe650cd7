"""Source positions for tokens, AST nodes, and diagnostics."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, order=True)
class SourceSpan:
    """Half-open region of source text.

    Lines and columns are 1-based; ``end_col`` points one past the last
    character of the region, so a single-character token at the start of a
    file spans (1, 1)-(1, 2).
    """

    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self) -> None:
        if (self.end_line, self.end_col) < (self.start_line, self.start_col):
            raise ValueError(f"span end precedes start: {self}")

    def __str__(self) -> str:
        return f"{self.start_line}:{self.start_col}-{self.end_line}:{self.end_col}"

    @staticmethod
    def point(line: int, col: int) -> "SourceSpan":
        return SourceSpan(line, col, line, col)

    def merge(self, other: "SourceSpan") -> "SourceSpan":
        """Smallest span covering both spans."""
        start = min((self.start_line, self.start_col), (other.start_line, other.start_col))
        end = max((self.end_line, self.end_col), (other.end_line, other.end_col))
        return SourceSpan(start[0], start[1], end[0], end[1])
