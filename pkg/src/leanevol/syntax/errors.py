from __future__ import annotations


class ParseError(ValueError):
    """Unsupported or malformed statement syntax.

    ``offset`` is a UTF-8 byte offset; ``line`` and ``column`` are 1-based
    (column counted in characters).
    """

    def __init__(self, offset: int, line: int, column: int, expected: str, found: str):
        self.offset = offset
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        super().__init__(f"{line}:{column}: expected {expected}, found {found!r}")

    @classmethod
    def at(cls, src: str, pos: int, expected: str, found: str) -> "ParseError":
        pos = max(0, min(pos, len(src)))
        line = src.count("\n", 0, pos) + 1
        col = pos - (src.rfind("\n", 0, pos) + 1) + 1
        return cls(len(src[:pos].encode("utf-8")), line, col, expected, found)
