"""
Exception hierarchy shared by the kernel modules.

Negative answers (Inequal, NotFound, NotWithinBound, CounterModel) are
result values, not exceptions; everything here signals a malformed input
or a partial function outside its domain.
"""


class KernelError(Exception):
    """Base class for every kernel failure."""


class Undefined(KernelError):
    """A partial structural function or interpretation has no value."""


class AnnotationMismatch(KernelError):
    pass


class IndexOutOfRange(KernelError):
    pass


class ParseError(KernelError):
    """
    Malformed surface text. Carries the 1-based line/column of the
    offending token and the set of tokens that would have been accepted.
    """

    def __init__(self, message: str, line: int = 0, column: int = 0, expected: frozenset = frozenset()):
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        detail = f"{message} at line {line}, column {column}"
        if self.expected:
            detail += f" (expected one of: {', '.join(sorted(self.expected))})"
        super().__init__(detail)


class RuleError(KernelError):
    """
    A derivation node does not instantiate its rule. `path` lists the
    premise indices from the root to the failing node.
    """

    def __init__(self, reason: str, rule: str = '', path: tuple = ()):
        self.reason = reason
        self.rule = rule
        self.path = tuple(path)
        location = '/'.join(str(i) for i in self.path) or 'root'
        super().__init__(f"{rule or 'derivation'} at {location}: {reason}")

    def at(self, index: int) -> 'RuleError':
        """Re-raise helper: prefix the path with a premise index."""
        return RuleError(self.reason, self.rule, (index,) + self.path)


class NotPure(KernelError):
    pass


class IllFormed(KernelError):
    pass


class NotConvertible(KernelError):
    """Two entities have different normal forms."""


class ChainMismatch(KernelError):
    pass


class PathInvalid(KernelError):
    pass


class ShapeMismatch(KernelError):
    pass


class NoRedex(KernelError):
    pass


class NotAnEncoding(KernelError):
    pass


class BadTrace(KernelError):
    pass
