"""Exception hierarchy shared by every module."""


class SimphomError(Exception):
    """Base class for all typed errors raised by simphom."""


class MalformedInputError(SimphomError, ValueError):
    """A simplex or record is structurally invalid (e.g. repeated vertices)."""


class MissingLabelError(SimphomError, KeyError):
    """One or more nodes carry no class label."""

    def __init__(self, nodes):
        self.nodes = sorted(nodes, key=str)
        shown = ", ".join(map(str, self.nodes[:20]))
        more = "" if len(self.nodes) <= 20 else f" (+{len(self.nodes) - 20} more)"
        super().__init__(f"unlabeled node(s): {shown}{more}")

    def __str__(self):
        return self.args[0]


class DomainError(SimphomError, ValueError):
    """An argument lies outside the domain of the operation."""


class UndefinedScoreError(SimphomError, ZeroDivisionError):
    """A ratio has an empty denominator (no groups, no candidates, zero baseline)."""


class ParseError(SimphomError, ValueError):
    """A dataset file could not be parsed."""


class InputError(SimphomError, ValueError):
    """Input violates a precondition (unsorted stream, single-class labels, ...)."""
