"""Exception hierarchy shared by every module."""


class SpecRegError(Exception):
    """Base class for all library errors."""


# graph_core ---------------------------------------------------------------

class GraphError(SpecRegError, ValueError):
    """Invalid graph input. ``index`` is the offending position in the edge list, if any."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class SelfLoop(GraphError):
    def __init__(self, u, index=None):
        super().__init__(f"self-loop at vertex {u}", index)
        self.u = u


class DuplicateEdge(GraphError):
    def __init__(self, u, v, index=None):
        super().__init__(f"duplicate edge ({u}, {v})", index)
        self.u, self.v = u, v


class VertexOutOfRange(GraphError):
    pass


class OverlappingParts(GraphError):
    pass


class PartialOverlap(GraphError):
    pass


class EmptyGraph(GraphError):
    pass


class ParameterOutOfRange(SpecRegError, ValueError):
    pass


# spectral -----------------------------------------------------------------

class NoEdges(SpecRegError):
    """The graph has no edges, so its spectral radius is the degenerate value 0."""


class NotConverged(SpecRegError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class DimensionMismatch(SpecRegError, ValueError):
    pass


class NotUnit(SpecRegError, ValueError):
    pass


class TooLarge(SpecRegError, ValueError):
    pass


# decompose ----------------------------------------------------------------

class PartCountOverflow(SpecRegError, OverflowError):
    pass


class TooFewVertices(SpecRegError):
    pass


class WrongType(SpecRegError):
    pass


class Case3WitnessMissing(SpecRegError):
    def __init__(self, message, ratios=None):
        super().__init__(message)
        self.ratios = ratios


class HypothesisNotMet(SpecRegError):
    def __init__(self, message, lam=None, threshold=None):
        super().__init__(message)
        self.lam = lam
        self.threshold = threshold


class CertificateViolation(SpecRegError):
    def __init__(self, message, certificate=None, trace=None):
        super().__init__(message)
        self.certificate = certificate
        self.trace = trace


# regularize ---------------------------------------------------------------

class Collapsed(SpecRegError):
    def __init__(self, message, last_nonempty=None):
        super().__init__(message)
        self.last_nonempty = last_nonempty


# cli_report ---------------------------------------------------------------

class ParseError(SpecRegError, ValueError):
    def __init__(self, line, reason, column=None):
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {reason}")
        self.line = line
        self.column = column
        self.reason = reason
