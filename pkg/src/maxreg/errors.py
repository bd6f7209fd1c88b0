"""Exception hierarchy shared by all modules."""


class MaxRegError(Exception):
    """Base class for every error raised by :mod:`maxreg`."""


class DimensionMismatch(MaxRegError, ValueError):
    pass


class GridMismatch(MaxRegError, ValueError):
    pass


class InvalidArgument(MaxRegError, ValueError):
    pass


class NotSupported(MaxRegError, TypeError):
    pass


class ZeroInput(MaxRegError, ValueError):
    pass


class BandOverflow(MaxRegError, ValueError):
    pass


class InvalidQ(MaxRegError, ValueError):
    pass


class SymbolSingular(MaxRegError, ArithmeticError):
    """A symbol could not be evaluated (non-finite value) at some frequency."""


class SingularAtNode(SymbolSingular):
    """Node-wise inversion failed or was too ill-conditioned."""

    def __init__(self, tau, cond, message=None):
        self.tau = float(tau)
        self.cond = float(cond)
        if message is None:
            message = f"symbol singular at tau={self.tau:.6g} (cond={self.cond:.3g})"
        super().__init__(message)


class NonInvertiblePencil(SingularAtNode):
    """The pencil symbol is not invertible at one or more grid nodes."""

    def __init__(self, nodes, conds, message=None):
        self.nodes = [float(x) for x in nodes]
        self.conds = [float(c) for c in conds]
        if message is None:
            shown = ", ".join(f"{x:.6g}" for x in self.nodes[:10])
            more = "" if len(self.nodes) <= 10 else f" (+{len(self.nodes) - 10} more)"
            message = f"pencil not invertible at nodes: {shown}{more}"
        super().__init__(self.nodes[0] if self.nodes else float("nan"),
                         self.conds[0] if self.conds else float("inf"), message)


class DivergentWeightedDerivative(MaxRegError, ArithmeticError):
    """A weighted derivative grows without bound: the Mihlin condition fails."""

    def __init__(self, order, end, message=None):
        self.order = order
        self.end = end
        super().__init__(message or f"weighted derivative of order {order} diverges at the {end} end")


class IndexOutOfRange(MaxRegError, IndexError):
    pass
