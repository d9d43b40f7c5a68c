"""Error types shared across the solvers."""


class NumericalError(RuntimeError):
    """A solver failed to reach its tolerance; carries diagnostics when available."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
