"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Raised when a run configuration is malformed or out of range."""


class DegenerateGeometryError(ValueError):
    """Raised when node placement leaves an operation undefined (coincident
    points, parallel triangulation rays)."""


class SingularFimError(RuntimeError):
    """Raised when an information matrix cannot be inverted reliably.

    Carries a short description of the offending block so the caller can
    tell a zero angle block from a merely ill-conditioned matrix.
    """

    def __init__(self, detail: str):
        super().__init__(f"singular information matrix: {detail}")
        self.detail = detail
