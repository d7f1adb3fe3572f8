"""Exception types raised across the package."""


class HoroRadonError(Exception):
    pass


class InsufficientCylinderDepth(HoroRadonError, ValueError):
    """A boundary-dependent quantity was requested on cylinders too shallow
    for it to be constant on each cylinder."""

    def __init__(self, needed: int, have: int, what: str = ""):
        self.needed = needed
        self.have = have
        msg = f"cylinder depth {have} < required {needed}"
        if what:
            msg = f"{what}: {msg}"
        super().__init__(msg)


class ZeroInput(HoroRadonError, ValueError):
    pass


class FormatError(HoroRadonError, ValueError):
    """Malformed input file. Carries the location of the offending field."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None,
                 field: str | None = None):
        self.path = path
        self.line = line
        self.field = field
        where = []
        if path:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field {field!r}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class ParameterMismatch(HoroRadonError, ValueError):
    pass
