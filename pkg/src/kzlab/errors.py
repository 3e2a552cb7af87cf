class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class CapExceeded(DomainError):
    """An exponential search was refused because its input exceeds a configured cap."""

    def __init__(self, what: str, size: int, cap: int):
        super().__init__(f"{what}: size {size} exceeds cap {cap}")
        self.what = what
        self.size = size
        self.cap = cap


class StrategyPreconditionFailed(RuntimeError):
    """A strategy needed a structure that does not exist in the reply graph."""

    def __init__(self, step: str, detail: str = ""):
        msg = step if not detail else f"{step}: {detail}"
        super().__init__(msg)
        self.step = step
        self.detail = detail
