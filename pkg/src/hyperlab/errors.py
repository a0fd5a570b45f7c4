"""Exception types; the CLI maps ConfigError to exit code 2."""


class HyperlabError(Exception):
    pass


class ConfigError(HyperlabError, ValueError):
    """Malformed input: unknown generator, bad model kind, empty region."""


class BallExceeded(HyperlabError):
    def __init__(self, required: int, radius: int):
        super().__init__(f"ball exceeded: query needs radius >= {required}, enumerated radius is {radius}")
        self.required = required
        self.radius = radius


class BudgetExceeded(HyperlabError):
    def __init__(self, what: str, budget: int):
        super().__init__(f"{what} exceeds budget of {budget}")
        self.budget = budget


class CoincidentBoundaryPoints(HyperlabError):
    pass


class NotHyperbolic(HyperlabError):
    pass


class PreconditionFailed(HyperlabError):
    pass
