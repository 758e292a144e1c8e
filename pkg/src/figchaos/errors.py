"""Exception hierarchy shared by all figchaos modules."""


class FigchaosError(ValueError):
    """Base class for every error raised by this package."""


class ParameterError(FigchaosError):
    pass


class NonNegativityError(FigchaosError):
    """An ARCH(inf) weight fell below the non-negativity tolerance."""

    def __init__(self, lag: int, value: float):
        self.lag = lag
        self.value = value
        super().__init__(
            f"ARCH(inf) weight at lag {lag} is negative ({value:.6g}); "
            "conditional variance would not be guaranteed non-negative"
        )


class UnitRootError(FigchaosError):
    """``1 - sum(beta)`` vanishes, so the variance level is undefined."""


class DivergenceError(FigchaosError):
    pass


class SeriesTooShortError(FigchaosError):
    pass


class DegenerateSeriesError(FigchaosError):
    pass


class NoNeighborError(FigchaosError):
    pass


class ScalingRegionError(FigchaosError):
    pass


class DegenerateFitError(FigchaosError):
    pass


class IngestError(FigchaosError):
    pass


class ConfigError(FigchaosError):
    pass
