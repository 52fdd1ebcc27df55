"""Exception and warning classes shared across the package."""


class PhysrcError(Exception):
    """Base class for every error raised by physrc."""


class InvalidParams(PhysrcError, ValueError):
    """A parameter set violates its documented invariants."""

    def __init__(self, field, message):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


# ingestion
class IngestError(PhysrcError):
    pass


class EmptyDirectory(IngestError):
    pass


class AmbiguousIndex(IngestError):
    pass


class NoIndex(IngestError):
    pass


class MissingColumn(IngestError):
    pass


class MalformedRow(IngestError):
    pass


class NonMonotonicXs(IngestError):
    pass


class XsMismatch(IngestError):
    pass


# preprocessing
class PreprocessError(PhysrcError):
    pass


class MissingBackground(PreprocessError):
    pass


class WindowTooLarge(PreprocessError):
    pass


class RankTooHigh(PreprocessError):
    pass


class EmptySlice(PreprocessError):
    pass


# signals
class SeriesError(PhysrcError):
    pass


class BadPeriodCount(SeriesError):
    pass


class EmptySeries(SeriesError):
    pass


# training / metrics / pipeline
class TrainingError(PhysrcError):
    pass


class TauTooLarge(TrainingError):
    pass


class TooFewRows(TrainingError):
    pass


class NonFiniteInput(TrainingError):
    pass


class SingularSystem(TrainingError):
    pass


class NonBinaryTarget(TrainingError):
    pass


class LengthMismatch(PhysrcError):
    pass


class PipelineStateError(PhysrcError):
    pass


class NoTarget(PipelineStateError):
    pass


class NoInput(PipelineStateError):
    pass


class NotRun(PipelineStateError):
    pass


# simulators
class SimulationError(PhysrcError):
    pass


class UnstableTimestep(SimulationError):
    pass


class SpectralRadiusFailure(SimulationError):
    pass


class DegenerateSeriesWarning(UserWarning):
    """R² requested for a constant series; the score is defined as 0."""


class ConvergenceWarning(UserWarning):
    """An iterative fit stopped at max_iter before reaching tol."""
