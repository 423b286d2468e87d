"""Exception hierarchy shared across the evaluation pipeline."""


class SdbenchError(Exception):
    """Base class for all sdbench failures."""


class ConfigError(SdbenchError):
    """Invalid or incomplete run configuration."""


class IngestError(SdbenchError):
    """CSV could not be read or parsed."""


class SchemaError(SdbenchError):
    """Real and synthetic tables cannot be aligned."""


class MetricError(SdbenchError):
    """A metric received input it cannot evaluate."""


class ReportError(SdbenchError):
    """Report assembly received inconsistent inputs."""
