class TrustCheckError(Exception):
    """Base class for every error raised by trustcheck."""


class ModelError(TrustCheckError):
    """Model file could not be read, parsed or made consistent."""


class ValidationFailed(ModelError):
    def __init__(self, report):
        self.report = report
        first = report.violations[0] if report.violations else None
        super().__init__(
            f"model has {len(report.violations)} violation(s)"
            + (f", first: {first}" if first else "")
        )


class FormulaSyntaxError(TrustCheckError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f"line {line} column {column}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class UnknownSymbolError(FormulaSyntaxError):
    """Formula names an agent or proposition the model does not declare."""


class FragmentError(TrustCheckError):
    """Formula lies outside the fragment an engine decides."""


class UnsupportedFormulaError(TrustCheckError):
    """Formula combination the evaluator cannot decide."""


class UndefinedBeliefError(TrustCheckError):
    """Conditioning on an observation class of probability zero."""


class SynthesisError(TrustCheckError):
    """Pro-attitude synthesis or preference update failed."""


class EvaluationError(TrustCheckError):
    """A trust or cognitive clause is undefined at the current path."""
