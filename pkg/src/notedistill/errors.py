"""Exception hierarchy shared across the pipeline.

Every error carries a short machine-readable ``code`` so the CLI can emit a
single parseable line on failure.
"""


class NotedistillError(Exception):
    """Base class for all pipeline errors."""

    code = "pipeline"


class CorpusError(NotedistillError):
    code = "corpus"


class TokenFileError(NotedistillError):
    code = "token-file"


class SpanError(NotedistillError):
    code = "span"


class TokenMismatchError(NotedistillError):
    code = "token-mismatch"


class PromptError(NotedistillError):
    code = "prompt"


class CassetteError(NotedistillError):
    code = "cassette"


class CassetteMissError(CassetteError):
    code = "cassette-miss"


class EndpointError(NotedistillError):
    code = "endpoint"


class LexiconError(NotedistillError):
    code = "lexicon"


class LabelingError(NotedistillError):
    code = "labeling"


class EnsembleError(NotedistillError):
    code = "ensemble"


class EvaluationError(NotedistillError):
    code = "evaluation"


class CostingError(NotedistillError):
    code = "costing"


class ConfigError(NotedistillError):
    """Raised with every detected problem, not only the first."""

    code = "config"

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
