"""Exception hierarchy shared by all modules."""


class LexiconError(Exception):
    """Base class for every error raised by this package."""


class CodecError(LexiconError, ValueError):
    def __init__(self, pos: int, reason: str):
        super().__init__(f"at offset {pos}: {reason}")
        self.pos = pos
        self.reason = reason


class EditError(LexiconError):
    """A difference-list edit could not be applied."""


class CompileError(LexiconError):
    """Lexicon compilation failed; ``problems`` lists every report line."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class StoreError(LexiconError):
    """The on-disk store is missing, inconsistent or corrupt."""

    def __init__(self, code: str, detail: str = ""):
        super().__init__(f"{code}: {detail}" if detail else code)
        self.code = code


class QueryError(LexiconError):
    pass


class GenerationError(LexiconError):
    """Generation stopped early; ``derivation`` holds the partial log."""

    def __init__(self, message: str, derivation=()):
        super().__init__(message)
        self.derivation = list(derivation)


class DeadEndError(GenerationError):
    pass


class BudgetError(GenerationError):
    pass
