"""Error types shared across the package; `code` is a stable machine tag."""


class CalcError(Exception):
    code = "E_ERROR"


class ParseError(CalcError):
    code = "E_SYNTAX"

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.line = line
        self.col = col


class UnknownFormError(CalcError):
    code = "E_UNKNOWN_FORM"


class TypingError(CalcError):
    code = "E_TYPE"


class NonExhaustiveMatch(TypingError):
    code = "E_NONEXHAUSTIVE_MATCH"


class ArityError(TypingError):
    code = "E_ARITY"


class UnboundVariable(TypingError):
    code = "E_UNBOUND_VAR"


class AtomEscape(CalcError):
    code = "E_ATOM_ESCAPE"


class DuplicateConstructor(CalcError):
    code = "E_DUPLICATE_CON"


class DuplicateTypeName(CalcError):
    code = "E_DUPLICATE_TYPE"


class UndeclaredType(CalcError):
    code = "E_UNDECLARED_TYPE"


class NotNominal(CalcError):
    code = "E_NOT_NOMINAL"


class IllTyped(CalcError):
    code = "E_ILL_TYPED"


class Uninhabited(CalcError):
    code = "E_UNINHABITED"


class ObsDeclarationError(CalcError):
    code = "E_OBS_DECLARATION"
