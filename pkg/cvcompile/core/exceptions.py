from .error_codes import ErrorCode


class CVCompileError(Exception):
    def __init__(self, code: str, message: str, exit_code: int = 1):
        self.code = code
        self.message = message
        self.exit_code = exit_code
        super().__init__(self.message)

    def __str__(self):
        return self.message


class InvalidArgumentError(CVCompileError):
    def __init__(self, message: str = "Invalid argument"):
        super().__init__(ErrorCode.INVALID_ARGUMENT, message)


class OutOfRangeError(CVCompileError):
    def __init__(self, message: str = "Value out of range"):
        super().__init__(ErrorCode.OUT_OF_RANGE, message)


class DegenerateInputError(CVCompileError):
    def __init__(self, message: str = "Degenerate input"):
        super().__init__(ErrorCode.DEGENERATE_INPUT, message)


class UnsupportedSizeError(CVCompileError):
    def __init__(self, message: str = "Problem size not supported"):
        super().__init__(ErrorCode.UNSUPPORTED_SIZE, message)


class PreconditionError(CVCompileError):
    def __init__(self, message: str = "Precondition failed"):
        super().__init__(ErrorCode.PRECONDITION_FAILED, message)


class ConfigurationError(CVCompileError):
    def __init__(self, message: str = "Configuration error"):
        super().__init__(ErrorCode.CONFIG_ERROR, message, 2)


class ResourceRefusalError(CVCompileError):
    def __init__(
        self,
        message: str = "Configuration exceeds the resource budget",
        suggested_cutoff: int | None = None,
    ):
        self.suggested_cutoff = suggested_cutoff
        super().__init__(ErrorCode.RESOURCE_REFUSED, message, 3)
