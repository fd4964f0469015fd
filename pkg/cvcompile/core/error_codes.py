"""
Central map of error codes used by CVCompileError and the CLI problem output.
"""

from typing import Dict


class ErrorCode:
    """Error codes with human-readable descriptions."""

    # Arguments
    INVALID_ARGUMENT = "invalid_argument"
    OUT_OF_RANGE = "out_of_range"
    DEGENERATE_INPUT = "degenerate_input"
    PRECONDITION_FAILED = "precondition_failed"

    # Resources
    UNSUPPORTED_SIZE = "unsupported_size"
    RESOURCE_REFUSED = "resource_refused"

    # Configuration
    CONFIG_ERROR = "config_error"

    INTERNAL_ERROR = "internal_error"


ERROR_DESCRIPTIONS: Dict[str, str] = {
    ErrorCode.INVALID_ARGUMENT: "An argument is malformed or inconsistent with the others.",
    ErrorCode.OUT_OF_RANGE: "An index or level lies outside the truncated space.",
    ErrorCode.DEGENERATE_INPUT: "The input makes the quantity undefined (vanishing normalizer).",
    ErrorCode.PRECONDITION_FAILED: "The operation's precondition does not hold for this input.",
    ErrorCode.UNSUPPORTED_SIZE: "This routine refuses sizes beyond its dense-resource guard.",
    ErrorCode.RESOURCE_REFUSED: "The configuration would exceed the amplitude budget. Lower the cutoff or pass --allow-large.",
    ErrorCode.CONFIG_ERROR: "The experiment configuration could not be parsed or validated.",
    ErrorCode.INTERNAL_ERROR: "An unexpected internal error occurred.",
}


def get_error_description(code: str) -> str:
    """
    Description for an error code.

    Args:
        code: Error code

    Returns:
        Description, or a generic message for unknown codes
    """
    return ERROR_DESCRIPTIONS.get(code, "An error occurred.")
