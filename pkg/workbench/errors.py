# errors.py
from typing import Optional


class WorkbenchError(Exception):
    exit_code = 2


class InputError(WorkbenchError, ValueError):
    """Malformed literal, file or parameter. Carries the position when known."""

    exit_code = 2

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" if column is None else f"line {line}, column {column}"
            message = f"{message} ({where})"
        super().__init__(message)


class CertificateError(WorkbenchError, RuntimeError):
    exit_code = 1

    def __init__(self, message: str, clause: str = ""):
        self.clause = clause
        super().__init__(f"{clause}: {message}" if clause else message)


class DepthError(WorkbenchError, RuntimeError):
    """The finite window cannot certify the answer."""

    exit_code = 3
