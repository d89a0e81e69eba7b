"""
Exception hierarchy for SEPCA

Library code raises these; only the CLI maps them to process exit codes.
"""
from typing import Optional


class SepcaError(Exception):
    """Base class for all SEPCA errors"""
    exit_code = 1


class ConfigError(SepcaError):
    """Invalid configuration file, flag or parameter combination"""
    exit_code = 2


class MatrixIOError(SepcaError):
    """Reading or writing a matrix or result file failed"""
    exit_code = 3

    def __init__(self, message: str, path: Optional[str] = None,
                 line: Optional[int] = None, offset: Optional[int] = None):
        self.path = path
        self.line = line
        self.offset = offset
        location = []
        if path is not None:
            location.append(str(path))
        if line is not None:
            location.append(f"line {line}")
        if offset is not None:
            location.append(f"byte {offset}")
        prefix = ", ".join(location)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class NumericalError(SepcaError):
    """A numerical routine failed to converge or to bracket a root"""
    exit_code = 4


class DomainError(SepcaError, ValueError):
    """Argument outside the domain of a numerical routine"""
    exit_code = 2
