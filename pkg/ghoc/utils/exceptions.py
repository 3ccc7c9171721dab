from __future__ import annotations

import traceback
from typing import Any


class GhocError(Exception):
    """
    Base class of every error raised by ghoc.

    ``exit_code`` is the process exit status the command line front end uses
    when the error escapes a command.
    """

    exit_code = 1
    kind = "error"

    def __init__(self, message: str = "", **details: Any):
        super().__init__(message)
        self.message = message
        self.details = {k: v for k, v in details.items() if v is not None}

    def print(self):
        lines = traceback.format_tb(self.__traceback__)
        print("".join(lines))

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "error": self.kind,
            "type": self.__class__.__name__,
            "message": self.message,
            "exit_code": self.exit_code,
        }
        payload.update(self.details)
        return payload


class ParameterError(GhocError):
    exit_code = 2
    kind = "parameter"


class ConfigError(GhocError):
    exit_code = 2
    kind = "config"


class ConstraintError(GhocError):
    exit_code = 2
    kind = "constraint"


class DataError(GhocError):
    exit_code = 3
    kind = "data"

    def __init__(self, message: str = "", line: int | None = None, **details):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, line=line, **details)
        self.line = line


class ShapeError(DataError):
    kind = "shape"


class DomainError(GhocError):
    exit_code = 3
    kind = "domain"


class NumericInputError(GhocError):
    exit_code = 5
    kind = "numeric_input"


class DivergenceError(GhocError):
    exit_code = 5
    kind = "divergence"

    def __init__(
        self,
        message: str = "",
        component: str | None = None,
        value: float | None = None,
        day: int | None = None,
    ):
        super().__init__(message, component=component, value=value, day=day)
        self.component = component
        self.value = value
        self.day = day

    def at_day(self, day: int) -> DivergenceError:
        err = DivergenceError(
            f"day {day}: {self.message}", self.component, self.value, day
        )
        err.__cause__ = self
        return err


class NonConvergenceError(GhocError):
    exit_code = 4
    kind = "non_convergence"


class DifferentiationError(GhocError):
    kind = "differentiation"

    def __init__(self, message: str = "", primitive: str | None = None):
        super().__init__(message, primitive=primitive)
        self.primitive = primitive


def inner_error_default_handler(func, message_fn):
    """Wrap function and an error handling function and throw a GhocError.

    Errors that already belong to the ghoc hierarchy pass through untouched,
    except divergence errors, which get the day index from ``message_fn``'s
    ``day`` keyword when one is given.
    """

    def impl(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except DivergenceError as e:
            day = kwargs.get("day")
            if day is not None and e.day is None:
                raise e.at_day(day) from e
            raise
        except GhocError:
            raise
        except Exception as e:
            message = message_fn(*args, **kwargs)
            raise GhocError(
                f"{message}.\nOrigin Exception is : \n {traceback.format_exception(type(e), e, e.__traceback__)}"
            ) from e

    return impl
