from __future__ import annotations

from functools import wraps
from typing import Any, Callable

import numpy as np

from .exceptions import DifferentiationError
from .utils import hashable, log

_PLAIN_TYPES = frozenset({float, int, bool, np.float64, np.float32, np.int64})


def is_plain(value: Any) -> bool:
    return type(value) in _PLAIN_TYPES or isinstance(value, (float, int))


def format_types(args: tuple[Any, ...]) -> str:
    return ", ".join(type(arg).__name__ for arg in args)


class Dispatcher:
    """
    Registry of type-specific implementations for numeric primitives.

    A primitive (see :func:`primitive`) evaluates its plain-float body when
    every argument is a real number. As soon as one argument has another type,
    e.g. a dual number, the registered handler for that type is used instead.

    Examples:

        >>> @primitive
        ... def twice(x):
        ...     return 2.0 * x
        ...
        >>> class Boxed:
        ...     def __init__(self, v):
        ...         self.v = v
        ...
        >>> Dispatcher.register(twice, Boxed, lambda x: Boxed(2.0 * x.v))
        >>> twice(1.5)
        3.0
        >>> twice(Boxed(1.5)).v
        3.0
    """

    handlers: dict[Callable[..., Any], dict[type, Callable[..., Any]]] = {}
    _resolved: dict[tuple[Callable[..., Any], type], Callable[..., Any] | None] = {}

    @classmethod
    def register(
        cls,
        fn: Callable[..., Any],
        traced_type: type,
        handler: Callable[..., Any],
    ):
        """
        Register ``handler`` as the implementation of ``fn`` whenever one of
        its arguments is an instance of ``traced_type``.

        Args:
            fn: The primitive to be registered.
            traced_type: The non-plain argument type the handler understands.
            handler: Called with the same arguments as ``fn``.
        """
        cls.handlers.setdefault(fn, {})[traced_type] = handler
        cls._resolved.clear()

    @classmethod
    def register_decorator(cls, fn: Callable[..., Any], traced_type: type):
        """
        Decorator mode of register.

        Examples:
            >>> @primitive
            ... def halve(x):
            ...     return x / 2.0
            ...
            >>> @Dispatcher.register_decorator(halve, complex)
            ... def halve_complex(x):
            ...     return x / 2
            ...
            >>> halve(1j)
            0.5j
        """

        def decorator(handler: Callable[..., Any]):
            cls.register(fn, traced_type, handler)
            return handler

        return decorator

    @classmethod
    def dispatch(
        cls, fn: Callable[..., Any], *args: Any
    ) -> Callable[..., Any] | None:
        """
        Find the handler of ``fn`` for the first non-plain argument, searching
        that argument's MRO. Returns None when nothing is registered.
        """
        if not hashable(fn) or fn not in cls.handlers:
            return None
        traced = next((arg for arg in args if not is_plain(arg)), None)
        if traced is None:
            return None
        key = (fn, type(traced))
        if key not in cls._resolved:
            registered = cls.handlers[fn]
            cls._resolved[key] = next(
                (registered[t] for t in type(traced).__mro__ if t in registered),
                None,
            )
            log(
                5,
                f"[dispatch] {getattr(fn, '__name__', fn)}({format_types(args)}) -> {cls._resolved[key]}\n",
            )
        return cls._resolved[key]


def primitive(fn: Callable[..., Any]) -> Callable[..., Any]:
    """
    Mark ``fn`` as a dispatchable numeric primitive. The undecorated function
    stays reachable as ``.raw`` for handlers that need the plain value.
    """

    @wraps(fn)
    def call(*args: Any) -> Any:
        for arg in args:
            if type(arg) in _PLAIN_TYPES:
                continue
            if isinstance(arg, (float, int)):
                continue
            handler = Dispatcher.dispatch(call, *args)
            if handler is None:
                raise DifferentiationError(
                    f"unsupported primitive '{fn.__name__}' for argument types ({format_types(args)})",
                    primitive=fn.__name__,
                )
            return handler(*args)
        return fn(*args)

    call.raw = fn
    return call
