"""
Catch Exception decorator for CLI commands.

When any exception derived from `EntanglementAtlasError` is raised the console output \
    does not have the stack trace, just the message, and the command returns the exit \
    code attached to the exception class.

#### Usage:

```python
from entanglement_atlas.decorators.catch_exceptions import catch_exceptions


@catch_exceptions
def my_command(args) -> int:
    return 0
```
"""

import logging
from functools import wraps
from typing import Callable

logger = logging.getLogger(__name__)


class EntanglementAtlasError(Exception):
    """Default managed runtime exception."""

    exit_code = 1


class UsageError(EntanglementAtlasError):
    """Invalid input supplied by the caller (malformed state, bad flag value, unsupported shape)."""

    exit_code = 2


def catch_exceptions(func: Callable[..., int]) -> Callable[..., int]:
    """
    Catches and simplifies expected errors thrown by CLI commands.

    Args:
        func (Callable): The command which may throw exceptions which should be simplified.

    Returns:
        The decorated function, returning the command exit code.
    """
    @wraps(func)
    def decorated(*args, **kwargs) -> int:
        """Invoke function and catches the errors."""
        try:
            return func(*args, **kwargs)
        except EntanglementAtlasError as error:
            logger.error(str(error))
            return error.exit_code

    return decorated
