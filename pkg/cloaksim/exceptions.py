"""Common exceptions for the cloaking workbench.

"""
import abc
import sys
import typing


class BaseError(Exception):
    """Base exception class carrying a message and keyword details.

    Attributes
    ----------
    details : dict
        Additional context passed at construction time.

    """
    def __init__(self, message: str, **kwargs: typing.Any):
        """Construct an error instance.

        Parameters
        ----------
        message : str
            The explanatory message.
        **kwargs : dict
            Additional context (rendered into the string form).

        """
        super().__init__(message)
        self.details: typing.Dict[str, typing.Any] = kwargs

    def __str__(self) -> str:
        message = super().__str__()
        if len(self.details) == 0:
            return message
        details = ', '.join(f'{key}: {value}'
                            for key, value in self.details.items())
        return f'{message} ({details})'


class CloakSimError(BaseError):
    """Base exception class for all cloaking workbench errors.

    """
    pass


E = typing.TypeVar('E', bound=BaseError)


class ErrorCreator(abc.ABC, typing.Generic[E]):
    """Mixin for classes that raise errors of a class-specific type.

    """
    @classmethod
    @abc.abstractmethod
    def get_error_class(cls) -> type[E]:
        """Get the class-specific error class.

        Returns
        -------
        type
            The error class raised by instances of the class.

        """
        pass  # pragma: no cover

    def _create_error(self, message: str, **kwargs: typing.Any) -> E:
        error = self.get_error_class()(message, **kwargs)
        # Chain the active exception (if any)
        error.__cause__ = sys.exc_info()[1]
        return error
