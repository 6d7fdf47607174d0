from typing import Self

from pydantic import BaseModel, ConfigDict, model_validator

__all__ = [
    'BaseModelNoExtra',
    'FrozenModel',
    'Window',
]


class BaseModelNoExtra(BaseModel):
    """
    BaseModel with extra fields forbidden by default.

    Any input containing a field not declared by the model raises a validation
    error, which is what makes scenario files typo-safe.
    """
    model_config = ConfigDict(
        extra='forbid',
        validate_by_name=True,
        validate_by_alias=True,
        use_enum_values=True
    )


class FrozenModel(BaseModelNoExtra):
    """
    Immutable value object. Parameters, states and records are all frozen so they
    can be shared freely between independent simulations.
    """
    model_config = ConfigDict(
        extra='forbid',
        frozen=True,
        validate_by_name=True,
        validate_by_alias=True,
        use_enum_values=True
    )


class Window[BoundType: object](FrozenModel):
    """
    A closed ``[lower, upper]`` window.

    Attributes:
        lower (BoundType): Smallest admitted value.
        upper (BoundType): Largest admitted value.
    """
    lower: BoundType
    upper: BoundType

    @model_validator(mode='after')
    def validate_order(self) -> Self:
        """
        Raises:
            ValueError: If `lower` is greater than `upper`.
        """
        if self.lower > self.upper:
            raise ValueError('Invalid window; requires lower <= upper')

        return self

    def contains(self, value: BoundType) -> bool:
        return self.lower <= value <= self.upper

    def as_tuple(self) -> tuple[BoundType, BoundType]:
        return self.lower, self.upper
