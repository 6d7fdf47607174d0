import pytest
from pydantic import ValidationError

from surgesim.model import BaseModelNoExtra, FrozenModel, Window


class TestModels:
    def test_base_model_no_extra(self):
        class MyModel(BaseModelNoExtra):
            name: str

        assert MyModel(name='test').name == 'test'
        with pytest.raises(ValidationError):
            MyModel(name='test', extra='field')

    def test_frozen_model(self):
        class MyValue(FrozenModel):
            value: int

        item = MyValue(value=1)
        with pytest.raises(ValidationError):
            item.value = 2

        assert item == MyValue(value=1)

    def test_window(self):
        window = Window[int](lower=8, upper=50)
        assert window.contains(8)
        assert window.contains(50)
        assert not window.contains(51)
        assert window.as_tuple() == (8, 50)
        assert Window[int](lower=3, upper=3).contains(3)

    def test_window_invalid(self):
        with pytest.raises(ValidationError, match='requires lower <= upper'):
            Window[int](lower=10, upper=1)
