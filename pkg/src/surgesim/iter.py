from typing import Callable, Iterable, Optional, Sequence

__all__ = [
    'first_index',
    'settled_index',
]


def first_index[ItemType](
        item_list: Iterable[ItemType],
        condition: Callable[[ItemType], bool]
) -> Optional[int]:
    """
    Returns the position of the first item in `item_list` that meets `condition`.

    Args:
        item_list: Iterable of items of type `ItemType`
        condition: Predicate applied to each item

    Returns:
        Index of the first matching item, or None if no item matches
    """
    for index, item in enumerate(item_list):
        if condition(item):
            return index

    return None


def settled_index[ItemType](
        item_list: Sequence[ItemType],
        condition: Callable[[ItemType], bool]
) -> Optional[int]:
    """
    Returns the first position from which every remaining item meets `condition`.

    Unlike `first_index`, an item that meets the condition but is followed by one
    that does not is skipped over.

    Args:
        item_list: Sequence of items of type `ItemType`
        condition: Predicate applied to each item

    Returns:
        Start index of the trailing run of matching items, or None if the last
        item does not match (or the sequence is empty)
    """
    settled = None
    for index in range(len(item_list) - 1, -1, -1):
        if not condition(item_list[index]):
            break
        settled = index

    return settled
