from enum import StrEnum
from typing import List, Optional, Self

import numpy as np
from pydantic import Field

from ..model import FrozenModel

__all__ = [
    'Zone',
    'RiderAgent',
    'TruncatedNormalSpec',
    'RiderPool',
]


class Zone(StrEnum):
    SURGE = 'surge'
    NON_SURGE = 'non_surge'


class RiderAgent(FrozenModel):
    """
    A single waiting rider.

    Attributes:
        id (int): Unique rider id; ties in arrival time are broken by id.
        arrived_at (int): Step in which the rider entered the market.
        wtp (float): Willingness to pay; the rider accepts any price up to it.
        move_cost (float): Cost of walking out of the surge zone.
        zone (Zone): Zone the rider currently waits in.
    """
    id: int
    arrived_at: int = Field(ge=0)
    wtp: float = Field(ge=0)
    move_cost: float = Field(ge=0)
    zone: Zone


class TruncatedNormalSpec(FrozenModel):
    """
    Normal distribution left-truncated at 0.

    ``mean`` and ``std`` parametrize the underlying normal; draws are rejected and
    redrawn until nonnegative.
    """
    mean: float
    std: float = Field(gt=0)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """
        Draws `size` variates by rejection from the underlying normal.
        """
        accepted = np.empty(0, dtype=float)
        while accepted.size < size:
            missing = size - accepted.size
            draws = rng.normal(self.mean, self.std, size=missing)
            accepted = np.concatenate((accepted, draws[draws >= 0.0]))

        return accepted


class RiderPool:
    """
    Riders waiting in one zone, kept in FIFO order of ``(arrived_at, id)``.

    Attributes are stored column-wise; every operation returns new pools and leaves
    the receiver untouched.
    """
    __slots__ = ('ids', 'arrived_at', 'wtp', 'move_cost')

    def __init__(
            self,
            ids: Optional[np.ndarray] = None,
            arrived_at: Optional[np.ndarray] = None,
            wtp: Optional[np.ndarray] = None,
            move_cost: Optional[np.ndarray] = None
    ):
        self.ids = ids if ids is not None else np.empty(0, dtype=np.int64)
        self.arrived_at = arrived_at if arrived_at is not None else np.empty(0, dtype=np.int64)
        self.wtp = wtp if wtp is not None else np.empty(0, dtype=float)
        self.move_cost = move_cost if move_cost is not None else np.empty(0, dtype=float)

    def __len__(self) -> int:
        return int(self.ids.size)

    @classmethod
    def arrivals(
            cls,
            first_id: int,
            count: int,
            t: int,
            wtp: np.ndarray,
            move_cost: np.ndarray
    ) -> Self:
        return cls(
            ids=np.arange(first_id, first_id + count, dtype=np.int64),
            arrived_at=np.full(count, t, dtype=np.int64),
            wtp=wtp,
            move_cost=move_cost
        )

    def _subset(self, index: np.ndarray) -> Self:
        return self.__class__(
            self.ids[index], self.arrived_at[index], self.wtp[index], self.move_cost[index]
        )

    def split(self, mask: np.ndarray) -> tuple[Self, Self]:
        """Returns ``(selected, remaining)`` for a boolean mask, both in FIFO order."""
        return self._subset(mask), self._subset(~mask)

    def extend(self, other: Self) -> Self:
        """
        Appends riders that arrived no earlier than everyone already waiting.
        """
        return self.__class__(
            np.concatenate((self.ids, other.ids)),
            np.concatenate((self.arrived_at, other.arrived_at)),
            np.concatenate((self.wtp, other.wtp)),
            np.concatenate((self.move_cost, other.move_cost))
        )

    def merge(self, other: Self) -> Self:
        """Merges two pools restoring FIFO order."""
        merged = self.extend(other)
        order = np.lexsort((merged.ids, merged.arrived_at))
        return merged._subset(order)

    def match(self, price: float, drivers: int) -> tuple[int, Self]:
        """
        Serves riders willing to pay `price`, oldest first, until drivers or eligible
        riders run out.

        Returns:
            Number of matches and the pool of riders still waiting.
        """
        eligible = np.flatnonzero(self.wtp >= price)[:max(0, drivers)]
        served = np.zeros(len(self), dtype=bool)
        served[eligible] = True
        return int(eligible.size), self._subset(~served)

    def riders(self, zone: Zone) -> List[RiderAgent]:
        return [
            RiderAgent(
                id=int(rider_id), arrived_at=int(arrived), wtp=float(wtp),
                move_cost=float(cost), zone=zone
            )
            for rider_id, arrived, wtp, cost in zip(
                self.ids, self.arrived_at, self.wtp, self.move_cost
            )
        ]
