"""Bounded store of solved profiles keyed by lambda."""

import math
from collections import OrderedDict
from typing import Generic, Iterator, Optional, TypeVar

from odp.core.errors import ConfigurationError

T = TypeVar("T")


class LambdaStore(Generic[T]):
    """
    Least-recently-used map lambda -> profile.

    Lookups and inserts refresh an entry; inserting past maxsize evicts the
    stalest one.
    """

    def __init__(self, maxsize: int = 64):
        if int(maxsize) < 1:
            raise ConfigurationError(f"Profile store size must be >= 1, got {maxsize}")
        self.maxsize = int(maxsize)
        self._items: "OrderedDict[float, T]" = OrderedDict()

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, lam: float) -> bool:
        return float(lam) in self._items

    def __iter__(self) -> Iterator[float]:
        return iter(list(self._items))

    def get(self, lam: float) -> Optional[T]:
        lam = float(lam)
        if lam not in self._items:
            return None
        self._items.move_to_end(lam)
        return self._items[lam]

    def put(self, lam: float, item: T) -> None:
        lam = float(lam)
        self._items[lam] = item
        self._items.move_to_end(lam)
        while len(self._items) > self.maxsize:
            self._items.popitem(last=False)

    def nearest(self, lam: float) -> Optional[float]:
        """Stored lambda closest to lam in log scale."""
        if not self._items:
            return None
        return min(self._items, key=lambda x: abs(math.log(x / lam)))
