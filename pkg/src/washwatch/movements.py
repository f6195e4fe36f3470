"""The closed alphabet of washing-movement labels.

Code 0 stands for idle / anything that is not a recognized washing
movement. Codes 2 through 7 and 10 are the rubbing movements and the
faucet-off step from the WHO hand-hygiene technique, numbered to match
the WHO poster.
"""
from __future__ import annotations

from enum import IntEnum


class MovementClass(IntEnum):
    IDLE = 0
    PALM_TO_PALM = 2
    PALM_OVER_DORSUM = 3
    FINGERS_INTERLACED = 4
    BACK_OF_FINGERS = 5
    THUMB_RUB = 6
    FINGERTIPS_TO_PALM = 7
    FAUCET_WITH_TOWEL = 10

    @property
    def canonical_name(self) -> str:
        return _CODE_TO_NAME[int(self)]

    @classmethod
    def from_code(cls, code: int) -> "MovementClass":
        try:
            return cls(code)
        except ValueError:
            raise UnknownMovementError(f"unknown movement code {code}") from None

    @classmethod
    def from_name(cls, name: str) -> "MovementClass":
        try:
            return cls(_NAME_TO_CODE[name])
        except KeyError:
            raise UnknownMovementError(f"unknown movement name {name!r}") from None


class UnknownMovementError(ValueError):
    """A movement code or name outside the closed alphabet."""


_CODE_TO_NAME = {
    0: "idle",
    2: "palm_to_palm",
    3: "palm_over_dorsum",
    4: "fingers_interlaced",
    5: "back_of_fingers",
    6: "thumb_rub",
    7: "fingertips_to_palm",
    10: "faucet_with_towel",
}
_NAME_TO_CODE = {name: code for code, name in _CODE_TO_NAME.items()}

# Canonical ordering used everywhere a per-class vector or matrix appears.
CODE_ORDER: tuple[int, ...] = (0, 2, 3, 4, 5, 6, 7, 10)
CODE_INDEX: dict[int, int] = {code: i for i, code in enumerate(CODE_ORDER)}
WASHING_CODES: tuple[int, ...] = (2, 3, 4, 5, 6, 7, 10)
NUM_CLASSES = len(CODE_ORDER)
