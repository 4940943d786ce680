"""Opinion encoding: blue is 1, red is 0.

The integer encoding makes "more blue" the natural partial order used by the
coupling and majorisation arguments.
"""

import numpy as np

RED = 0
BLUE = 1

OPINION_DTYPE = np.uint8


def majority3(a: int, b: int, c: int) -> int:
    """Majority of three 0/1 opinions."""
    return 1 if a + b + c >= 2 else 0


def flip(colour: int) -> int:
    return 1 - colour
