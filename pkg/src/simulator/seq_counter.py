"""Lollipop sequence-counter arithmetic for 8-bit DTSN values."""

SEQUENCE_MAX = 255
CIRCULAR_MAX = 127
SEQUENCE_WINDOW = 16

# Counters start in the linear region so a fresh node is seen as restarting.
INITIAL_VALUE = SEQUENCE_MAX + 1 - SEQUENCE_WINDOW


def _check(value: int) -> int:
    if not 0 <= value <= SEQUENCE_MAX:
        raise ValueError(f"Sequence counter {value} outside [0, {SEQUENCE_MAX}]")
    return value


def increment(value: int) -> int:
    """Return the next counter value, wrapping 255 back to 0."""
    _check(value)
    return 0 if value == SEQUENCE_MAX else value + 1


def is_newer(received: int, stored: int) -> bool:
    """Check whether ``received`` is strictly newer than ``stored``.

    Values in [128, 255] form the linear restart region, values in [0, 127]
    the circular region. Two values of the same region further apart than
    the window are not comparable, and are never reported as newer.
    """
    _check(received)
    _check(stored)

    received_linear = received > CIRCULAR_MAX
    stored_linear = stored > CIRCULAR_MAX

    if received_linear and not stored_linear:
        return SEQUENCE_MAX + 1 + stored - received > SEQUENCE_WINDOW
    if stored_linear and not received_linear:
        return SEQUENCE_MAX + 1 + received - stored <= SEQUENCE_WINDOW

    return 0 < received - stored <= SEQUENCE_WINDOW
