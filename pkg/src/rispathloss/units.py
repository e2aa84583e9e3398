"""dB / dBm conversions used at the I/O boundary."""

import math


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(value: float) -> float:
    if not value > 0:
        raise ValueError(f"cannot express {value} in dB")
    return 10.0 * math.log10(value)


def dbm_to_watts(dbm: float) -> float:
    return 1e-3 * 10.0 ** (dbm / 10.0)


def watts_to_dbm(watts: float) -> float:
    if not watts > 0:
        raise ValueError("no coupling: received power is zero, dBm undefined")
    return 10.0 * math.log10(watts / 1e-3)
