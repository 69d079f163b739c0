"""Small constructors shared by the test modules."""

from __future__ import annotations

from typing import Sequence

from asgs.devices import RandSource
from asgs.kgh import SchemeParams, ShareVector

P8 = SchemeParams.binary(8)


def bv(value: int, params: SchemeParams = P8) -> ShareVector:
    return ShareVector.from_int(params, value)


def bvs(values: Sequence[int], params: SchemeParams = P8) -> list[ShareVector]:
    return [bv(v, params) for v in values]


def fixture_source(values: Sequence[int], params: SchemeParams = P8) -> RandSource:
    return RandSource.fixture(bvs(values, params))


def ints(vectors) -> list[int]:
    return [v.to_int() for v in vectors]
