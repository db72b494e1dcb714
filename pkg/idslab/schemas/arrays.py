"""numpy array field type for pydantic models."""

from typing import Annotated

import numpy as np
from pydantic import BeforeValidator, PlainSerializer


def _as_float_array(value) -> np.ndarray:
    arr = np.array(value, dtype=float)
    arr.setflags(write=False)
    return arr


FloatArray = Annotated[
    np.ndarray,
    BeforeValidator(_as_float_array),
    PlainSerializer(lambda a: np.asarray(a).tolist(), return_type=list),
]
