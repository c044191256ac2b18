import logging
import math
from typing import Any

import numpy as np

logger = logging.getLogger(__name__)


def format_float(value: float) -> str:
    """
    Shortest decimal that round-trips to the same double (at most 17
    significant digits), no locale.
    """
    return repr(float(value))


def parse_float_list(text: str) -> list[float]:
    """
    "1e-2,5e-3, 2.5e-3" → [0.01, 0.005, 0.0025]
    Empty items are an error, not skipped.
    """
    if not text or not isinstance(text, str):
        raise ValueError("expected a comma-separated list of numbers")
    out = []
    for item in text.split(","):
        item = item.strip()
        try:
            out.append(float(item))
        except ValueError:
            raise ValueError(f"not a number: {item!r}") from None
    return out


def parse_complex(text: str) -> complex:
    """
    Complex literal from the command line.
    "0.7+0.2j", "0.7+0.2i", "2", "-1j" and "0.7,0.2" (re,im) are accepted.
    """
    if not text or not isinstance(text, str):
        raise ValueError("expected a complex number")
    text = text.strip().replace(" ", "")
    if "," in text:
        parts = text.split(",")
        if len(parts) != 2:
            raise ValueError(f"expected 're,im', got {text!r}")
        return complex(float(parts[0]), float(parts[1]))
    if text.endswith("i"):
        text = text[:-1] + "j"
    try:
        value = complex(text)
    except ValueError:
        raise ValueError(f"not a complex number: {text!r}") from None
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ValueError(f"complex number must be finite, got {text!r}")
    return value


def sample_disk(rng: np.random.Generator, count: int, radius: float) -> np.ndarray:
    """Uniform samples in |z| <= radius."""
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, count))
    phi = rng.uniform(0.0, 2 * np.pi, count)
    return r * np.exp(1j * phi)


def to_jsonable(obj: Any) -> Any:
    """
    numpy scalars/arrays and complex numbers → plain JSON types.
    complex → [re, im]; arrays → nested lists.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        logger.debug("non-finite float %r written as string", obj)
        return repr(obj)
    return obj
