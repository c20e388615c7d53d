"""
Runtime settings for the separator toolkit.

Settings come from the environment (optionally a local .env file):

    SEP_EXACT_CAPS   comma-separated key=value overrides for exhaustive caps,
                     e.g. "wcol=10,separator=16"; a bare integer raises all caps
    SEP_VERBOSE      1/true/yes/on to print status lines on stderr
    SEP_TRACE_DIR    default directory for engine trace files
"""

import os
import sys
from dataclasses import dataclass, replace
from typing import Dict, Optional

from dotenv import load_dotenv

from errors import CapacityError, ParameterError

# Load environment variables
load_dotenv()

DEFAULT_CAPS: Dict[str, int] = {
    "wcol": 9,
    "nabla": 7,
    "expander": 20,
    "separator": 14,
    "star": 13,
    "symmetric": 1 << 20,
}


@dataclass(frozen=True)
class ExactCaps:
    """Upper limits for the exhaustive oracles"""
    wcol: int = DEFAULT_CAPS["wcol"]
    nabla: int = DEFAULT_CAPS["nabla"]
    expander: int = DEFAULT_CAPS["expander"]
    separator: int = DEFAULT_CAPS["separator"]
    star: int = DEFAULT_CAPS["star"]
    symmetric: int = DEFAULT_CAPS["symmetric"]

    def require(self, name: str, size: int, hint: str = "") -> None:
        """Raise CapacityError when size exceeds the named cap"""
        cap = getattr(self, name)
        if size > cap:
            raise CapacityError(name, cap, size, hint)


@dataclass(frozen=True)
class Settings:
    caps: ExactCaps
    verbose: bool
    trace_dir: Optional[str]


def parse_caps(text: Optional[str]) -> ExactCaps:
    """Parse the SEP_EXACT_CAPS syntax"""
    caps = ExactCaps()
    if not text or not text.strip():
        return caps

    text = text.strip()
    if text.isdigit():
        floor = int(text)
        if floor <= 0:
            raise ParameterError("SEP_EXACT_CAPS must be positive")
        return ExactCaps(**{key: max(value, floor) for key, value in DEFAULT_CAPS.items()})

    overrides: Dict[str, int] = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in DEFAULT_CAPS:
            raise ParameterError(f"Unknown SEP_EXACT_CAPS entry: {item!r}")
        try:
            number = int(value)
        except ValueError:
            raise ParameterError(f"SEP_EXACT_CAPS value for {key} is not an integer: {value!r}")
        if number <= 0:
            raise ParameterError(f"SEP_EXACT_CAPS value for {key} must be positive")
        overrides[key] = number
    return replace(caps, **overrides)


def get_settings() -> Settings:
    """Read the current settings from the environment"""
    verbose = os.getenv("SEP_VERBOSE", "").strip().lower() in {"1", "true", "yes", "on"}
    return Settings(
        caps=parse_caps(os.getenv("SEP_EXACT_CAPS")),
        verbose=verbose,
        trace_dir=os.getenv("SEP_TRACE_DIR") or None,
    )


def get_caps() -> ExactCaps:
    return get_settings().caps


def status(tag: str, message: str, force: bool = False) -> None:
    """Print a bracket-tagged status line on stderr when verbose (or forced)"""
    if force or get_settings().verbose:
        print(f"[{tag}] {message}", file=sys.stderr)
