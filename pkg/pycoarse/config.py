import os
from collections import namedtuple
from typing import Mapping, Optional
from .exceptions import ConfigError

DEFAULT_DENSE_THRESHOLD = 4096
DEFAULT_BRUTE_FORCE_CAP = 9
DEFAULT_SEARCH_BUDGET = 10 ** 6
FORMAT_VERSION = "1"

Settings = namedtuple(
    "Settings",
    [
        "dense_threshold",
        "brute_force_cap",
        "search_budget",
        "output_dir",
        "format_version",
    ],
)
"""
Run-wide settings.

:param int dense_threshold: Largest window size stored as a dense matrix.
:param int brute_force_cap: Largest window the oracle will search.
:param int search_budget: Exponents scanned per tolerance step.
:param str output_dir: Directory that documents are written to.
:param str format_version: Version tag written into every document.
"""

_int_overrides = {
    "PYCOARSE_DENSE_THRESHOLD": "dense_threshold",
    "PYCOARSE_BRUTE_FORCE_CAP": "brute_force_cap",
    "PYCOARSE_SEARCH_BUDGET": "search_budget",
}


def default_settings() -> Settings:
    return Settings(
        dense_threshold=DEFAULT_DENSE_THRESHOLD,
        brute_force_cap=DEFAULT_BRUTE_FORCE_CAP,
        search_budget=DEFAULT_SEARCH_BUDGET,
        output_dir=".",
        format_version=FORMAT_VERSION,
    )


def load_settings(environ: Optional[Mapping[str, str]] = None) -> Settings:
    """
    Build settings from the defaults and environment overrides.

    :param Optional[Mapping[str, str]] environ: Mapping to read overrides
        from.  Defaults to os.environ.
    :returns: The resulting settings.
    :rtype: Settings
    :raises: ConfigError if an override is not a positive integer.
    """
    if environ is None:
        environ = os.environ
    settings = default_settings()
    changes = {}
    for variable, field in _int_overrides.items():
        if variable not in environ:
            continue
        raw = environ[variable]
        try:
            value = int(raw)
        except ValueError:
            raise ConfigError(variable, raw)
        if value < 1:
            raise ConfigError(variable, raw)
        changes[field] = value
    if environ.get("PYCOARSE_OUTPUT_DIR"):
        changes["output_dir"] = environ["PYCOARSE_OUTPUT_DIR"]
    return settings._replace(**changes)
