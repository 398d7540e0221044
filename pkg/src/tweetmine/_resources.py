"""Access to the data files bundled under ``tweetmine/resources``."""
from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Iterator


def resource_path(name: str) -> Path:
    return Path(str(resources.files("tweetmine").joinpath("resources", name)))


def read_lines(path) -> Iterator[str]:
    """Yield stripped, non-empty, non-comment lines of a UTF-8 text file."""
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield line


def read_pairs(path) -> Iterator[tuple[str, str]]:
    """Yield ``(key, value)`` pairs from a two-column TSV file."""
    for lineno, line in enumerate(read_lines(path), 1):
        parts = line.split("\t")
        if len(parts) < 2:
            raise ValueError(f"{path}: line {lineno} is not a key<TAB>value pair: {line!r}")
        yield parts[0], parts[1]
