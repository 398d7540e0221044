"""Loading and normalising the raw tweet corpus.

CSV rows become :class:`Tweet` records. Free-text user locations are mapped
to ISO-3166 country codes with a bundled alias gazetteer, and tweets are
tagged with the vaccine brands they mention.
"""
from __future__ import annotations

import csv
import json
import logging
import re
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Iterator, Optional

from ._resources import read_pairs, resource_path

logger = logging.getLogger(__name__)

BRAND_NAMES = (
    "Pfizer/BioNTech",
    "Sinopharm",
    "Sinovac",
    "Oxford/AstraZeneca",
    "Moderna",
    "Covaxin",
    "Sputnik V",
)


class SchemaError(ValueError):
    """A configured column is missing from the CSV header."""


@dataclass(frozen=True)
class Tweet:
    id: str
    text: str
    location_raw: str
    created_at: datetime
    country: Optional[str] = None
    brands: frozenset = frozenset()

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "location_raw": self.location_raw,
            "created_at": self.created_at.isoformat(),
            "country": self.country,
            "brands": sorted(self.brands),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Tweet":
        return cls(
            id=d["id"],
            text=d["text"],
            location_raw=d["location_raw"],
            created_at=datetime.fromisoformat(d["created_at"]),
            country=d.get("country"),
            brands=frozenset(d.get("brands", ())),
        )


@dataclass(frozen=True)
class Brand:
    name: str
    aliases: tuple


def load_brands(path=None) -> list[Brand]:
    """Read an ``alias<TAB>brand`` file and check the seven-brand invariants."""
    path = path or resource_path("brands.tsv")
    grouped: dict[str, list[str]] = {name: [] for name in BRAND_NAMES}
    owner: dict[str, str] = {}
    for alias, name in read_pairs(path):
        alias = alias.strip().lower()
        name = name.strip()
        if name not in grouped:
            raise ValueError(f"{path}: unknown brand {name!r}")
        if alias in owner and owner[alias] != name:
            raise ValueError(f"{path}: alias {alias!r} maps to both {owner[alias]!r} and {name!r}")
        if alias not in owner:
            owner[alias] = name
            grouped[name].append(alias)
    empty = [n for n, a in grouped.items() if not a]
    if empty:
        raise ValueError(f"{path}: brands without aliases: {empty}")
    return [Brand(name, tuple(grouped[name])) for name in BRAND_NAMES]


_brand_patterns: dict[tuple, re.Pattern] = {}


def _brand_pattern(brand: Brand) -> re.Pattern:
    pat = _brand_patterns.get(brand.aliases)
    if pat is None:
        alts = "|".join(re.escape(a) for a in sorted(brand.aliases, key=lambda a: (-len(a), a)))
        pat = re.compile(rf"(?<![^\W_])(?:{alts})(?![^\W_])")
        _brand_patterns[brand.aliases] = pat
    return pat


def tag_brands(text: str, brands: Iterable[Brand]) -> frozenset:
    """Names of all brands with an alias occurring in ``text`` on word boundaries."""
    lowered = text.lower()
    return frozenset(b.name for b in brands if _brand_pattern(b).search(lowered))


_NON_WORD = re.compile(r"[^\w]+|_+")


def _words(s: str) -> tuple:
    return tuple(w for w in _NON_WORD.split(s.lower()) if w)


@dataclass
class Gazetteer:
    """Alias table from location strings to country codes.

    Aliases and queries are lowercased and split into words, so matching
    happens on word boundaries and ignores punctuation ("Washington, DC"
    and "washington dc" are the same alias).
    """

    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        self._index: dict[tuple, tuple[str, str]] = {}
        for alias in sorted(self.entries):
            key = _words(alias)
            if not key:
                continue
            # sorted iteration: the lexicographically smallest alias owns a key
            self._index.setdefault(key, (alias, self.entries[alias]))
        self._max_words = max((len(k) for k in self._index), default=0)

    @classmethod
    def load(cls, path=None) -> "Gazetteer":
        path = path or resource_path("gazetteer.tsv")
        entries = {}
        for alias, code in read_pairs(path):
            code = code.strip().upper()
            if not re.fullmatch(r"[A-Z]{2}", code):
                raise ValueError(f"{path}: bad country code {code!r} for {alias!r}")
            entries[alias.strip().lower()] = code
        return cls(entries)

    def resolve(self, location_raw: str) -> Optional[str]:
        """Country code of the longest alias found in ``location_raw``."""
        words = _words(location_raw or "")
        best = None
        for n in range(min(self._max_words, len(words)), 0, -1):
            for i in range(len(words) - n + 1):
                hit = self._index.get(words[i:i + n])
                if hit is None:
                    continue
                rank = (-len(hit[0]), hit[0])
                if best is None or rank < best[0]:
                    best = (rank, hit[1])
        return best[1] if best else None


def resolve_country(location_raw: str, gaz: Gazetteer) -> Optional[str]:
    return gaz.resolve(location_raw)


@dataclass
class CsvSchema:
    id: str = "id"
    text: str = "text"
    location: str = "user_location"
    date: str = "date"
    delimiter: str = ","


@dataclass
class IngestStats:
    total: int = 0
    emitted: int = 0
    dropped_location: int = 0
    dropped_malformed: int = 0
    dropped_duplicate: int = 0

    @property
    def dropped(self) -> int:
        return self.dropped_location + self.dropped_malformed + self.dropped_duplicate

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "emitted": self.emitted,
            "dropped_location": self.dropped_location,
            "dropped_malformed": self.dropped_malformed,
            "dropped_duplicate": self.dropped_duplicate,
        }


_TWITTER_DATE = "%a %b %d %H:%M:%S %z %Y"


def parse_timestamp(value: str) -> datetime:
    """Parse ISO-8601 or Twitter API timestamps; naive values are taken as UTC."""
    value = value.strip()
    try:
        ts = datetime.fromisoformat(value[:-1] + "+00:00" if value.endswith("Z") else value)
    except ValueError:
        ts = datetime.strptime(value, _TWITTER_DATE)
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _raise_field_limit():
    limit = sys.maxsize
    while True:
        try:
            csv.field_size_limit(limit)
            return
        except OverflowError:
            limit //= 10


def ingest_csv(path, schema: CsvSchema | None = None, gazetteer: Gazetteer | None = None,
               brands: list[Brand] | None = None, stats: IngestStats | None = None) -> Iterator[Tweet]:
    """Stream tweets from a CSV export.

    The header is validated immediately: a missing file raises ``OSError`` and
    a missing configured column raises :class:`SchemaError` before the first
    row is read. Bad rows are skipped and tallied in ``stats``.
    """
    schema = schema or CsvSchema()
    gazetteer = gazetteer if gazetteer is not None else Gazetteer.load()
    brands = brands if brands is not None else load_brands()
    stats = stats if stats is not None else IngestStats()

    _raise_field_limit()
    fh = open(path, encoding="utf-8-sig", newline="")
    try:
        reader = csv.reader(fh, delimiter=schema.delimiter)
        header = next(reader, None)
        if header is None:
            header = []
        missing = [c for c in (schema.id, schema.text, schema.location, schema.date) if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {missing}; header has {header}")
    except BaseException:
        fh.close()
        raise
    cols = {name: header.index(name) for name in (schema.id, schema.text, schema.location, schema.date)}
    return _rows(fh, reader, len(header), cols, schema, gazetteer, brands, stats)


def _rows(fh, reader, width, cols, schema, gazetteer, brands, stats) -> Iterator[Tweet]:
    seen: set[str] = set()
    with fh:
        while True:
            try:
                row = next(reader)
            except StopIteration:
                break
            except csv.Error as exc:
                stats.total += 1
                stats.dropped_malformed += 1
                logger.debug("malformed CSV record near line %d: %s", reader.line_num, exc)
                continue
            if not row:
                # blank physical line; csv yields [] and it is not a record
                continue
            stats.total += 1
            if len(row) != width:
                stats.dropped_malformed += 1
                continue
            tid = row[cols[schema.id]].strip()
            text = row[cols[schema.text]]
            try:
                created = parse_timestamp(row[cols[schema.date]])
            except ValueError:
                created = None
            if not tid or not text.strip() or created is None:
                stats.dropped_malformed += 1
                continue
            location = row[cols[schema.location]]
            if not location.strip():
                stats.dropped_location += 1
                continue
            if tid in seen:
                stats.dropped_duplicate += 1
                continue
            seen.add(tid)
            stats.emitted += 1
            yield Tweet(
                id=tid,
                text=text,
                location_raw=location,
                created_at=created,
                country=gazetteer.resolve(location),
                brands=tag_brands(text, brands),
            )
    logger.info("ingested %s", stats.as_dict())


def write_snapshot(path, tweets: Iterable[Tweet]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for t in tweets:
            fh.write(json.dumps(t.to_dict(), ensure_ascii=False, sort_keys=True))
            fh.write("\n")
            n += 1
    return n


def read_snapshot(path) -> list[Tweet]:
    with open(path, encoding="utf-8") as fh:
        return [Tweet.from_dict(json.loads(line)) for line in fh if line.strip()]
