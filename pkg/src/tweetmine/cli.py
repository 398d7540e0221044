"""``tweetmine`` command line: a staged pipeline over a work directory.

    ingest      CSV -> tweets.jsonl (+ ingest_stats.json)
    preprocess  tweets.jsonl -> documents.jsonl (+ phrases.tsv)
    sentiment   tweets.jsonl -> sentiment.jsonl   (or --texts FILE -> scores)
    topics      documents.jsonl -> model.json (+ coherence.json with --k-range)
    sweep-k     documents.jsonl -> coherence.json
    report      documents/sentiment/model -> report/ bundle

Every command also writes ``manifests/<command>.json`` with content hashes
of its inputs and outputs, the effective config, the seed and versions.

Exit codes: 0 ok, 2 usage/config/schema, 3 missing upstream artifact,
4 data error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import platform
import sys
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import numba
import numpy as np

from . import __version__, corpus, preprocess, report, sentiment, topicmodel

logger = logging.getLogger("tweetmine")

EXIT_OK, EXIT_USAGE, EXIT_MISSING, EXIT_DATA = 0, 2, 3, 4

TWEETS = "tweets.jsonl"
INGEST_STATS = "ingest_stats.json"
DOCUMENTS = "documents.jsonl"
PHRASES = "phrases.tsv"
SENTIMENT = "sentiment.jsonl"
MODEL = "model.json"
COHERENCE = "coherence.json"
REPORT_DIR = "report"
MANIFEST_DIR = "manifests"


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def usage_error(msg: str) -> CliError:
    return CliError(msg, EXIT_USAGE)


@dataclass
class RunConfig:
    input: Optional[Path] = None
    columns: corpus.CsvSchema = field(default_factory=corpus.CsvSchema)
    resources: dict = field(default_factory=dict)
    min_count: int = 5
    threshold: float = 10.0
    lda: topicmodel.LdaConfig = field(default_factory=lambda: topicmodel.LdaConfig(K=10))
    k_range: Optional[list] = None
    output: Path = Path("out")
    seed: int = 0
    threads: int = 1

    RESOURCE_KEYS = ("lexicon", "stopwords", "extra_stopwords", "wordlist", "lemmas", "gazetteer", "brands")

    def validate(self) -> None:
        unknown = set(self.resources) - set(self.RESOURCE_KEYS)
        if unknown:
            raise usage_error(f"unknown resource key(s): {sorted(unknown)}")
        for key, path in self.resources.items():
            if not Path(path).is_file():
                raise usage_error(f"resource {key} not found: {path}")
        if self.threads < 1:
            raise usage_error("threads must be >= 1")
        try:
            self.lda.validate()
        except ValueError as exc:
            raise usage_error(f"lda: {exc}") from exc

    def as_dict(self) -> dict:
        return {
            "input": str(self.input) if self.input else None,
            "columns": asdict(self.columns),
            "resources": {k: str(v) for k, v in sorted(self.resources.items())},
            "preprocess": {"min_count": self.min_count, "threshold": self.threshold},
            "lda": asdict(self.lda),
            "k_range": self.k_range,
            "seed": self.seed,
            "threads": self.threads,
        }


def parse_k_range(text: str) -> list[int]:
    """``"a..b"`` (inclusive) or a comma list; an empty range is an error."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
            ks = list(range(lo, hi + 1))
        else:
            ks = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise usage_error(f"bad k range {text!r}; expected 'a..b' or 'k1,k2,...'") from None
    if not ks:
        raise usage_error(f"k range {text!r} is empty")
    if min(ks) < 1:
        raise usage_error("every K in the range must be >= 1")
    return ks


def load_config(path: Optional[str]) -> RunConfig:
    cfg = RunConfig()
    if path is None:
        return cfg
    p = Path(path)
    if not p.is_file():
        raise usage_error(f"config file not found: {path}")
    try:
        with open(p, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise usage_error(f"{path}: {exc}") from exc
    base = p.resolve().parent

    def rel(v):
        q = Path(v)
        return q if q.is_absolute() else base / q

    try:
        inp = data.get("input", {})
        if "path" in inp:
            cfg.input = rel(inp["path"])
        cols = data.get("columns", {})
        cfg.columns = corpus.CsvSchema(**cols)
        cfg.resources = {k: rel(v) for k, v in data.get("resources", {}).items()}
        pre = data.get("preprocess", {})
        cfg.min_count = int(pre.get("min_count", cfg.min_count))
        cfg.threshold = float(pre.get("threshold", cfg.threshold))
        lda = dict(data.get("lda", {}))
        k_range = lda.pop("k_range", None)
        if k_range is not None:
            cfg.k_range = parse_k_range(str(k_range))
        cfg.lda = topicmodel.LdaConfig(**{"K": 10, **lda})
        run = data.get("run", {})
        if "output" in run:
            cfg.output = rel(run["output"])
        cfg.seed = int(run.get("seed", cfg.seed))
        cfg.threads = int(run.get("threads", cfg.threads))
    except (TypeError, ValueError) as exc:
        raise usage_error(f"{path}: {exc}") from exc
    return cfg


# manifests ---------------------------------------------------------------

def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def versions() -> dict:
    return {
        "tweetmine": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "numba": numba.__version__,
    }


def write_manifest(cfg: RunConfig, command: str, inputs: dict, outputs: dict, extra: dict | None = None) -> Path:
    """Hash inputs/outputs and record the run under ``manifests/``."""
    mdir = cfg.output / MANIFEST_DIR
    mdir.mkdir(parents=True, exist_ok=True)
    data = {
        "command": command,
        "config": cfg.as_dict(),
        "seed": cfg.seed,
        "versions": versions(),
        "inputs": {k: sha256_file(v) for k, v in sorted(inputs.items())},
        "outputs": {k: sha256_file(v) for k, v in sorted(outputs.items())},
    }
    if extra:
        data.update(extra)
    path = mdir / f"{command}.json"
    report.write_json(path, data)
    return path


def _resource_inputs(cfg: RunConfig, *keys) -> dict:
    return {f"resource:{k}": cfg.resources[k] for k in keys if k in cfg.resources}


def _need(path: Path, producer: str) -> Path:
    if not path.is_file():
        raise CliError(f"missing {path.name} in {path.parent}; run `tweetmine {producer}` first", EXIT_MISSING)
    return path


def _read_jsonl(path: Path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise CliError(f"{path}:{n}: {exc}", EXIT_DATA) from exc
    return rows


def _write_jsonl(path: Path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in rows:
            fh.write(json.dumps(r, ensure_ascii=False, sort_keys=True))
            fh.write("\n")


def _load_tweets(cfg: RunConfig) -> list:
    path = _need(cfg.output / TWEETS, "ingest")
    try:
        return [corpus.Tweet.from_dict(d) for d in _read_jsonl(path)]
    except (KeyError, ValueError, TypeError) as exc:
        raise CliError(f"{path}: bad tweet record: {exc}", EXIT_DATA) from exc


def _load_documents(cfg: RunConfig) -> list:
    path = _need(cfg.output / DOCUMENTS, "preprocess")
    try:
        return [preprocess.Document.from_dict(d) for d in _read_jsonl(path)]
    except (KeyError, ValueError, TypeError) as exc:
        raise CliError(f"{path}: bad document record: {exc}", EXIT_DATA) from exc


def _sentiment_lexicon(cfg: RunConfig) -> sentiment.SentimentLexicon:
    if "lexicon" in cfg.resources:
        return sentiment.SentimentLexicon.load(lexicon=cfg.resources["lexicon"])
    return sentiment.default_lexicon()


# commands ----------------------------------------------------------------

def cmd_ingest(cfg: RunConfig) -> dict:
    if cfg.input is None:
        raise usage_error("no input CSV; set [input] path in the config or pass --input")
    if not cfg.input.is_file():
        raise usage_error(f"input CSV not found: {cfg.input}")
    gaz = corpus.Gazetteer.load(cfg.resources.get("gazetteer"))
    brands = corpus.load_brands(cfg.resources.get("brands"))
    stats = corpus.IngestStats()
    try:
        tweets = corpus.ingest_csv(cfg.input, cfg.columns, gaz, brands, stats)
    except corpus.SchemaError as exc:
        raise usage_error(f"schema error: {exc}") from exc
    cfg.output.mkdir(parents=True, exist_ok=True)
    corpus.write_snapshot(cfg.output / TWEETS, tweets)
    assert stats.total == stats.emitted + stats.dropped
    report.write_json(cfg.output / INGEST_STATS, stats.as_dict())
    write_manifest(cfg, "ingest", {"input": cfg.input, **_resource_inputs(cfg, "gazetteer", "brands")},
                   {TWEETS: cfg.output / TWEETS, INGEST_STATS: cfg.output / INGEST_STATS},
                   {"counts": stats.as_dict()})
    return stats.as_dict()


def cmd_preprocess(cfg: RunConfig) -> dict:
    tweets = _load_tweets(cfg)
    r = cfg.resources
    lex = preprocess.Lexicons.load(r.get("stopwords"), r.get("lemmas"), r.get("extra_stopwords"), r.get("wordlist"))
    result = preprocess.preprocess_tweets(tweets, lex, cfg.min_count, cfg.threshold)
    _write_jsonl(cfg.output / DOCUMENTS, (d.to_dict() for d in result.documents))
    with open(cfg.output / PHRASES, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(result.phrases.to_tsv())
    counts = {"tweets": len(tweets), "documents": len(result.documents), "dropped_short": result.dropped_short,
              "phrases": len(result.phrases.scores)}
    write_manifest(cfg, "preprocess",
                   {TWEETS: cfg.output / TWEETS, **_resource_inputs(cfg, "stopwords", "lemmas", "extra_stopwords", "wordlist")},
                   {DOCUMENTS: cfg.output / DOCUMENTS, PHRASES: cfg.output / PHRASES}, {"counts": counts})
    return counts


def _score_row(sc: sentiment.SentimentScore) -> dict:
    return {"pos": sc.pos, "neu": sc.neu, "neg": sc.neg, "compound": sc.compound,
            "polarity": sentiment.classify(sc).value}


def cmd_sentiment(cfg: RunConfig, texts: Optional[str] = None) -> dict:
    lex = _sentiment_lexicon(cfg)
    cfg.output.mkdir(parents=True, exist_ok=True)
    if texts is not None:
        src = Path(texts)
        if not src.is_file():
            raise usage_error(f"texts file not found: {texts}")
        lines = src.read_text(encoding="utf-8").splitlines()
        out = cfg.output / "scores.jsonl"
        _write_jsonl(out, ({"text": t, **_score_row(sentiment.score(t, lex))} for t in lines if t.strip()))
        inputs, outputs = {"texts": src}, {"scores.jsonl": out}
    else:
        tweets = _load_tweets(cfg)
        out = cfg.output / SENTIMENT
        scores = sentiment.score_many([t.text for t in tweets], lex, workers=cfg.threads)
        _write_jsonl(out, ({"id": t.id, **_score_row(sc)} for t, sc in zip(tweets, scores)))
        inputs, outputs = {TWEETS: cfg.output / TWEETS}, {SENTIMENT: out}
    counts = {p.value: 0 for p in sentiment.Polarity}
    for row in _read_jsonl(out):
        counts[row["polarity"]] += 1
    write_manifest(cfg, "sentiment", {**inputs, **_resource_inputs(cfg, "lexicon")}, outputs, {"counts": counts})
    return counts


def _lda_cfg(cfg: RunConfig, K: Optional[int] = None) -> topicmodel.LdaConfig:
    lda = replace(cfg.lda, seed=cfg.seed)
    return replace(lda, K=K) if K is not None else lda


def _run_sweep(cfg: RunConfig, docs, k_range):
    if not docs:
        raise CliError("no documents to model", EXIT_DATA)
    result, models = topicmodel.sweep_k(docs, k_range, _lda_cfg(cfg), threads=cfg.threads, keep_models=True)
    report.write_json(cfg.output / COHERENCE, report._round_floats(result.as_dict(), 12))
    if result.best_k is None:
        raise CliError(f"every K failed: {result.failed}", EXIT_DATA)
    return result, models


def cmd_topics(cfg: RunConfig) -> dict:
    docs = _load_documents(cfg)
    outputs = {}
    extra = {}
    if cfg.k_range is not None:
        result, models = _run_sweep(cfg, docs, cfg.k_range)
        model = models[result.best_k]
        outputs[COHERENCE] = cfg.output / COHERENCE
        extra["best_k"] = result.best_k
    else:
        if not docs:
            raise CliError("no documents to model", EXIT_DATA)
        try:
            model = topicmodel.fit(docs, _lda_cfg(cfg))
        except ValueError as exc:
            raise CliError(str(exc), EXIT_DATA) from exc
    model.save(cfg.output / MODEL)
    outputs[MODEL] = cfg.output / MODEL
    write_manifest(cfg, "topics", {DOCUMENTS: cfg.output / DOCUMENTS}, outputs, extra)
    return {"K": model.K, **extra}


def cmd_sweep_k(cfg: RunConfig) -> dict:
    if cfg.k_range is None:
        raise usage_error("sweep-k needs --k-range or [lda] k_range")
    docs = _load_documents(cfg)
    result, _ = _run_sweep(cfg, docs, cfg.k_range)
    write_manifest(cfg, "sweep-k", {DOCUMENTS: cfg.output / DOCUMENTS}, {COHERENCE: cfg.output / COHERENCE},
                   {"best_k": result.best_k})
    return result.as_dict()


def cmd_report(cfg: RunConfig, svg: bool = True) -> dict:
    docs = _load_documents(cfg)
    sent_path = _need(cfg.output / SENTIMENT, "sentiment")
    model_path = _need(cfg.output / MODEL, "topics")
    try:
        polarity_of = {r["id"]: r["polarity"] for r in _read_jsonl(sent_path)}
        model = topicmodel.TopicModel.load(model_path)
    except (KeyError, ValueError) as exc:
        raise CliError(f"bad upstream artifact: {exc}", EXIT_DATA) from exc
    missing = [d.tweet_id for d in docs if d.tweet_id not in polarity_of]
    if missing:
        raise CliError(f"{len(missing)} documents have no sentiment score (e.g. {missing[0]})", EXIT_DATA)
    if [d.tweet_id for d in docs] != list(model.doc_ids):
        raise CliError("model was fitted on a different document set; rerun `tweetmine topics`", EXIT_DATA)
    outdir = cfg.output / REPORT_DIR
    files = report.build_report(outdir, docs, polarity_of, model, _sentiment_lexicon(cfg),
                                report.ReportOptions(svg=svg))
    write_manifest(cfg, "report",
                   {DOCUMENTS: cfg.output / DOCUMENTS, SENTIMENT: sent_path, MODEL: model_path,
                    **_resource_inputs(cfg, "lexicon")},
                   {f"{REPORT_DIR}/{f}": outdir / f for f in files})
    return {"files": files}


# argument parsing ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML config file")
    common.add_argument("--output", help="work directory (default: [run] output or ./out)")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--threads", type=int, help="max worker threads")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="tweetmine", description="Tweet corpus sentiment and topic mining.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", parents=[common], help="CSV -> tweet snapshot")
    s.add_argument("--input", help="tweet CSV (overrides [input] path)")
    sub.add_parser("preprocess", parents=[common], help="tweets -> token documents")
    s = sub.add_parser("sentiment", parents=[common], help="score tweets or a text file")
    s.add_argument("--texts", help="score one text per line instead of the snapshot")
    s.add_argument("--lexicon", help="alternative token<TAB>valence lexicon")
    for name in ("topics", "sweep-k"):
        s = sub.add_parser(name, parents=[common], help="fit LDA" if name == "topics" else "coherence sweep over K")
        g = s.add_mutually_exclusive_group()
        g.add_argument("--k", type=int, help="number of topics")
        g.add_argument("--k-range", help="'a..b' inclusive or 'k1,k2,...'")
        s.add_argument("--iterations", type=int)
    s = sub.add_parser("report", parents=[common], help="write the report bundle")
    s.add_argument("--no-svg", action="store_true", help="skip SVG charts")
    return p


def resolve(args) -> RunConfig:
    cfg = load_config(args.config)
    if args.output:
        cfg.output = Path(args.output)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.threads is not None:
        cfg.threads = args.threads
    if getattr(args, "input", None):
        cfg.input = Path(args.input)
    if getattr(args, "lexicon", None):
        cfg.resources["lexicon"] = Path(args.lexicon)
    if getattr(args, "k", None) is not None:
        cfg.lda = replace(cfg.lda, K=args.k)
        cfg.k_range = None
    if getattr(args, "k_range", None) is not None:
        cfg.k_range = parse_k_range(args.k_range)
    if getattr(args, "iterations", None) is not None:
        it = args.iterations
        cfg.lda = replace(cfg.lda, iterations=it, burn_in=min(cfg.lda.burn_in, max(0, it - 1)))
    cfg.lda = replace(cfg.lda, seed=cfg.seed)
    cfg.validate()
    return cfg


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve(args)
        if args.command == "ingest":
            summary = cmd_ingest(cfg)
        elif args.command == "preprocess":
            summary = cmd_preprocess(cfg)
        elif args.command == "sentiment":
            summary = cmd_sentiment(cfg, args.texts)
        elif args.command == "topics":
            summary = cmd_topics(cfg)
        elif args.command == "sweep-k":
            summary = cmd_sweep_k(cfg)
        else:
            summary = cmd_report(cfg, svg=not args.no_svg)
    except CliError as exc:
        print(f"tweetmine {args.command}: {exc}", file=sys.stderr)
        return exc.code
    except (ValueError, OSError) as exc:
        # malformed resource files and the like
        print(f"tweetmine {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
