"""Rebuild tests/golden/report from the fixture pipeline.

    python3 tests/fixtures/regen_golden.py

Only run this after an intentional output change, and review the diff.
"""
import shutil
import tempfile
from pathlib import Path

from tweetmine.cli import run

HERE = Path(__file__).parent
GOLDEN = HERE.parent / "golden" / "report"


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        for cmd in ("ingest", "preprocess", "sentiment", "topics", "report"):
            code = run([cmd, "--config", str(HERE / "pipeline.toml"), "--output", tmp])
            assert code == 0, cmd
        if GOLDEN.exists():
            shutil.rmtree(GOLDEN)
        shutil.copytree(Path(tmp) / "report", GOLDEN)
    print(f"wrote {GOLDEN}")


if __name__ == "__main__":
    main()
