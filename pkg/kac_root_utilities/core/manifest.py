"""Run manifests: what a command did and digests of the files it wrote."""

import logging
import time
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import ValidationError as PydanticValidationError

from ..models.reports import RunManifest
from .exceptions import DataError
from .utils import (
    ensure_directory,
    file_digest,
    load_from_file,
    save_to_file,
    to_jsonable,
    write_csv,
)

logger = logging.getLogger(__name__)

CSV_SCHEMA_VERSION = 1
MANIFEST_NAME = "manifest.json"


class RunRecorder:
    """Collects the output files of one command and writes ``manifest.json``."""

    def __init__(
        self,
        command: str,
        out_dir: Union[str, Path],
        argv: List[str],
        parameters: Dict[str, Any],
        seed: Optional[int] = None,
    ):
        self.command = command
        self.out_dir = ensure_directory(out_dir)
        self.argv = list(argv)
        self.parameters = to_jsonable(parameters)
        self.seed = seed
        self.outputs: List[Path] = []
        self._started = time.monotonic()
        self._started_at = datetime.now(timezone.utc).isoformat(timespec="seconds")

    def write_csv(self, name: str, rows: List[Dict[str, Any]], columns: List[str]) -> Path:
        path = write_csv(rows, self.out_dir / name, columns)
        self.outputs.append(path)
        return path

    def write_json(self, name: str, data: Any) -> Path:
        path = save_to_file(data, self.out_dir / name, "json")
        self.outputs.append(path)
        return path

    def finish(self) -> RunManifest:
        from .. import __version__

        manifest = RunManifest(
            command=self.command,
            argv=self.argv,
            parameters=self.parameters,
            seed=self.seed,
            version=__version__,
            csv_schema_version=CSV_SCHEMA_VERSION,
            started_at=self._started_at,
            duration_seconds=round(time.monotonic() - self._started, 6),
            outputs={p.name: file_digest(p) for p in sorted(self.outputs)},
        )
        save_to_file(manifest, self.out_dir / MANIFEST_NAME, "json")
        logger.info("Wrote %d outputs and a manifest to %s", len(self.outputs), self.out_dir)
        return manifest


def load_manifest(path: Union[str, Path]) -> RunManifest:
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    try:
        return RunManifest(**load_from_file(path))
    except FileNotFoundError as e:
        raise DataError(str(e), "manifest")
    except (TypeError, PydanticValidationError) as e:
        raise DataError(f"invalid manifest {path}: {e}", "manifest")


def replay_argv(manifest: RunManifest, out_dir: Union[str, Path]) -> List[str]:
    """The recorded argv with every ``--out`` replaced by ``out_dir``."""
    argv: List[str] = []
    skip = False
    for arg in manifest.argv:
        if skip:
            skip = False
            continue
        if arg == "--out":
            skip = True
            continue
        if arg.startswith("--out="):
            continue
        argv.append(arg)
    return argv + ["--out", str(out_dir)]


def digest_mismatches(expected: RunManifest, actual: RunManifest) -> List[str]:
    """Names of outputs whose digests differ or that are missing."""
    names = sorted(set(expected.outputs) | set(actual.outputs))
    return [n for n in names if expected.outputs.get(n) != actual.outputs.get(n)]
