"""
Result Store - writes and reads campaign logs, manifests and replay traces
"""
import json
import logging
from pathlib import Path
from typing import Iterable, List, Union

from pydantic import ValidationError

from app.exceptions import ResultIOError
from app.models import CampaignManifest, OutcomeRecord
from app.services.simulator import Trace, iter_trace_jsonl
from app.utils.hash_utils import calculate_file_hash

logger = logging.getLogger(__name__)

RECORDS_FILE = "records.jsonl"
MANIFEST_FILE = "manifest.json"


class ResultStore:
    def __init__(self, out_dir: Union[str, Path] = "results"):
        self.out_dir = Path(out_dir)
        self.records_file = self.out_dir / RECORDS_FILE
        self.manifest_file = self.out_dir / MANIFEST_FILE

    def _ensure_dir(self):
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ResultIOError(f"Cannot create output directory {self.out_dir}: {e}") from e

    def write_records(self, records: Iterable[OutcomeRecord]) -> Path:
        """One record per line, in execution order"""
        self._ensure_dir()
        try:
            with open(self.records_file, "w", newline="\n") as f:
                for record in records:
                    f.write(record.model_dump_json())
                    f.write("\n")
        except OSError as e:
            raise ResultIOError(f"Cannot write result log {self.records_file}: {e}") from e
        logger.info(f"Result log written to {self.records_file} (sha256 {calculate_file_hash(self.records_file)[:12]})")
        return self.records_file

    def write_manifest(self, manifest: CampaignManifest) -> Path:
        self._ensure_dir()
        try:
            with open(self.manifest_file, "w") as f:
                json.dump(manifest.model_dump(mode="json"), f, indent=2)
        except OSError as e:
            raise ResultIOError(f"Cannot write manifest {self.manifest_file}: {e}") from e
        return self.manifest_file

    def write_trace(self, trace: Trace, name: str) -> Path:
        self._ensure_dir()
        path = self.out_dir / name
        try:
            with open(path, "w", newline="\n") as f:
                for line in iter_trace_jsonl(trace):
                    f.write(line)
                    f.write("\n")
        except OSError as e:
            raise ResultIOError(f"Cannot write trace {path}: {e}") from e
        logger.info(f"Trace written to {path}")
        return path

    def load_manifest(self) -> CampaignManifest:
        if not self.manifest_file.exists():
            raise ResultIOError(f"Manifest not found: {self.manifest_file}")
        try:
            with open(self.manifest_file, "r") as f:
                return CampaignManifest.model_validate(json.load(f))
        except (OSError, json.JSONDecodeError, ValidationError) as e:
            raise ResultIOError(f"Cannot read manifest {self.manifest_file}: {e}") from e


def load_records(log_path: Union[str, Path]) -> List[OutcomeRecord]:
    path = Path(log_path)
    if not path.exists():
        raise ResultIOError(f"Result log not found: {path}")
    records = []
    try:
        with open(path, "r") as f:
            for lineno, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    records.append(OutcomeRecord.model_validate_json(line))
                except ValidationError as e:
                    raise ResultIOError(f"{path}:{lineno}: malformed record: {e}") from e
    except OSError as e:
        raise ResultIOError(f"Cannot read result log {path}: {e}") from e
    return records
