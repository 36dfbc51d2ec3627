"""
Hash utilities for config digests and result logs
"""
import hashlib
import json
from pathlib import Path
from typing import Any, Union

from pydantic import BaseModel


def canonical_json(value: Any) -> str:
    """Key-sorted compact JSON; pydantic models are dumped in JSON mode first"""
    if isinstance(value, BaseModel):
        value = value.model_dump(mode="json")
    return json.dumps(value, sort_keys=True, separators=(",", ":"))


def calculate_bytes_hash(content: bytes) -> str:
    """Calculate SHA256 hash of raw bytes"""
    return hashlib.sha256(content).hexdigest()


def config_digest(config: Union[bytes, BaseModel]) -> str:
    """Digest of the config file bytes, or of the canonical JSON of an in-memory config"""
    if isinstance(config, bytes):
        return calculate_bytes_hash(config)
    return calculate_bytes_hash(canonical_json(config).encode("utf-8"))


def calculate_file_hash(file_path: Union[str, Path]) -> str:
    """Calculate SHA256 hash of file content"""
    path = Path(file_path)
    if not path.exists():
        raise FileNotFoundError(f"File not found: {file_path}")

    sha256_hash = hashlib.sha256()
    with open(path, "rb") as f:
        # Read file in chunks to handle large logs
        for byte_block in iter(lambda: f.read(4096), b""):
            sha256_hash.update(byte_block)

    return sha256_hash.hexdigest()
