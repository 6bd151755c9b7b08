"""Run manifests: enough provenance beside each output to re-run the step."""

import hashlib
import json
import platform
import time
from pathlib import Path


def _file_sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def _versions() -> dict:
    import numpy
    import torch

    from . import __version__

    return {
        "pomo": __version__,
        "python": platform.python_version(),
        "numpy": numpy.__version__,
        "torch": torch.__version__,
    }


def manifest_path_for(output) -> Path:
    output = Path(output)
    if output.is_dir():
        return output / "manifest.json"
    return output.with_name(output.name + ".manifest.json")


def write_manifest(output, command: str, config: dict, inputs: list, seed=None) -> Path:
    """Record command, config, seeded inputs, and versions beside an output."""
    record = {
        "command": command,
        "config": config,
        "inputs": [
            {"path": str(p), "sha256": _file_sha256(Path(p))}
            for p in inputs
            if Path(p).is_file()
        ],
        "seed": seed,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "versions": _versions(),
    }
    path = manifest_path_for(output)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(record, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return path
