"""Run manifests: digests tying outputs to the exact configuration.

The manifest records a sha256 of the canonicalized config and of every
output file. Reruns of the same config produce byte-identical outputs, so
their manifests carry identical digests; only the created timestamp in the
manifest itself differs between runs.
"""

from __future__ import annotations

import datetime
import hashlib
import os

from . import __version__
from .tableio import write_json

MANIFEST_NAME = "manifest.json"


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(out_dir: str, command: str, config_bytes: bytes,
                   output_names, extra: dict | None = None) -> str:
    """Digest the outputs in out_dir and write the manifest next to them."""
    outputs = {}
    for name in sorted(output_names):
        outputs[name] = sha256_file(os.path.join(out_dir, name))
    manifest = {
        "schema_version": 1,
        "tool": "thirrsim",
        "version": __version__,
        "command": command,
        "config_sha256": sha256_bytes(config_bytes),
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "outputs": outputs,
    }
    if extra:
        manifest["extra"] = extra
    path = os.path.join(out_dir, MANIFEST_NAME)
    write_json(path, manifest)
    return path
