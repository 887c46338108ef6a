"""On-disk JSON cache for computed correlator series.

Files are content-addressed by their key and carry a schema tag; corrupt or
version-mismatched entries are ignored and recomputed.  Writes go to a
temporary file and are renamed into place, so concurrent writers of the
same key are harmless (identical content, last writer wins).

The directory is OGWLOC_CACHE_DIR if set, else .ogwloc-cache under the
current directory.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Optional

from .algebra import RationalFunction
from .series import Series, TruncationSpec

SCHEMA = 1


def cache_dir() -> Path:
    return Path(os.environ.get("OGWLOC_CACHE_DIR", ".ogwloc-cache"))


def _key_payload(key) -> dict:
    return {"m": key.m, "a": key.a, "q_cap": key.q_cap, "eta_caps": list(key.eta_caps)}


def _path_for(key) -> Path:
    payload = json.dumps(_key_payload(key), sort_keys=True)
    digest = hashlib.sha256(payload.encode()).hexdigest()[:16]
    return cache_dir() / f"correlator-{key.m}-{key.a}-{digest}.json"


def store_series(key, series: Series) -> None:
    path = _path_for(key)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = {
        "schema": SCHEMA,
        "key": _key_payload(key),
        "series": series.to_json(lambda rf: rf.to_json()),
    }
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(data, fh, sort_keys=True)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_cached_series(key, ring) -> Optional[Series]:
    path = _path_for(key)
    if not path.exists():
        return None
    try:
        with open(path) as fh:
            data = json.load(fh)
        if data.get("schema") != SCHEMA or data.get("key") != _key_payload(key):
            return None
        raw = data["series"]
        nvars = 2 * key.m + 2
        spec = TruncationSpec(raw["caps"])
        coeffs = {tuple(e): RationalFunction.from_json(nvars, c) for e, c in raw["coeffs"]}
        return Series(raw["vars"], spec, ring, coeffs)
    except (json.JSONDecodeError, KeyError, ValueError, OSError):
        return None
