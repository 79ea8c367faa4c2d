"""Deterministic sub-seed derivation.

Every random stream in a run is derived from one root seed plus a label
path, so adding users/sessions to an experiment never perturbs the
streams of existing ones.
"""

import hashlib


def derive_seed(root: int, *parts) -> int:
    """Derive a stable 63-bit sub-seed from a root seed and label parts.

    Uses SHA-256 of the joined textual path, so results do not depend on
    Python's per-process hash randomization.
    """
    text = "/".join([str(root), *[str(p) for p in parts]])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1
