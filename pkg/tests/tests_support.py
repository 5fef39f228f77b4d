"""Shared helpers for the test suite."""

import hashlib
import os


def dir_digest(root, exclude=()):
    """Stable digest of every file under root (relative path + content)."""
    h = hashlib.sha256()
    for dirpath, dirnames, filenames in sorted(os.walk(root)):
        dirnames.sort()
        for name in sorted(filenames):
            if name in exclude:
                continue
            rel = os.path.relpath(os.path.join(dirpath, name), root)
            h.update(rel.encode())
            with open(os.path.join(dirpath, name), "rb") as fh:
                h.update(fh.read())
    return h.hexdigest()
