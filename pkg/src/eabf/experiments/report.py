"""Run-report assembly: one directory per run, delimited data plus figures.

Everything written here is deterministic given (config, seed): floats are
serialized with shortest-roundtrip repr, keys are sorted, and no timestamps
appear anywhere.
"""

from __future__ import annotations

import json
import os


class RunReport:
    def __init__(self, out_dir):
        self.out_dir = str(out_dir)
        os.makedirs(self.out_dir, exist_ok=True)
        os.makedirs(os.path.join(self.out_dir, "figures"), exist_ok=True)
        os.makedirs(os.path.join(self.out_dir, "chains"), exist_ok=True)

    def path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    def figure_path(self, name: str) -> str:
        return os.path.join(self.out_dir, "figures", name)

    def chain_path(self, name: str) -> str:
        return os.path.join(self.out_dir, "chains", name)

    def write_json(self, name: str, obj) -> None:
        with open(self.path(name), "w") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=True)
            fh.write("\n")

    def write_csv(self, name: str, header, rows) -> None:
        """Delimited output; floats via repr for lossless, stable text."""
        with open(self.path(name), "w") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_cell(v) for v in row) + "\n")


def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, bool):
        return str(v).lower()
    return str(v)
