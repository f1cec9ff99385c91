"""Post table IO: tab-separated, one header line, strict field checks.

Columns are exactly (post_id, user_id, target, stance, text). Stance
values FAVOR/AGAINST are case-insensitive and map to 0/1. Loader errors
carry path and line number.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .metrics import AGAINST, FAVOR, STANCES

COLUMNS = ("post_id", "user_id", "target", "stance", "text")

_STANCE_CODE = {"favor": FAVOR, "against": AGAINST}


class PostFileError(ValueError):
    pass


@dataclass
class PostTable:
    post_ids: list[str]
    user_ids: list[str]
    targets: list[str]
    stances: np.ndarray  # int64, 0 favor / 1 against
    texts: list[str]

    def __post_init__(self) -> None:
        n = len(self.post_ids)
        self.stances = np.asarray(self.stances, dtype=np.int64)
        if not (len(self.user_ids) == len(self.targets) == len(self.texts)
                == self.stances.shape[0] == n):
            raise ValueError("post table columns have mismatched lengths")

    def __len__(self) -> int:
        return len(self.post_ids)

    def subset(self, idx: np.ndarray) -> "PostTable":
        idx = np.asarray(idx, dtype=np.int64)
        return PostTable(
            post_ids=[self.post_ids[i] for i in idx],
            user_ids=[self.user_ids[i] for i in idx],
            targets=[self.targets[i] for i in idx],
            stances=self.stances[idx],
            texts=[self.texts[i] for i in idx],
        )

    def indices_for_target(self, target: str) -> np.ndarray:
        return np.array([i for i, t in enumerate(self.targets) if t == target],
                        dtype=np.int64)

    def target_names(self) -> list[str]:
        seen: dict[str, None] = {}
        for t in self.targets:
            seen.setdefault(t)
        return list(seen)


def load_posts(path: str | Path) -> PostTable:
    post_ids: list[str] = []
    user_ids: list[str] = []
    targets: list[str] = []
    stances: list[int] = []
    texts: list[str] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if tuple(header.split("\t")) != COLUMNS:
            raise PostFileError(
                f"{path}:1: header must be {chr(9).join(COLUMNS)!r}, got {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise PostFileError(f"{path}:{lineno}: expected 5 tab-separated fields, got {len(parts)}")
            pid, uid, target, stance, text = parts
            if pid in seen:
                raise PostFileError(f"{path}:{lineno}: duplicate post_id {pid!r}")
            seen.add(pid)
            code = _STANCE_CODE.get(stance.lower())
            if code is None:
                raise PostFileError(
                    f"{path}:{lineno}: stance must be FAVOR or AGAINST (any case), got {stance!r}")
            post_ids.append(pid)
            user_ids.append(uid)
            targets.append(target)
            stances.append(code)
            texts.append(text)
    return PostTable(post_ids=post_ids, user_ids=user_ids, targets=targets,
                     stances=np.array(stances, dtype=np.int64), texts=texts)


def save_posts(path: str | Path, table: PostTable) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(COLUMNS) + "\n")
        for i in range(len(table)):
            row = (table.post_ids[i], table.user_ids[i], table.targets[i],
                   STANCES[table.stances[i]].upper(), table.texts[i])
            for cell in row:
                if "\t" in cell or "\n" in cell:
                    raise ValueError(f"field {cell!r} contains a tab or newline")
            fh.write("\t".join(row) + "\n")
