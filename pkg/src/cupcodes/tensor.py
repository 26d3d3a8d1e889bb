"""Labelled bit tensors (logical action tables) and their text format."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

__all__ = ["LogicalActionTensor", "format_tensor", "parse_tensor", "read_tensor", "write_tensor"]


@dataclass(frozen=True, eq=False)
class LogicalActionTensor:
    """Bit tensor whose axes are indexed by logical-class labels, one axis per copy."""

    values: np.ndarray
    labels: tuple[tuple[str, ...], ...]

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.uint8) & 1
        labs = tuple(tuple(str(s) for s in axis) for axis in self.labels)
        if vals.ndim != len(labs) or any(vals.shape[a] != len(labs[a]) for a in range(vals.ndim)):
            raise InputError(f"tensor shape {vals.shape} does not match label counts")
        for axis in labs:
            if any(not s or any(ch.isspace() for ch in s) for s in axis):
                raise InputError("tensor labels must be non-empty and contain no whitespace")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "labels", labs)

    @classmethod
    def unlabelled(cls, values: np.ndarray) -> "LogicalActionTensor":
        values = np.asarray(values)
        return cls(values, tuple(tuple(f"{a}:{i}" for i in range(n)) for a, n in enumerate(values.shape)))

    @property
    def arity(self) -> int:
        return self.values.ndim

    @property
    def shape(self) -> tuple[int, ...]:
        return self.values.shape

    def nonzero(self) -> list[tuple[int, ...]]:
        return [tuple(int(i) for i in idx) for idx in np.argwhere(self.values)]

    @property
    def nnz(self) -> int:
        return int(self.values.sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LogicalActionTensor):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.values, other.values)


def format_tensor(T: LogicalActionTensor) -> str:
    out = ["tensor " + " ".join(str(d) for d in T.shape)]
    for a, axis in enumerate(T.labels):
        out.append(f"labels {a} " + " ".join(axis))
    out += [" ".join(str(i) for i in idx) for idx in T.nonzero()]
    return "\n".join(out) + "\n"


def parse_tensor(text: str) -> LogicalActionTensor:
    lines = [l for l in text.split("\n") if l.strip()]
    if not lines or not lines[0].startswith("tensor"):
        raise InputError("missing tensor header")
    try:
        shape = tuple(int(t) for t in lines[0].split()[1:])
    except ValueError as exc:
        raise InputError("bad tensor header") from exc
    labels: list[tuple[str, ...]] = []
    i = 1
    for a in range(len(shape)):
        parts = lines[i].split() if i < len(lines) else []
        if len(parts) < 2 or parts[0] != "labels" or parts[1] != str(a):
            raise InputError(f"expected 'labels {a}' line")
        labels.append(tuple(parts[2:]))
        i += 1
    vals = np.zeros(shape, dtype=np.uint8)
    for line in lines[i:]:
        try:
            idx = tuple(int(t) for t in line.split())
        except ValueError as exc:
            raise InputError(f"bad tensor entry {line!r}") from exc
        if len(idx) != len(shape) or any(not 0 <= x < d for x, d in zip(idx, shape)):
            raise InputError(f"tensor entry out of range: {line!r}")
        vals[idx] = 1
    return LogicalActionTensor(vals, tuple(labels))


def read_tensor(path) -> LogicalActionTensor:
    with open(path, encoding="utf-8") as fh:
        return parse_tensor(fh.read())


def write_tensor(T: LogicalActionTensor, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_tensor(T))
