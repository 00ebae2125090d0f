"""MSMF dataset files and JSON result files.

MSMF is line oriented UTF-8 text::

    MSMF1
    dim <D>
    sets <N>
    sizes <n_1> ... <n_N>
    labels <0|1>
    meta <key> <json string>          (zero or more)
    set <index> <json string set id>  (then, per set:)
    dummy <n_i tokens of 0|1>
    <D floats>                        (n_i lines, one node per line)
    label <n_i ints>                  (only when labels is 1)
    end

Floats are written with ``repr`` so reading them back is bit-exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .consistency import MatchConfiguration, StarConfiguration
from .data import DataError, Dataset, FeatureMatrix

MAGIC = "MSMF1"
RESULT_FORMAT = "msm-result-1"


class MsmfError(DataError):
    """Malformed MSMF file."""


def dumps(dataset: Dataset) -> str:
    lines = [
        MAGIC,
        f"dim {dataset.dim}",
        f"sets {dataset.n_sets}",
        "sizes " + " ".join(str(n) for n in dataset.sizes),
        f"labels {int(dataset.labels is not None)}",
    ]
    for key, value in dataset.meta.items():
        if not key or any(ch.isspace() for ch in key):
            raise MsmfError(f"meta key {key!r} must be non-empty without whitespace")
        lines.append(f"meta {key} {json.dumps(str(value))}")
    for i, s in enumerate(dataset.sets):
        lines.append(f"set {i} {json.dumps(s.set_id)}")
        lines.append("dummy " + " ".join("1" if d else "0" for d in s.dummy))
        for t in range(s.n):
            lines.append(" ".join(repr(float(x)) for x in s.features[:, t]))
        if dataset.labels is not None:
            lines.append("label " + " ".join(str(int(x)) for x in dataset.labels[i]))
    lines.append("end")
    return "\n".join(lines) + "\n"


class _Lines:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.pos = 0

    def next(self) -> str:
        while self.pos < len(self.lines):
            line = self.lines[self.pos].strip()
            self.pos += 1
            if line:
                return line
        raise MsmfError("unexpected end of file")

    def keyword(self, word: str) -> str:
        line = self.next()
        head, _, rest = line.partition(" ")
        if head != word:
            raise MsmfError(f"line {self.pos}: expected {word!r}, got {line[:40]!r}")
        return rest.strip()


def _ints(text: str, what: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split()]
    except ValueError as exc:
        raise MsmfError(f"bad integer in {what}: {exc}") from None


def _json_string(text: str, what: str) -> str:
    try:
        value = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MsmfError(f"bad quoted string in {what}: {exc}") from None
    if not isinstance(value, str):
        raise MsmfError(f"{what} must be a quoted string")
    return value


def loads(text: str) -> Dataset:
    try:
        return _parse(text)
    except MsmfError:
        raise
    except ValueError as exc:
        raise MsmfError(f"malformed MSMF: {exc}") from None


def _parse(text: str) -> Dataset:
    r = _Lines(text)
    if r.next() != MAGIC:
        raise MsmfError(f"not an MSMF file (missing {MAGIC} header)")
    (dim,) = _ints(r.keyword("dim"), "dim")
    (n_sets,) = _ints(r.keyword("sets"), "sets")
    sizes = _ints(r.keyword("sizes"), "sizes")
    (has_labels,) = _ints(r.keyword("labels"), "labels")
    if len(sizes) != n_sets or dim < 1 or n_sets < 1 or has_labels not in (0, 1):
        raise MsmfError("inconsistent header")
    meta = {}
    line = r.next()
    while line.startswith("meta "):
        parts = line.split(" ", 2)
        if len(parts) != 3:
            raise MsmfError(f"line {r.pos}: meta needs a key and a value")
        meta[parts[1]] = _json_string(parts[2], f"meta {parts[1]}")
        line = r.next()
    r.pos -= 1
    sets, labels = [], ([] if has_labels else None)
    for i, n in enumerate(sizes):
        idx_text, _, sid = r.keyword("set").partition(" ")
        if _ints(idx_text, "set index") != [i]:
            raise MsmfError(f"set blocks out of order at set {i}")
        set_id = _json_string(sid, f"set {i} id")
        dummy = _ints(r.keyword("dummy"), "dummy")
        if len(dummy) != n:
            raise MsmfError(f"set {i}: dummy mask has {len(dummy)} entries, expected {n}")
        cols = []
        for t in range(n):
            toks = r.next().split()
            if len(toks) != dim:
                raise MsmfError(f"set {i} node {t}: expected {dim} values, got {len(toks)}")
            try:
                cols.append([float(x) for x in toks])
            except ValueError as exc:
                raise MsmfError(f"set {i} node {t}: {exc}") from None
        feats = np.array(cols, dtype=np.float64).T.copy()
        sets.append(FeatureMatrix(feats, set_id, np.array(dummy, dtype=bool)))
        if labels is not None:
            lab = _ints(r.keyword("label"), "label")
            if len(lab) != n:
                raise MsmfError(f"set {i}: {len(lab)} labels for {n} nodes")
            labels.append(np.array(lab, dtype=np.int64))
    if r.next() != "end":
        raise MsmfError("missing end marker")
    return Dataset(sets, labels, meta)


def write_dataset(dataset: Dataset, path) -> None:
    Path(path).write_text(dumps(dataset), encoding="utf-8")


def read_dataset(path) -> Dataset:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise MsmfError(f"cannot read {path}: {exc}") from None
    return loads(text)


def result_to_dict(method: str, config: MatchConfiguration, star: StarConfiguration | None = None, trace=None) -> dict:
    out = {
        "format": RESULT_FORMAT,
        "method": method,
        "n_sets": config.n_sets,
        "n": config.n,
        "pairs": [[i, j, p.tolist()] for (i, j), p in sorted(config.pairs.items())],
        "star": None,
    }
    if star is not None:
        out["star"] = {
            "reference": star.reference,
            "maps": {str(i): p.tolist() for i, p in sorted(star.maps.items())},
        }
    if trace is not None:
        out["trace"] = {
            "reference": trace.reference,
            "order": list(trace.order),
            "init_lap_calls": trace.init_lap_calls,
            "lap_calls": trace.lap_calls,
            "records": [vars(rec) for rec in trace.records],
        }
    return out


def write_result(path, method: str, config: MatchConfiguration, star=None, trace=None) -> None:
    Path(path).write_text(json.dumps(result_to_dict(method, config, star, trace), indent=1) + "\n", encoding="utf-8")


def read_result(path) -> tuple[str, MatchConfiguration, StarConfiguration | None]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read result file {path}: {exc}") from None
    if doc.get("format") != RESULT_FORMAT:
        raise DataError(f"{path} is not a result file")
    pairs = {(int(i), int(j)): np.array(p, dtype=np.int64) for i, j, p in doc["pairs"]}
    config = MatchConfiguration(int(doc["n_sets"]), int(doc["n"]), pairs)
    star = None
    if doc.get("star"):
        s = doc["star"]
        star = StarConfiguration(
            int(s["reference"]),
            {int(i): np.array(p, dtype=np.int64) for i, p in s["maps"].items()},
            config.n_sets,
            config.n,
        )
    return doc["method"], config, star
