"""Candidate ingestion and bank-directory persistence.

A bank directory holds:
  manifest.json     round, config, dimension, bank member order, checksum
  entries.jsonl     ranked bank entries, one JSON object per line
  scores.jsonl      final-batch candidate score records
  history_rows.bin  bank rows of the final responsibility matrix (f32)
  history_cols.bin  bank columns of the same matrix (f32)
  participants.bin  embeddings of every final-batch participant (f32)

Binary files are little-endian float32, row-major, preceded by a 16-byte
header: magic "PIBE", version u16, rows u32, cols u32, 2 pad bytes.
"""
from __future__ import annotations

import contextlib
import hashlib
import json
import os
import struct
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .core import BankEntry, CandidatePoint, EvolutionConfig, validate_pool
from .errors import (
    BankLocked,
    ChecksumMismatch,
    CorruptHeader,
    EmptyPool,
    InsbankError,
    ParseError,
    VersionUnsupported,
)
from .evolution import BankState
from .history import HistoryBlocks

MAGIC = b"PIBE"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHIIxx")  # 16 bytes
_HASHED_FILES = (
    "entries.jsonl",
    "scores.jsonl",
    "history_rows.bin",
    "history_cols.bin",
    "participants.bin",
)


def ingest_candidates(path: str | os.PathLike) -> list[CandidatePoint]:
    """Read line-delimited candidate records {id, embedding, quality, source?,
    meta?} and return a validated pool. Errors carry the 1-based line number."""
    points = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                point = CandidatePoint(
                    id=str(rec["id"]),
                    embedding=np.asarray(rec["embedding"], dtype=np.float64),
                    quality=float(rec["quality"]),
                    source=str(rec.get("source", "")),
                    meta=rec.get("meta"),
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"line {lineno}: {exc}", line=lineno) from exc
            except InsbankError as exc:
                raise type(exc)(f"line {lineno}: {exc}") from exc
            points.append(point)
    if not points:
        raise EmptyPool(f"{path}: no candidate records")
    return validate_pool(points)


def write_candidates(points: Sequence[CandidatePoint], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in points:
            fh.write(_dumps(_point_record(p)) + "\n")


def _point_record(p: CandidatePoint) -> dict:
    rec = {"id": p.id, "embedding": list(p.embedding), "quality": p.quality}
    if p.source:
        rec["source"] = p.source
    if p.meta:
        rec["meta"] = dict(p.meta)
    return rec


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def write_matrix_f32(values: np.ndarray, path: Path) -> None:
    arr = np.ascontiguousarray(values, dtype="<f4")
    rows, cols = arr.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, rows, cols))
        fh.write(arr.tobytes())


def read_matrix_f32(path: Path) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise CorruptHeader(f"{path}: truncated header")
        magic, version, rows, cols = _HEADER.unpack(head)
        if magic != MAGIC:
            raise CorruptHeader(f"{path}: bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise VersionUnsupported(f"{path}: version {version}")
        payload = fh.read()
    expected = rows * cols * 4
    if len(payload) != expected:
        raise CorruptHeader(f"{path}: payload size {len(payload)} != {expected}")
    return np.frombuffer(payload, dtype="<f4").reshape(rows, cols).astype(np.float64)


def _directory_checksum(directory: Path) -> str:
    h = hashlib.sha256()
    for name in _HASHED_FILES:
        h.update((directory / name).read_bytes())
    return h.hexdigest()


@contextlib.contextmanager
def bank_lock(directory: Path) -> Iterator[None]:
    """Exclusive lock guarding mutating commands; concurrent callers fail fast."""
    directory.mkdir(parents=True, exist_ok=True)
    lock_path = directory / "bank.lock"
    try:
        fd = os.open(lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise BankLocked(f"{directory} is locked by another invocation") from None
    try:
        os.close(fd)
        yield
    finally:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(lock_path)


def save_bank(bank: BankState, directory: str | os.PathLike) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    history = bank.history
    if history is None:
        raise InsbankError("cannot persist a bank without history (no completed round)")

    with open(directory / "entries.jsonl", "w", encoding="utf-8") as fh:
        for e in bank.entries:
            rec = _point_record(e.point)
            rec.update(
                s_rep=e.s_rep,
                s_rep_norm=e.s_rep_norm,
                s_q_norm=e.s_q_norm,
                overall=e.overall,
                rank=e.rank,
                round_added=e.round_added,
            )
            fh.write(_dumps(rec) + "\n")
    with open(directory / "scores.jsonl", "w", encoding="utf-8") as fh:
        for rec in bank.last_scores:
            fh.write(_dumps(rec) + "\n")
    write_matrix_f32(history.bank_rows, directory / "history_rows.bin")
    write_matrix_f32(history.bank_cols, directory / "history_cols.bin")
    write_matrix_f32(history.participant_embeddings, directory / "participants.bin")

    manifest = {
        "format_version": FORMAT_VERSION,
        "round": bank.round,
        "dimension": bank.dimension,
        "config": bank.config.to_dict(),
        "bank_order": list(history.bank_ids),
        "bank_participant_positions": [int(i) for i in history.participant_positions],
        "checksum": _directory_checksum(directory),
    }
    with open(directory / "manifest.json", "w", encoding="utf-8") as fh:
        fh.write(_dumps(manifest) + "\n")


def load_bank(directory: str | os.PathLike) -> BankState:
    directory = Path(directory)
    try:
        manifest = json.loads((directory / "manifest.json").read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InsbankError(f"{directory}: no manifest.json (not a bank directory)") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{directory}/manifest.json: {exc}") from exc
    if manifest.get("format_version") != FORMAT_VERSION:
        raise VersionUnsupported(f"manifest format_version {manifest.get('format_version')}")
    actual = _directory_checksum(directory)
    if actual != manifest["checksum"]:
        raise ChecksumMismatch(f"{directory}: checksum {actual} != manifest")

    entries = []
    with open(directory / "entries.jsonl", "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            try:
                rec = json.loads(line)
                entries.append(
                    BankEntry(
                        point=CandidatePoint(
                            id=rec["id"],
                            embedding=np.asarray(rec["embedding"], dtype=np.float64),
                            quality=float(rec["quality"]),
                            source=rec.get("source", ""),
                            meta=rec.get("meta"),
                        ),
                        s_rep=rec["s_rep"],
                        s_rep_norm=rec["s_rep_norm"],
                        s_q_norm=rec["s_q_norm"],
                        overall=rec["overall"],
                        rank=rec["rank"],
                        round_added=rec["round_added"],
                    )
                )
            except (json.JSONDecodeError, KeyError) as exc:
                raise ParseError(f"entries.jsonl line {lineno}: {exc}", line=lineno) from exc

    scores = []
    with open(directory / "scores.jsonl", "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                scores.append(json.loads(line))

    history = HistoryBlocks(
        bank_rows=read_matrix_f32(directory / "history_rows.bin"),
        bank_cols=read_matrix_f32(directory / "history_cols.bin"),
        participant_embeddings=read_matrix_f32(directory / "participants.bin"),
        bank_ids=tuple(manifest["bank_order"]),
        participant_positions=np.asarray(manifest["bank_participant_positions"], dtype=np.intp),
    )
    return BankState(
        entries=entries,
        history=history,
        round=int(manifest["round"]),
        config=EvolutionConfig.from_dict(manifest["config"]),
        dimension=int(manifest["dimension"]),
        last_scores=scores,
    )
