"""Reading and writing annotation masks.

Supported formats:

* PGM, both ASCII ``P2`` and binary ``P5``, with maxval up to 255. Header
  comments (``#`` to end of line) are honoured. On load, grayscale values
  are binarized with ``cell = 1 if value >= threshold``; the writer emits
  0 and 255 so that the default threshold of 128 round-trips exactly.
* Headerless CSV: one mask row per line, comma-separated cells. CSV files
  already carry 0/1 cells, so the binarization threshold does not apply to
  them and any other value is rejected.

Format is chosen by file suffix: ``.pgm``/``.pnm`` for PGM, ``.csv`` for CSV.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import MaskFormatError
from .mask import as_mask

PGM_SUFFIXES = (".pgm", ".pnm")
CSV_SUFFIXES = (".csv",)
SUPPORTED_SUFFIXES = PGM_SUFFIXES + CSV_SUFFIXES

_WHITESPACE = b" \t\r\n\v\f"


def load_mask(path, threshold: int = 128) -> np.ndarray:
    """Load a mask file as a 2D uint8 array of 0/1.

    ``threshold`` binarizes grayscale PGM values (``>= threshold`` becomes
    1) and must lie in [0, 255]. Raises :class:`MaskFormatError` for
    malformed files and ``FileNotFoundError``/``OSError`` for unreadable
    paths.
    """
    if not 0 <= int(threshold) <= 255:
        raise ValueError(f"threshold must be in [0, 255], got {threshold}")
    p = Path(path)
    suffix = p.suffix.lower()
    if suffix in PGM_SUFFIXES:
        return _load_pgm(p, int(threshold))
    if suffix in CSV_SUFFIXES:
        return _load_csv(p)
    raise MaskFormatError(f"unsupported mask format: {p.name!r} (expected .pgm, .pnm or .csv)")


def save_mask(mask, path, fmt: str | None = None) -> None:
    """Write a mask to *path* as ``p2``, ``p5`` or ``csv``.

    With ``fmt=None`` the format is inferred from the suffix (PGM defaults
    to binary P5). PGM output stores 0/255 values with maxval 255.
    """
    m = as_mask(mask)
    p = Path(path)
    if fmt is None:
        suffix = p.suffix.lower()
        if suffix in PGM_SUFFIXES:
            fmt = "p5"
        elif suffix in CSV_SUFFIXES:
            fmt = "csv"
        else:
            raise MaskFormatError(f"cannot infer mask format from suffix: {p.name!r}")
    fmt = fmt.lower()
    rows, cols = m.shape
    if fmt == "p2":
        lines = [f"P2\n{cols} {rows}\n255\n"]
        scaled = m.astype(np.uint16) * 255
        for r in range(rows):
            lines.append(" ".join(str(v) for v in scaled[r].tolist()) + "\n")
        p.write_text("".join(lines), encoding="ascii")
    elif fmt == "p5":
        header = f"P5\n{cols} {rows}\n255\n".encode("ascii")
        p.write_bytes(header + (m * 255).astype(np.uint8).tobytes())
    elif fmt == "csv":
        text = "\n".join(",".join(str(v) for v in m[r].tolist()) for r in range(rows))
        p.write_text(text + "\n", encoding="ascii")
    else:
        raise ValueError(f"unknown mask format {fmt!r} (expected p2, p5 or csv)")


def _load_pgm(path: Path, threshold: int) -> np.ndarray:
    data = path.read_bytes()
    magic, pos = _next_token(data, 0, path)
    if magic not in (b"P2", b"P5"):
        raise MaskFormatError(f"{path.name}: not a P2/P5 PGM file (magic {magic!r})")
    fields = []
    for name in ("width", "height", "maxval"):
        token, pos = _next_token(data, pos, path)
        try:
            value = int(token)
        except ValueError:
            raise MaskFormatError(f"{path.name}: non-numeric {name} in header: {token!r}") from None
        fields.append(value)
    cols, rows, maxval = fields
    if rows < 1 or cols < 1:
        raise MaskFormatError(f"{path.name}: invalid dimensions {cols}x{rows}")
    if not 1 <= maxval <= 255:
        raise MaskFormatError(f"{path.name}: maxval must be in [1, 255], got {maxval}")

    if magic == b"P5":
        # Header ends after exactly one whitespace byte following maxval.
        payload = data[pos + 1:]
        if len(payload) != rows * cols:
            raise MaskFormatError(
                f"{path.name}: header declares {rows}x{cols} = {rows * cols} pixels "
                f"but payload carries {len(payload)} bytes"
            )
        values = np.frombuffer(payload, dtype=np.uint8).astype(np.int64)
    else:
        tokens = _strip_comments(data[pos:]).split()
        if len(tokens) != rows * cols:
            raise MaskFormatError(
                f"{path.name}: header declares {rows}x{cols} = {rows * cols} pixels "
                f"but payload carries {len(tokens)} values"
            )
        try:
            values = np.array([int(t) for t in tokens], dtype=np.int64)
        except ValueError:
            raise MaskFormatError(f"{path.name}: non-numeric pixel value") from None

    if values.size and (values.min() < 0 or values.max() > maxval):
        raise MaskFormatError(f"{path.name}: pixel value outside [0, {maxval}]")
    return (values.reshape(rows, cols) >= threshold).astype(np.uint8)


_WHITESPACE_SET = frozenset(_WHITESPACE)
_HASH = ord("#")
_NEWLINE = ord("\n")


def _next_token(data: bytes, pos: int, path: Path) -> tuple[bytes, int]:
    """Return the next whitespace-delimited header token, skipping comments."""
    n = len(data)
    while pos < n:
        byte = data[pos]
        if byte == _HASH:
            while pos < n and data[pos] != _NEWLINE:
                pos += 1
        elif byte in _WHITESPACE_SET:
            pos += 1
        else:
            start = pos
            while pos < n and data[pos] not in _WHITESPACE_SET:
                pos += 1
            return data[start:pos], pos
    raise MaskFormatError(f"{path.name}: truncated PGM header")


def _strip_comments(data: bytes) -> bytes:
    if b"#" not in data:
        return data
    out = []
    for line in data.split(b"\n"):
        hash_pos = line.find(b"#")
        out.append(line if hash_pos < 0 else line[:hash_pos])
    return b"\n".join(out)


def _load_csv(path: Path) -> np.ndarray:
    text = path.read_text(encoding="ascii")
    rows = []
    width = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        cells = [c.strip() for c in line.split(",")]
        try:
            row = [int(c) for c in cells]
        except ValueError:
            raise MaskFormatError(f"{path.name}:{lineno}: non-integer cell") from None
        if any(v not in (0, 1) for v in row):
            raise MaskFormatError(f"{path.name}:{lineno}: CSV masks must contain only 0 or 1")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise MaskFormatError(
                f"{path.name}:{lineno}: row has {len(row)} cells, expected {width}"
            )
        rows.append(row)
    if not rows:
        raise MaskFormatError(f"{path.name}: empty CSV mask")
    return np.array(rows, dtype=np.uint8)
