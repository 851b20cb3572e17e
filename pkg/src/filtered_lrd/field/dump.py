"""
Flat binary field dumps: little-endian float64 values in row-major order, with a
TOML header next to them.
"""

import tomllib
from pathlib import Path

import numpy as np

from filtered_lrd.errors import ContractError, OutputError
from filtered_lrd.field.synthesis import LatticeField
from filtered_lrd.logger import logging

logger = logging.getLogger(__name__)

DUMP_DTYPE = np.dtype("<f8")


def header_path(dump_path: Path) -> Path:
    return dump_path.with_suffix(".header.toml")


def _header_text(field: LatticeField) -> str:
    shape = ", ".join(str(m) for m in field.shape)
    origin = ", ".join(str(o) for o in field.origin)
    lines = [
        f"n = {field.n}",
        f"shape = [{shape}]",
        f"origin = [{origin}]",
        f"spacing = {field.spacing!r}",
        f"seed = {int(field.metadata.get('seed', 0))}",
        f"alpha = {float(field.metadata.get('alpha', float('nan')))!r}",
        'dtype = "float64-le"',
        'order = "row-major"',
    ]
    return "\n".join(lines) + "\n"


def write_field(field: LatticeField, path: Path) -> tuple[Path, Path]:
    """
    Write `field` to `path` and its header next to it (`field.bin` -> `field.header.toml`).
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "wb") as f:
            f.write(np.ascontiguousarray(field.values, dtype=DUMP_DTYPE).tobytes(order="C"))
        header = header_path(path)
        header.write_text(_header_text(field), encoding="utf-8")
    except OSError as e:
        raise OutputError(f"Could not write field dump to {path}: {e}") from e
    logger.info("Wrote field dump %s", path)
    return path, header


def read_field(path: Path) -> LatticeField:
    path = Path(path)
    try:
        with open(header_path(path), "rb") as f:
            header = tomllib.load(f)
        raw = path.read_bytes()
    except OSError as e:
        raise OutputError(f"Could not read field dump {path}: {e}") from e
    shape = tuple(int(m) for m in header["shape"])
    values = np.frombuffer(raw, dtype=DUMP_DTYPE).astype(float)
    if values.size != int(np.prod(shape)):
        raise ContractError(
            f"Dump {path} holds {values.size} values, header shape {shape} needs {np.prod(shape)}"
        )
    return LatticeField(
        n=int(header["n"]),
        shape=shape,
        spacing=float(header["spacing"]),
        values=values.reshape(shape),
        origin=tuple(int(o) for o in header["origin"]),
        metadata={"seed": int(header["seed"]), "alpha": float(header["alpha"])},
    )
