"""Minimal binary container for real and complex arrays.

Layout: ``b"CXG1"``, little-endian u32 ``ndim``, ``ndim`` u32 dims, u32
dtype code, then the row-major payload (interleaved re/im for complex).
"""

import os
import struct
import tempfile

import numpy as np

MAGIC = b"CXG1"
DTYPE_CODES = {1: np.dtype("<c8"), 2: np.dtype("<c16"), 3: np.dtype("<f8")}
CODE_FOR = {dt.kind + str(dt.itemsize): code for code, dt in DTYPE_CODES.items()}
_U32 = struct.Struct("<I")
MAX_NDIM = 32


class ArrayFormatError(ValueError):
    """Malformed array file; ``code`` identifies the failure class."""

    code = "format"

    def __init__(self, path, detail):
        super().__init__(f"{path}: {detail}")
        self.path = path


class BadMagicError(ArrayFormatError):
    code = "bad_magic"


class LengthMismatchError(ArrayFormatError):
    code = "length_mismatch"


class UnknownDtypeError(ArrayFormatError):
    code = "unknown_dtype"


class BadHeaderError(ArrayFormatError):
    code = "bad_header"


def _dtype_code(arr):
    key = arr.dtype.kind + str(arr.dtype.itemsize)
    if key not in CODE_FOR:
        raise TypeError(f"unsupported dtype {arr.dtype}; use complex64, complex128 or float64")
    return CODE_FOR[key]


def encode_array(arr):
    """Serialize ``arr`` to bytes."""
    arr = np.asarray(arr)
    if arr.ndim == 0 or arr.ndim > MAX_NDIM:
        raise ValueError(f"array must have 1 to {MAX_NDIM} dimensions, got {arr.ndim}")
    if 0 in arr.shape:
        raise ValueError(f"empty dimension in shape {arr.shape}")
    if max(arr.shape) >= 2**32:
        raise ValueError(f"dimension too large for the u32 header: {arr.shape}")
    code = _dtype_code(arr)
    header = MAGIC + struct.pack(f"<{arr.ndim + 2}I", arr.ndim, *arr.shape, code)
    payload = np.ascontiguousarray(arr, dtype=DTYPE_CODES[code]).tobytes()
    return header + payload


def decode_array(data, path="<bytes>"):
    """Parse bytes produced by :func:`encode_array`."""
    if data[:4] != MAGIC:
        raise BadMagicError(path, f"bad magic {data[:4]!r}, expected {MAGIC!r}")
    pos = 4
    if len(data) < pos + 4:
        raise LengthMismatchError(path, "length mismatch: header truncated before ndim")
    (ndim,) = _U32.unpack_from(data, pos)
    pos += 4
    if ndim == 0 or ndim > MAX_NDIM:
        raise BadHeaderError(path, f"invalid ndim {ndim}")
    if len(data) < pos + 4 * (ndim + 1):
        raise LengthMismatchError(path, "length mismatch: header truncated")
    dims = struct.unpack_from(f"<{ndim}I", data, pos)
    pos += 4 * ndim
    (code,) = _U32.unpack_from(data, pos)
    pos += 4
    if 0 in dims:
        raise BadHeaderError(path, f"empty dimension in shape {dims}")
    if code not in DTYPE_CODES:
        raise UnknownDtypeError(path, f"unknown dtype code {code}")
    dtype = DTYPE_CODES[code]
    expected = int(np.prod(dims, dtype=object)) * dtype.itemsize
    if len(data) - pos != expected:
        raise LengthMismatchError(
            path, f"length mismatch: payload has {len(data) - pos} bytes, expected {expected}")
    return np.frombuffer(data, dtype=dtype, offset=pos).reshape(dims).astype(dtype.newbyteorder("="))


def atomic_write_bytes(path, data):
    """Write via a temporary file in the same directory, then rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_array(path, arr):
    try:
        atomic_write_bytes(path, encode_array(arr))
    except OSError as exc:
        raise OSError(f"cannot write array to {path}: {exc.strerror or exc}") from exc


def read_array(path):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise OSError(f"cannot read array {path}: {exc.strerror or exc}") from exc
    return decode_array(data, os.fspath(path))
