"""Binary capture files for the one-shot ``estimate`` command.

Layout (little endian)::

    offset  size  field
    0       4     magic b"IQSK"
    4       2     version (uint16, currently 1)
    6       2     reserved, zero
    8       8     sample rate in Hz (float64)
    16      4     channel count (uint32)
    20      8     samples per channel (uint64)
    28      ...   channel 0 as float32 I, Q pairs, then channel 1, ...
"""

from pathlib import Path

import numpy as np

from models.error import CaptureFormatError
from models.signal import DualPolFrame, SampleTrace

MAGIC = b"IQSK"
VERSION = 1
HEADER = np.dtype(
    [
        ("magic", "S4"),
        ("version", "<u2"),
        ("reserved", "<u2"),
        ("sample_rate_hz", "<f8"),
        ("n_channels", "<u4"),
        ("n_samples", "<u8"),
    ]
)


def write_capture(path: Path, traces: list[SampleTrace]) -> Path:
    """Write equal-length, equal-rate traces as one capture file."""
    if not traces:
        raise CaptureFormatError("capture needs at least one channel")
    rate = traces[0].sample_rate_hz
    n = len(traces[0])
    if any(len(t) != n or t.sample_rate_hz != rate for t in traces):
        raise CaptureFormatError("capture channels must share length and sample rate")

    header = np.zeros(1, dtype=HEADER)
    header["magic"] = MAGIC
    header["version"] = VERSION
    header["sample_rate_hz"] = rate
    header["n_channels"] = len(traces)
    header["n_samples"] = n

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as capture_file:
        capture_file.write(header.tobytes())
        for trace in traces:
            capture_file.write(trace.samples.astype("<c8").tobytes())
    return path


def read_capture(path: Path) -> list[SampleTrace]:
    """Read every channel of a capture file."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise CaptureFormatError(f"cannot read capture {path}: {exc}") from exc
    if len(raw) < HEADER.itemsize:
        raise CaptureFormatError(f"{path}: file shorter than the {HEADER.itemsize}-byte header")

    header = np.frombuffer(raw, dtype=HEADER, count=1)[0]
    if header["magic"] != MAGIC:
        raise CaptureFormatError(f"{path}: bad magic {header['magic']!r}")
    if header["version"] != VERSION:
        raise CaptureFormatError(f"{path}: unsupported version {header['version']}")
    rate = float(header["sample_rate_hz"])
    channels, n = int(header["n_channels"]), int(header["n_samples"])
    if not rate > 0 or channels < 1 or n < 1:
        raise CaptureFormatError(f"{path}: invalid header (rate={rate}, channels={channels}, samples={n})")

    payload = raw[HEADER.itemsize :]
    expected = channels * n * np.dtype(np.complex64).itemsize
    if len(payload) != expected:
        raise CaptureFormatError(f"{path}: expected {expected} payload bytes, found {len(payload)}")
    samples = np.frombuffer(payload, dtype="<c8").reshape(channels, n)
    try:
        return [SampleTrace(samples=row.astype(np.complex128), sample_rate_hz=rate) for row in samples]
    except ValueError as exc:
        raise CaptureFormatError(f"{path}: {exc}") from exc


def read_dual_pol(path: Path) -> DualPolFrame:
    """Capture with exactly two channels, X then Y."""
    traces = read_capture(path)
    if len(traces) != 2:
        raise CaptureFormatError(f"{path}: expected 2 channels (X, Y), found {len(traces)}")
    return DualPolFrame(x=traces[0], y=traces[1])
