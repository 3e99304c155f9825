"""File formats, config parsing, and reproducible-run plumbing.

All writes are atomic (temp file + rename).  Floats are serialized with
repr(), the shortest round-trip form, so identical runs produce bit-identical
artifacts.  CSV artifacts carry '#' header comments embedding the producing
configuration hash.
"""

from __future__ import annotations

import hashlib
import os
import tempfile

import numpy as np

from .errors import InputError
from .spectral import SpectralCoefficients

CONFIG_VERSION = "1"


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_state(path: str, c: SpectralCoefficients) -> None:
    """State file: '# k_max=<int>' header then one 'k,re_a,im_a' line per mode."""
    lines = [f"# k_max={c.k_max}"]
    for k in range(1, c.k_max + 1):
        v = c.a[k - 1]
        lines.append(f"{k},{float(v.real)!r},{float(v.imag)!r}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_state(path: str) -> SpectralCoefficients:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("# k_max="):
        raise InputError(f"{path}: missing '# k_max=' header")
    try:
        k_max = int(lines[0].split("=", 1)[1])
    except ValueError as exc:
        raise InputError(f"{path}: bad k_max header") from exc
    a = np.zeros(k_max, dtype=complex)
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 3:
            raise InputError(f"{path}: bad state line {ln!r}")
        k = int(parts[0])
        if not 1 <= k <= k_max:
            raise InputError(f"{path}: mode index {k} outside 1..{k_max}")
        a[k - 1] = float(parts[1]) + 1j * float(parts[2])
    return SpectralCoefficients(k_max, a)


def _header_comments(fields: dict) -> list[str]:
    return [f"# {key}={value}" for key, value in fields.items()]


def save_trajectory_csv(path: str, times: np.ndarray, q: np.ndarray, fields: dict) -> None:
    lines = _header_comments(fields)
    lines.append("t,re_q,im_q")
    for t, v in zip(times, q):
        lines.append(f"{float(t)!r},{float(v.real)!r},{float(v.imag)!r}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def save_spectrum_csv(path: str, eigs: list[tuple[float, str]], fields: dict) -> None:
    lines = _header_comments(fields)
    lines.append("E,sector")
    for energy, sector in eigs:
        lines.append(f"{float(energy)!r},{sector}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def save_control_csv(path: str, times: np.ndarray, u: np.ndarray, fields: dict) -> None:
    lines = _header_comments(fields)
    lines.append("t,re_u,im_u")
    for t, v in zip(times, u):
        lines.append(f"{float(t)!r},{float(v.real)!r},{float(v.imag)!r}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def load_target_csv(path: str, k_max: int) -> SpectralCoefficients:
    """Control-target file: 'k,re_c,im_c' rows (header and '#' comments skipped)."""
    a = np.zeros(k_max, dtype=complex)
    with open(path) as fh:
        for ln in fh:
            ln = ln.strip()
            if not ln or ln.startswith("#") or ln.startswith("k,"):
                continue
            parts = ln.split(",")
            if len(parts) != 3:
                raise InputError(f"{path}: bad target line {ln!r}")
            k = int(parts[0])
            if not 1 <= k <= k_max:
                raise InputError(f"{path}: mode index {k} outside 1..{k_max}")
            a[k - 1] = float(parts[1]) + 1j * float(parts[2])
    return SpectralCoefficients(k_max, a)


def write_manifest(path: str, sections: dict) -> None:
    """Structured text manifest: '[section]' blocks of 'key=value' lines."""
    lines = []
    for section, mapping in sections.items():
        lines.append(f"[{section}]")
        for key, value in mapping.items():
            lines.append(f"{key}={value}")
        lines.append("")
    atomic_write_text(path, "\n".join(lines))


def parse_config_text(text: str, allowed_keys: set[str], source: str = "<config>") -> dict:
    """Key=value config with a mandatory version field; unknown keys rejected."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InputError(f"{source}:{lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key != "version" and key not in allowed_keys:
            raise InputError(f"{source}:{lineno}: unknown config key {key!r}")
        if key in out:
            raise InputError(f"{source}:{lineno}: duplicate config key {key!r}")
        out[key] = value
    if out.get("version") != CONFIG_VERSION:
        raise InputError(f"{source}: missing or unsupported version "
                         f"(need version={CONFIG_VERSION})")
    out.pop("version")
    return out


def config_hash(mapping: dict) -> str:
    canon = "\n".join(f"{k}={mapping[k]}" for k in sorted(mapping))
    return hashlib.sha256(canon.encode()).hexdigest()[:12]
