"""Shared plumbing for artifact files: '# key=value' metadata headers."""

from __future__ import annotations


def write_meta(fh, meta: dict[str, str] | None) -> None:
    for key, value in (meta or {}).items():
        fh.write(f"# {key}={value}\n")


def consume_meta_line(line: str, meta: dict[str, str]) -> bool:
    """If ``line`` is a metadata comment, record it and return True."""
    if not line.startswith("#"):
        return False
    body = line[1:].strip()
    if "=" in body:
        key, value = body.split("=", 1)
        meta[key.strip()] = value.strip()
    return True
