"""Line-oriented key-file parsing shared by the RSA and Paillier modules.

Files are a header line followed by `name=hex` lines, one per field.
"""

from __future__ import annotations

from .errors import ParseError


def parse_fields(path: str, text: str, header: str, names: tuple[str, ...]) -> dict[str, int]:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != header:
        raise ParseError(f"{path}: expected header {header!r}")
    fields: dict[str, int] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        key, sep, value = line.partition("=")
        if not sep or key not in names or key in fields:
            raise ParseError(f"{path}:{lineno}: unexpected line {line!r}")
        try:
            fields[key] = int(value, 16)
        except ValueError:
            raise ParseError(f"{path}:{lineno}: bad hex value for {key}") from None
    missing = [n for n in names if n not in fields]
    if missing:
        raise ParseError(f"{path}: missing fields {missing}")
    return fields
