import re
from typing import Tuple

_VERSION_RE = re.compile(r'^v?(\d+)\.(\d+)(?:\.(\d+))?$')


def parse_version(text: str) -> Tuple[int, int, int]:
    match = _VERSION_RE.match(text.strip())
    if match is None:
        raise ValueError('not a version: %r' % text)
    major, minor, patch = match.groups()
    if patch is None:
        return int(major), int(minor), 0
    return int(major), int(minor), int(patch)
