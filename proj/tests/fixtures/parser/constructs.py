# -*- coding: utf-8 -*-
"""Grab bag of syntax the parser has to handle."""
from __future__ import annotations

import asyncio as aio, os.path
from . import sibling
from ..pkg.mod import (a as b,
                       c)

GLOBAL: int = 3
x, *rest = [1, 2, 3]
matrix = [[i * j for j in range(3) if j] for i in range(3)]
lookup = {k: v for k, v in zip("ab", b"cd")}
unique = {n ** 2 for n in range(-3, 4)}
gen = (y for y in range(10) if y % 2 if y > 2)
text = f"{GLOBAL!r:>10} and {'nested'} {x=}"
raw = rb'\d+' + Rb"\w"
long_text = """multi
line ' " string"""
joined = 1 + \
    2
ternary = 1 if x else 2
walrus = [z for w in range(5) if (z := w * 2) > 3]
sliced = rest[::2], rest[1:], rest[:-1], matrix[0][1:2, ...]
lam = lambda p, /, q=1, *args, r, **kw: (p, q, args, r, kw)
neg = not -x ** -2
cmp = 1 < 2 <= 3 != 4 is not None
membership = 1 not in [2] and 3 in {3}
bits = ~x & 0xFF | 0o7 ^ 0b1 << 2 >> 1
num = 1_000.5e-3j
ellipsis = ...


@decorator(arg=1)
@other.decorator
class Widget(Base, metaclass=Meta):
    """Docstring."""
    size: int = 0

    def __init__(self, size=0, *, name: str = "w") -> None:
        super().__init__()
        self.size = size
        self.name = name

    @property
    def area(self):
        return self.size ** 2

    async def fetch(self, url):
        async with aio.timeout(1) as t, other() as u:
            async for chunk in stream(url):
                await t.push(chunk)
        return [c async for c in stream(url)]

    def gen(self):
        x = yield
        yield from range(x)


def control(value, *args, **kwargs):
    global GLOBAL
    total = 0
    for i, item in enumerate(args):
        if item is None:
            continue
        elif item == 0:
            break
        else:
            total += item
    else:
        total -= 1
    while total > 10:
        total //= 2
    else:
        pass
    try:
        risky()
    except (ValueError, TypeError) as exc:
        raise RuntimeError("bad") from exc
    except OSError:
        pass
    finally:
        cleanup()
    with open(value) as fh, open(value + ".bak") as (bak):
        fh.write(bak.read())
    assert total >= 0, "negative"
    del kwargs["x"], args
    def inner():
        nonlocal total
        total += 1
    return inner


def matcher(command):
    match command.split():
        case [action]:
            return action
        case ["go", direction] | ["move", direction]:
            return direction
        case {"x": 0, **others} if others:
            return others
        case Point(x=0, y=yy) as pt:
            return pt
        case str() | bytes():
            return None
        case [1, 2, *_]:
            return -1
        case _:
            return "default"


match = 1
case = match + 1
print(match, case, sep=",", end="\n")
type = "soft keywords stay usable as names"
