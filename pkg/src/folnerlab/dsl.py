"""Group descriptor mini-language.

    Z^d                 free abelian, d >= 1
    Z/m1xZ/m2x...[xZ^d] finite-by-free, m_i >= 2, free factor last
    lamplighter
    wreath-zz

Matching is case-insensitive; tokens are separated by ``x``.
"""
from __future__ import annotations

import re

from .groups import GroupDescriptor, finite_by_free, free_abelian, lamplighter, wreath_zz

_TORSION = re.compile(r"z/(\d+)", re.IGNORECASE)
_FREE = re.compile(r"z\^(\d+)", re.IGNORECASE)


class DSLParseError(ValueError):
    def __init__(self, message: str, text: str, offset: int):
        super().__init__(f"{message} at byte {offset} in {text!r}")
        self.text = text
        self.offset = offset


def parse_group_dsl(text: str) -> GroupDescriptor:
    low = text.lower()
    if low == "lamplighter":
        return lamplighter()
    if low == "wreath-zz":
        return wreath_zz()
    if not text:
        raise DSLParseError("empty descriptor", text, 0)
    moduli: list[int] = []
    d = 0
    pos = 0
    while True:
        if d:
            raise DSLParseError("free factor Z^d must come last", text, pos)
        m = _TORSION.match(text, pos)
        f = None if m else _FREE.match(text, pos)
        if m and (m.end() == len(text) or text[m.end()] in "xX"):
            mod = int(m.group(1))
            if mod < 2:
                raise DSLParseError("modulus must be >= 2", text, m.start(1))
            moduli.append(mod)
            pos = m.end()
        elif f and (f.end() == len(text) or text[f.end()] in "xX"):
            d = int(f.group(1))
            if d < 1:
                raise DSLParseError("Z^0 is not a group factor", text, f.start(1))
            pos = f.end()
        else:
            raise DSLParseError("unrecognized token", text, pos)
        if pos == len(text):
            break
        pos += 1  # the 'x' separator
        if pos == len(text):
            raise DSLParseError("trailing separator", text, pos)
    return finite_by_free(moduli, d) if moduli else free_abelian(d)


def render_group(group: GroupDescriptor) -> str:
    return str(group)
