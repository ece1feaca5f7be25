#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
# Copyright 2026 turingkit Contributors
"""Regenerates src/unicode_tables.inc from Python's unicodedata."""
import sys
import unicodedata


def ranges(pred):
    out, start, prev = [], None, None
    for cp in range(0x110000):
        if pred(cp):
            if start is None:
                start = cp
            prev = cp
        elif start is not None:
            out.append((start, prev))
            start = None
    if start is not None:
        out.append((start, prev))
    return out


def cat(cp):
    return unicodedata.category(chr(cp))


def emit(name, rs, f):
    f.write(f"constexpr CodepointRange {name}[] = {{\n")
    for i in range(0, len(rs), 4):
        f.write("    " + " ".join(f"{{0x{a:X}, 0x{b:X}}}," for a, b in rs[i:i + 4]) + "\n")
    f.write("};\n\n")


def main(path):
    with open(path, "w") as f:
        f.write("// SPDX-License-Identifier: Apache-2.0\n// Copyright 2026 turingkit Contributors\n\n")
        f.write(f"// Generated by scripts/gen_unicode_tables.py (Unicode {unicodedata.unidata_version}). Do not edit.\n\n")
        emit("kWordRanges", ranges(lambda c: cat(c)[0] in "LNM" or c == 0x5F), f)
        emit("kUppercaseRanges", ranges(lambda c: cat(c) == "Lu"), f)
        pairs = [(c, ord(chr(c).lower())) for c in range(0x110000)
                 if len(chr(c).lower()) == 1 and ord(chr(c).lower()) != c]
        f.write("constexpr LowerPair kLowerPairs[] = {\n")
        for i in range(0, len(pairs), 4):
            f.write("    " + " ".join(f"{{0x{a:X}, 0x{b:X}}}," for a, b in pairs[i:i + 4]) + "\n")
        f.write("};\n\n")
        emit("kPunctuationRanges", ranges(lambda c: cat(c)[0] == "P" or (c < 0x80 and chr(c) in "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~")), f)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/unicode_tables.inc")
