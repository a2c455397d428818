#!/usr/bin/env python3
# Copyright 2026 The pianobench Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates the binary MIDI fixtures next to this script.

Written independently of the C++ parser so the fixtures do not share its
assumptions. Golden CSVs are maintained by hand.
"""

import pathlib
import struct


def vlq(value):
    out = [value & 0x7F]
    value >>= 7
    while value:
        out.append(0x80 | (value & 0x7F))
        value >>= 7
    return bytes(reversed(out))


def chunk(tag, body):
    return tag + struct.pack(">I", len(body)) + body


def midi(tracks, division=480, fmt=None):
    if fmt is None:
        fmt = 0 if len(tracks) == 1 else 1
    header = chunk(b"MThd", struct.pack(">HHH", fmt, len(tracks), division))
    return header + b"".join(chunk(b"MTrk", t) for t in tracks)


def tempo(delta, us):
    return vlq(delta) + b"\xff\x51\x03" + us.to_bytes(3, "big")


def end(delta=0):
    return vlq(delta) + b"\xff\x2f\x00"


def on(delta, pitch, vel=64, ch=0):
    return vlq(delta) + bytes([0x90 | ch, pitch, vel])


def off(delta, pitch, ch=0):
    return vlq(delta) + bytes([0x80 | ch, pitch, 0])


def name(delta, text):
    raw = text.encode()
    return vlq(delta) + b"\xff\x03" + vlq(len(raw)) + raw


FIXTURES = {
    # One C4 quarter note at 120 bpm, PPQ 480: [0.0, 0.5) s.
    "quarter_note.mid": midi([name(0, "quarter") + tempo(0, 500000) +
                              on(0, 60) + off(480, 60) + end()]),
    # Same note with the tempo dropping to 60 bpm at tick 240.
    "tempo_change.mid": midi([tempo(0, 500000) + on(0, 60) +
                              tempo(240, 1000000) + off(240, 60) + end()]),
    # Header and one empty track.
    "empty.mid": midi([end()]),
}


def main():
    here = pathlib.Path(__file__).resolve().parent
    for filename, data in FIXTURES.items():
        (here / filename).write_bytes(data)


if __name__ == "__main__":
    main()
