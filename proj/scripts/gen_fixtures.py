#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Generates the synthetic board, design and catalog fixtures.

The three boards under fixtures/boards/ mirror the component statistics of
three public hobbyist boards (component and IC counts, outline area, layer
count). They are authored so that uno_wifi_like >= leonardo_like >=
mkr_fox_like holds part by part: every part of the smaller design is either
identical to a part of the larger one, dominated by a larger die or diode
package, or covered by surplus weight on the larger side.

Run from the repository root:  python3 scripts/gen_fixtures.py
"""

import json
import math
from pathlib import Path
from xml.sax.saxutils import quoteattr

ROOT = Path(__file__).resolve().parent.parent
BOARDS = ROOT / "fixtures" / "boards"
DESIGNS = ROOT / "fixtures" / "designs"
CATALOG = ROOT / "fixtures" / "catalog"
RULES = ROOT / "fixtures" / "rules"


def two_pad(span):
    return [(-span / 2, 0.0), (span / 2, 0.0)]


def quad(n, size):
    """n pads spread evenly over four sides of a square of the given size."""
    per = n // 4
    pitch = size / (per + 1)
    half = size / 2
    pads = []
    for i in range(per):
        t = -half + pitch * (i + 1)
        pads += [(t, -half), (half, t), (-t, half), (-half, -t)]
    return pads


def dual_row(n, pitch, row_gap):
    per = n // 2
    x0 = -pitch * (per - 1) / 2
    return [(x0 + pitch * i, -row_gap / 2) for i in range(per)] + [
        (x0 + pitch * i, row_gap / 2) for i in range(per)
    ]


def grid(nx, ny, pitch):
    return [
        (pitch * (i - (nx - 1) / 2), pitch * (j - (ny - 1) / 2))
        for i in range(nx)
        for j in range(ny)
    ]


def single_row(n, pitch):
    return [(pitch * (i - (n - 1) / 2), 0.0) for i in range(n)]


# footprint -> (pads, silk width mm, silk height mm)
FOOTPRINTS = {
    "R0402": (two_pad(1.0), 1.0, 0.5),
    "C0402": (two_pad(1.0), 1.0, 0.5),
    "R0603": (two_pad(1.6), 1.6, 0.8),
    "C0603": (two_pad(1.6), 1.6, 0.8),
    "L0603": (two_pad(1.6), 1.6, 0.8),
    "C0805": (two_pad(2.0), 2.0, 1.25),
    "R1206": (two_pad(3.2), 3.2, 1.6),
    "L0201": (two_pad(0.6), 0.6, 0.3),
    "SOD-323": (two_pad(1.7), 1.7, 1.25),
    "SOD-123": (two_pad(2.7), 2.7, 1.6),
    "SMA": (two_pad(4.3), 4.3, 2.6),
    "LED0603": (two_pad(1.6), 1.6, 0.8),
    "SOT-23": ([(-0.95, -1.0), (0.95, -1.0), (0.0, 1.0)], 2.9, 1.3),
    "SO-8": (dual_row(8, 1.27, 5.4), 5.0, 6.2),
    "MSOP-8": (dual_row(8, 0.65, 4.4), 3.0, 4.9),
    "TSSOP-20": (dual_row(20, 0.65, 5.8), 6.5, 6.4),
    "SSOP-28": (dual_row(28, 0.65, 7.0), 10.2, 7.8),
    "QFN16-3X3": (quad(16, 3.0), 3.0, 3.0),
    "QFN24-4X4": (quad(24, 4.0), 4.0, 4.0),
    "QFN32-5X5": (quad(32, 5.0), 5.0, 5.0),
    "QFN44-7X7": (quad(44, 7.0), 7.0, 7.0),
    "QFN48-6X6": (quad(48, 6.0), 6.0, 6.0),
    "QFN48-7X7": (quad(48, 7.0), 7.0, 7.0),
    "TQFP32": (quad(32, 9.0), 9.0, 9.0),
    "TQFP44": (quad(44, 12.0), 12.0, 12.0),
    "WLCSP-20": (grid(4, 5, 0.4), 2.0, 2.5),
    "PINHD-1X6": (single_row(6, 2.54), 15.24, 2.54),
    "PINHD-1X8": (single_row(8, 2.54), 20.32, 2.54),
    "PINHD-1X14": (single_row(14, 2.54), 35.56, 2.54),
    "PINHD-2X3": (grid(3, 2, 2.54), 7.62, 5.08),
    "USB-MICRO-B": (single_row(5, 0.65), 7.5, 5.0),
    "TACT-6MM": (grid(2, 2, 6.5), 6.0, 6.0),
    "XTAL-3225": (grid(2, 2, 2.2), 3.2, 2.5),
    "FIDUCIAL-1MM": ([(0.0, 0.0)], 1.0, 1.0),
    "MOUNT-HOLE-3.2": ([(0.0, 0.0)], 6.4, 6.4),
}

# (designator prefix, footprint, part name, value, count)
MKR_FOX = [
    ("U", "QFN48-7X7", "ATSAMD21G18A-MU", "ATSAMD21G18A", 1),
    ("U", "QFN32-5X5", "ATA8520E-GHQW", "ATA8520E", 1),
    ("U", "MSOP-8", "LMV358IDGKR", "LMV358", 2),
    ("U", "SO-8", "CAT24C256WI", "CAT24C256", 4),
    ("U", "TSSOP-20", "74LVC244APW", "74LVC244", 4),
    ("U", "QFN24-4X4", "BQ24195RGE", "BQ24195", 1),
    ("U", "SO-8", "ATECC508A-SSHDA", "ATECC508A", 1),
    ("U", "MSOP-8", "TPS62A01DRL", "TPS62A01", 2),
    ("U", "MSOP-8", "SN74LVC2G74DCU", "74LVC2G74", 4),
    ("D", "SOD-323", "BAT54J", "BAT54J", 2),
    ("LED", "LED0603", "LED-GREEN-0603", "GREEN", 1),
    ("Q", "SOT-23", "MMBT3904", "MMBT3904", 1),
    ("J", "PINHD-1X14", "HEADER-14", "HEADER-14", 2),
    ("X", "USB-MICRO-B", "USB-MICRO-B", "USB", 1),
    ("SW", "TACT-6MM", "TACT-SWITCH-6MM", "RESET", 1),
    ("Y", "XTAL-3225", "XTAL-32MHZ-3225", "32MHz", 1),
    ("R", "R0402", "", "10k", 25),
    ("C", "C0402", "", "100n", 28),
    ("C", "C0603", "", "1u", 6),
    ("L", "L0603", "", "10u", 2),
    ("C", "C0805", "", "10u", 2),
]

LEONARDO = [
    ("U", "TQFP44", "ATMEGA32U4-AU", "ATMEGA32U4", 1),
    ("U", "MSOP-8", "LMV358IDGKR", "LMV358", 2),
    ("U", "SO-8", "CAT24C256WI", "CAT24C256", 4),
    ("U", "TSSOP-20", "74LVC244APW", "74LVC244", 4),
    ("U", "SSOP-28", "FT232RL", "FT232RL", 1),
    ("U", "TSSOP-20", "TXB0108PWR", "TXB0108", 2),
    ("U", "SO-8", "MCP6002-E/SN", "MCP6002", 6),
    ("D", "SOD-123", "MBR0520", "MBR0520", 2),
    ("LED", "LED0603", "LED-GREEN-0603", "GREEN", 2),
    ("Q", "SOT-23", "MMBT3904", "MMBT3904", 2),
    ("J", "PINHD-1X14", "HEADER-14", "HEADER-14", 2),
    ("J", "PINHD-1X8", "HEADER-8", "HEADER-8", 2),
    ("J", "PINHD-1X6", "HEADER-6", "HEADER-6", 1),
    ("J", "PINHD-2X3", "ICSP-2X3", "ICSP", 1),
    ("X", "USB-MICRO-B", "USB-MICRO-B", "USB", 1),
    ("SW", "TACT-6MM", "TACT-SWITCH-6MM", "RESET", 1),
    ("Y", "XTAL-3225", "XTAL-32MHZ-3225", "32MHz", 1),
    ("R", "R0402", "", "10k", 22),
    ("R", "R0603", "", "1k", 6),
    ("C", "C0402", "", "100n", 20),
    ("C", "C0603", "", "1u", 8),
    ("C", "C0805", "", "10u", 4),
    ("L", "L0603", "", "10u", 2),
]

UNO_WIFI = [
    ("U", "QFN44-7X7", "ATMEGA32U4-MU", "ATMEGA32U4", 1),
    ("U", "QFN48-6X6", "ESP32-D0WD", "ESP32", 1),
    ("U", "QFN48-7X7", "ATMEGA4809-MFR", "ATMEGA4809", 1),
    ("U", "MSOP-8", "LMV358IDGKR", "LMV358", 2),
    ("U", "SO-8", "CAT24C256WI", "CAT24C256", 4),
    ("U", "TSSOP-20", "74LVC244APW", "74LVC244", 4),
    ("U", "SSOP-28", "FT232RL", "FT232RL", 1),
    ("U", "TSSOP-20", "TXB0108PWR", "TXB0108", 2),
    ("U", "SO-8", "MCP6002-E/SN", "MCP6002", 6),
    ("U", "MSOP-8", "TS5A23157DGS", "TS5A23157", 2),
    ("U", "QFN16-3X3", "LSM6DS3TR", "LSM6DS3", 1),
    ("U", "WLCSP-20", "ECC608-WLCSP", "ECC608", 1),
    ("D", "SOD-123", "MBR0520", "MBR0520", 2),
    ("D", "SMA", "SS14", "SS14", 1),
    ("LED", "LED0603", "LED-GREEN-0603", "GREEN", 4),
    ("Q", "SOT-23", "MMBT3904", "MMBT3904", 2),
    ("J", "PINHD-1X14", "HEADER-14", "HEADER-14", 2),
    ("J", "PINHD-1X8", "HEADER-8", "HEADER-8", 2),
    ("J", "PINHD-1X6", "HEADER-6", "HEADER-6", 1),
    ("J", "PINHD-2X3", "ICSP-2X3", "ICSP", 2),
    ("X", "USB-MICRO-B", "USB-MICRO-B", "USB", 1),
    ("SW", "TACT-6MM", "TACT-SWITCH-6MM", "RESET", 1),
    ("Y", "XTAL-3225", "XTAL-32MHZ-3225", "32MHz", 1),
    ("R", "R0402", "", "10k", 26),
    ("R", "R0603", "", "1k", 6),
    ("C", "C0402", "", "100n", 22),
    ("C", "C0603", "", "1u", 10),
    ("C", "C0805", "", "10u", 6),
    ("L", "L0603", "", "10u", 2),
]

SMALL = [
    ("U", "TQFP32", "ATMEGA328P-AU", "ATMEGA328P", 1),
    ("U", "SO-8", "CAT24C256WI", "CAT24C256", 1),
    ("D", "SOD-123", "MBR0520", "MBR0520", 1),
    ("Q", "SOT-23", "MMBT3904", "MMBT3904", 1),
    ("J", "PINHD-1X6", "HEADER-6", "HEADER-6", 1),
    ("R", "R0402", "", "10k", 4),
    ("C", "C0402", "", "100n", 4),
    ("C", "C0805", "", "10u", 1),
]

# Non-component elements the parser is expected to drop.
EXTRAS = [
    ("FID", "FIDUCIAL-1MM", "", "FIDUCIAL", 2),
    ("H", "MOUNT-HOLE-3.2", "", "HOLE", 4),
]


def fmt(v):
    return f"{v:.4f}".rstrip("0").rstrip(".") or "0"


def write_brd(path, bill, width, height, layers):
    lines = ['<?xml version="1.0" encoding="utf-8"?>', '<eagle version="9.6.2">', "<drawing>", "<layers>"]
    copper = {1, 16} if layers == 2 else {1, 2, 15, 16}
    for n in range(1, 17):
        lines.append(f'<layer number="{n}" name="L{n}" color="4" fill="1" visible="yes" active="{"yes" if n in copper else "no"}"/>')
    lines += ['<layer number="20" name="Dimension" color="24" fill="1" visible="yes" active="yes"/>',
              '<layer number="21" name="tPlace" color="7" fill="1" visible="yes" active="yes"/>',
              '<layer number="51" name="tDocu" color="7" fill="1" visible="yes" active="yes"/>',
              "</layers>", "<board>", "<plain>"]
    corners = [(0, 0), (width, 0), (width, height), (0, height)]
    for (x1, y1), (x2, y2) in zip(corners, corners[1:] + corners[:1]):
        lines.append(f'<wire x1="{fmt(x1)}" y1="{fmt(y1)}" x2="{fmt(x2)}" y2="{fmt(y2)}" width="0" layer="20"/>')
    lines += ["</plain>", "<libraries>", '<library name="synth">', "<packages>"]
    used = sorted({fp for _, fp, _, _, _ in bill + EXTRAS})
    for fp in used:
        pads, w, h = FOOTPRINTS[fp]
        lines.append(f"<package name={quoteattr(fp)}>")
        for i, (x, y) in enumerate(pads, 1):
            lines.append(f'<smd name="{i}" x="{fmt(x)}" y="{fmt(y)}" dx="0.4" dy="0.4" layer="1"/>')
        lines.append(f'<rectangle x1="{fmt(-w / 2)}" y1="{fmt(-h / 2)}" x2="{fmt(w / 2)}" y2="{fmt(h / 2)}" layer="51"/>')
        lines.append("</package>")
    lines += ["</packages>", "</library>", "</libraries>", "<elements>"]

    counters = {}
    placed = []
    cols = max(1, int(math.sqrt(sum(c for *_, c in bill + EXTRAS))) + 1)
    k = 0
    for prefix, fp, mpn, value, count in bill + EXTRAS:
        for _ in range(count):
            counters[prefix] = counters.get(prefix, 0) + 1
            name = f"{prefix}{counters[prefix]}"
            x = width * (0.5 + k % cols) / cols
            y = height * (0.5 + k // cols) / cols
            rot = ' rot="R90"' if k % 3 == 1 else ""
            k += 1
            lines.append(f'<element name="{name}" library="synth" package={quoteattr(fp)} value={quoteattr(value)} x="{fmt(x)}" y="{fmt(y)}"{rot}>')
            if mpn:
                lines.append(f'<attribute name="MPN" value={quoteattr(mpn)}/>')
            lines.append("</element>")
            placed.append((name, fp))
    lines += ["</elements>", "<signals>"]
    for name, fp in placed:
        for i in range(1, len(FOOTPRINTS[fp][0]) + 1):
            lines.append(f'<signal name="{name}_P{i}"><contactref element="{name}" pad="{i}"/>'
                         f'<wire x1="0" y1="0" x2="1" y2="0" width="0.2" layer="1"/></signal>')
    lines += ["</signals>", "</board>", "</drawing>", "</eagle>"]
    path.write_text("\n".join(lines) + "\n")


def part(pid, name, category, package_type, area, qty, kind=None, **attrs):
    p = {"part_id": pid, "name": name, "category": category, "package_type": package_type,
         "package_area": area, "quantity": qty, "attributes": attrs}
    if kind:
        p["kind"] = kind
    return p


def board_part(area, layers, substrate="FR-4"):
    return part("BOARD", f"{substrate} board, {layers} layers", "board_substrate", substrate, area, 1)


def design(design_id, area, layers, parts, substrate="FR-4"):
    return {"design_id": design_id,
            "board": {"area_mm2": area, "layers": layers, "layer_thickness_mm": 1.0, "substrate": substrate},
            "parts": parts + [board_part(area, layers, substrate)]}


def write_json(path, obj):
    path.write_text(json.dumps(obj, indent=2) + "\n")


def main():
    for d in (BOARDS, DESIGNS, CATALOG, RULES):
        d.mkdir(parents=True, exist_ok=True)

    write_brd(BOARDS / "leonardo_like.brd", LEONARDO, 68.58, 60.96, 2)
    write_brd(BOARDS / "mkr_fox_like.brd", MKR_FOX, 65.26, 26.0, 4)
    write_brd(BOARDS / "uno_wifi_like.brd", UNO_WIFI, 68.6, 53.34, 2)
    write_brd(BOARDS / "small_50x40.brd", SMALL, 50.0, 40.0, 2)

    base_parts = [
        part("RESISTOR-0402", "resistor 0402", "passive", "0402", 0.5, 10, "resistor"),
        part("CAPACITOR-0805", "capacitor 0805", "passive", "0805", 2.5, 4, "capacitor"),
        part("HEADER-6", "HEADER-6", "misc", "PINHD", 38.7, 1),
        part("MCU", "STM32F103C8T6", "ic", "QFP", 81.0, 1, pin_count=48, die_area=9.0, process_node=180.0),
    ]
    extra_ic = part("RADIO", "NRF52840-QIAA", "ic", "QFN", 49.0, 1, pin_count=73, die_area=17.64, process_node=55.0)
    write_json(DESIGNS / "base.json", design("base", 2000.0, 2, base_parts))
    write_json(DESIGNS / "base_plus_ic.json", design("base_plus_ic", 2000.0, 2, base_parts + [extra_ic]))

    write_json(DESIGNS / "disjoint_a.json", design("disjoint_a", 1500.0, 2, [
        part("SENSOR", "BME280", "misc", "LGA", 6.25, 1),
        part("ANT", "CHIP-ANTENNA", "misc", "CHIP", 3.0, 1),
    ], substrate="Polyimide"))
    write_json(DESIGNS / "disjoint_b.json", design("disjoint_b", 900.0, 4, [
        part("BUZZER", "PIEZO-12MM", "misc", "THT", 144.0, 1),
        part("RELAY", "G5V-1", "misc", "DIP", 150.0, 2),
    ], substrate="Polyimide"))

    write_json(DESIGNS / "footprint_basic.json", design("footprint_basic", 1000.0, 2, [
        part("R1", "resistor 0402", "passive", "0402", 0.5, 1, "resistor"),
        part("C1", "capacitor 0805", "passive", "0805", 2.5, 1, "capacitor"),
        part("L1", "inductor 0201", "passive", "0201", 0.18, 1, "inductor"),
    ]))

    # One unmatched part on the B side; the rule file supplies the missing claim.
    rules_common = [
        part("CAPACITOR-0402", "capacitor 0402", "passive", "0402", 0.5, 6, "capacitor"),
        part("HEADER-8", "HEADER-8", "misc", "PINHD", 51.6, 1),
    ]
    write_json(DESIGNS / "rules_a.json", design("rules_a", 1200.0, 2, rules_common + [
        part("DISPLAY", "OLED-0.96-SSD1306", "misc", "FPC", 300.0, 1),
    ]))
    write_json(DESIGNS / "rules_b.json", design("rules_b", 1200.0, 2, rules_common + [
        part("LCD", "LCD-0.96-ST7735", "misc", "FPC", 280.0, 1),
    ]))
    write_json(RULES / "rules_example.json", {"rules": [{
        "rule_id": "display-vs-lcd",
        "a": [{"part_id": "DISPLAY", "quantity": 1}],
        "b": [{"part_id": "LCD", "quantity": 1}],
        "comparator": "a_ge_b",
        "note": "OLED module carries more glass and driver silicon than the LCD",
    }]})

    catalog = {
        "ATMEGA32U4": {"Core Processor": "AVR", "Speed": "16MHz", "Program Memory Size": "32KB (16K x 16)",
                       "Supplier Device Package": "44-TQFP (10x10)", "Number of Pins": "44",
                       "Active Current per MHz": "0.60 mA/MHz"},
        "ATSAMD21G18A": {"Core Processor": "ARM Cortex-M0+", "Speed": "48MHz", "Program Memory Size": "256KB",
                         "Supplier Device Package": "48-VQFN (7x7)", "Number of Pins": "48",
                         "Active Current per MHz": "70 uA/MHz"},
        "ATMEGA4809": {"Core Processor": "megaAVR", "Speed": "20MHz", "Program Memory Size": "48KB",
                       "Supplier Device Package": "48-VQFN (6x6)", "Number of Pins": "48",
                       "Active Current per MHz": "0.55 mA/MHz"},
        "ESP32-D0WD": {"Core Processor": "Xtensa LX6", "Speed": "240MHz", "Program Memory Size": "448KB",
                       "Supplier Device Package": "48-QFN (6x6)", "Number of Pins": "48",
                       "Active Current per MHz": "0.13 mA/MHz"},
        "ATMEGA328P": {"Core Processor": "AVR", "Speed": "20MHz", "Program Memory Size": "32KB",
                       "Supplier Device Package": "32-TQFP (7x7)", "Number of Pins": "32",
                       "Active Current per MHz": "0.55 mA/MHz"},
    }
    for name, attrs in catalog.items():
        write_json(CATALOG / f"{name}.json", {"matched_name": name, "attributes": attrs})


if __name__ == "__main__":
    main()
