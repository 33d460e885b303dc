#!/usr/bin/env python3
"""Regenerate the shipped fixture files from the library itself.

The algebra fixtures are the CLI extraction output for the corresponding
generator spans, so the extraction byte-identity checks compare against
files this script wrote.  Rerunning must be a no-op on a clean tree.
"""

import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from megalie.analysis import canonical_json
from megalie.algebra import algebra_to_dict
from megalie.poly import parse_poly
from megalie.vectorfield import (
    FAMILY_VARIABLES,
    extract_structure,
    fields_to_dict,
    pointmap_to_dict,
    PointMap,
    realize_family,
)

FIXTURES = ROOT / "fixtures"


def x_power(k: int):
    return parse_poly("x" + (f"^{k}" if k > 1 else "") if k else "1", FAMILY_VARIABLES)


def _param_suffix(k: int) -> str:
    return "1" if k == 0 else ("x" if k == 1 else f"x{k}")


def build_family():
    fields = [
        ("Du", realize_family("Du")),
        ("Dt", realize_family("Dt")),
        ("Pt", realize_family("Pt")),
        ("F1", realize_family("F1")),
        ("F2", realize_family("F2")),
    ]
    for k in range(4):
        fields.append((f"D{_param_suffix(k)}", realize_family("D", x_power(k))))
    for k in range(4):
        fields.append((f"G{_param_suffix(k)}", realize_family("G", x_power(k))))
    return fields


def main():
    FIXTURES.mkdir(exist_ok=True)
    (FIXTURES / "maps").mkdir(exist_ok=True)

    fields = build_family()
    table = dict(fields)
    (FIXTURES / "wave_eq_family.json").write_text(
        canonical_json(fields_to_dict(FAMILY_VARIABLES, fields)), encoding="utf-8"
    )

    m5_fields = [(n, table[n]) for n in ("G1", "F1", "F2", "Pt", "Dt")]
    m5 = extract_structure(m5_fields, name="m5")
    (FIXTURES / "m5.json").write_text(canonical_json(algebra_to_dict(m5)), encoding="utf-8")

    sl2d_fields = [(n, table[n]) for n in ("D1", "Dx", "Dx2")]
    sl2d = extract_structure(sl2d_fields, name="sl2d")
    (FIXTURES / "sl2d.json").write_text(canonical_json(algebra_to_dict(sl2d)), encoding="utf-8")

    v = FAMILY_VARIABLES
    maps = {
        # time shift: the flow of Pt at time 1
        "tshift": PointMap(
            v,
            {"t": parse_poly("t + 1", v)},
            {"t": parse_poly("t - 1", v)},
        ),
        # scaling of u (flow of Du with factor 2)
        "uscale": PointMap(
            v,
            {
                "u": parse_poly("2*u", v),
                "u_x": parse_poly("2*u_x", v),
                "g": parse_poly("2*g", v),
            },
            {
                "u": parse_poly("1/2*u", v),
                "u_x": parse_poly("1/2*u_x", v),
                "g": parse_poly("1/2*g", v),
            },
        ),
        # gauge by x^2: u -> u + x^2, with the induced u_x and g changes
        "ugauge": PointMap(
            v,
            {
                "u": parse_poly("u + x^2", v),
                "u_x": parse_poly("u_x + 2*x", v),
                "g": parse_poly("g - 2*f", v),
            },
            {
                "u": parse_poly("u - x^2", v),
                "u_x": parse_poly("u_x - 2*x", v),
                "g": parse_poly("g + 2*f", v),
            },
        ),
    }
    for name, pm in maps.items():
        (FIXTURES / "maps" / f"{name}.json").write_text(
            canonical_json(pointmap_to_dict(pm)), encoding="utf-8"
        )
    print(f"wrote fixtures under {FIXTURES}")


if __name__ == "__main__":
    main()
