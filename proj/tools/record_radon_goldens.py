#!/usr/bin/env python3
"""Record Radon reference values for the complexity and raw-metric fixtures.

Run from the repository root with Radon installed:

    python3 tools/record_radon_goldens.py

Writes tests/golden/radon_cc.json and tests/golden/radon_raw.json.
"""
import json
import pathlib
import platform

import radon
from radon.raw import analyze
from radon.visitors import ComplexityVisitor

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures" / "radon"
GOLDEN = ROOT / "tests" / "golden"


def record_cc():
    source = (FIXTURES / "complexity_cases.py").read_text(encoding="utf-8")
    visitor = ComplexityVisitor.from_code(source)
    return {fn.name: fn.complexity for fn in visitor.functions}


def record_raw():
    out = {}
    for path in sorted((FIXTURES / "raw").glob("*.py")):
        m = analyze(path.read_text(encoding="utf-8"))
        out[path.name] = {
            "loc": m.sloc,
            "multiline_string_lines": m.multi,
            "blank_lines": m.blank,
            "comment_lines": m.single_comments,
        }
    return out


def main():
    meta = {"radon": radon.__version__, "python": platform.python_version()}
    GOLDEN.mkdir(parents=True, exist_ok=True)
    for name, values in (("radon_cc.json", record_cc()), ("radon_raw.json", record_raw())):
        payload = {"recorded_with": meta, "values": values}
        (GOLDEN / name).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        print(f"wrote {name}: {len(values)} entries")


if __name__ == "__main__":
    main()
