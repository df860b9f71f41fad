#!/usr/bin/env python3
"""Run every bundled demo through the CLI runner and collect the reports."""

import json
import pathlib
import subprocess
import sys

DEMOS = [
    ["demo", "dichotomy"],
    ["demo", "bfree"],
    ["demo", "fib"],
    ["demo", "pisot", "--a", "1", "--b", "0"],
    ["demo", "heisenberg"],
]


def main() -> int:
    out_dir = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else pathlib.Path("demo_reports")
    out_dir.mkdir(exist_ok=True)
    failures = 0
    for argv in DEMOS:
        name = argv[1]
        proc = subprocess.run([sys.executable, "-m", "nilseq.cli", *argv],
                              capture_output=True, text=True)
        path = out_dir / f"{name}.json"
        path.write_text(proc.stdout)
        status = "ok" if proc.returncode == 0 else f"exit {proc.returncode}"
        print(f"{name:12s} {status:8s} -> {path}")
        if proc.returncode != 0:
            failures += 1
            continue
        report = json.loads(proc.stdout)
        for cert in report.get("certificates", []):
            print(f"    certificate: {cert['type']}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
