"""Structured scan reports and their serializations.

A ScanReport is a named table: every row carries its full parameter
provenance, the measured value, the reference bound, their ratio and a
pass flag.  CSV, JSON and plotdata emissions contain identical content in
identical column order; given the same seed the bytes are reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

SCHEMA_VERSION = 1


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, complex):
        return f"{v.real:.17g}{v.imag:+.17g}j"
    return str(v)


@dataclass
class ScanReport:
    name: str
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add_row(self, *values) -> None:
        if len(values) != len(self.columns):
            raise ValueError(
                f"row width {len(values)} != {len(self.columns)} columns"
            )
        self.rows.append(tuple(values))

    def column(self, name: str) -> list:
        idx = self.columns.index(name)
        return [r[idx] for r in self.rows]

    @property
    def all_pass(self) -> bool:
        if "pass" not in self.columns:
            return True
        return all(bool(v) for v in self.column("pass"))

    # -- emission ---------------------------------------------------------

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        lines += [",".join(_fmt(v) for v in row) for row in self.rows]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "columns": self.columns,
            "rows": [[_fmt(v) for v in row] for row in self.rows],
            "metadata": {k: _fmt(v) for k, v in sorted(self.metadata.items())},
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n"

    def to_plotdata(self) -> tuple[str, str]:
        """Whitespace-separated columns plus a plotting script stub."""
        lines = ["# " + " ".join(self.columns)]
        lines += [" ".join(_fmt(v) for v in row) for row in self.rows]
        data = "\n".join(lines) + "\n"
        script = (
            "#!/usr/bin/env python3\n"
            f'"""Plot stub for scan {self.name!r}."""\n'
            "import sys\n"
            "import numpy as np\n"
            "import matplotlib.pyplot as plt\n\n"
            f"cols = {self.columns!r}\n"
            f"data = np.genfromtxt(sys.argv[1] if len(sys.argv) > 1 else\n"
            f"                     {self.name + '.dat'!r}, names=None)\n"
            "data = np.atleast_2d(data)\n"
            "plt.plot(data[:, 0], data[:, cols.index('measured')], 'o-')\n"
            "plt.xlabel(cols[0]); plt.ylabel('measured')\n"
            f"plt.title({self.name!r})\n"
            "plt.savefig(sys.argv[2] if len(sys.argv) > 2 else\n"
            f"            {self.name + '.png'!r}, dpi=150)\n"
        )
        return data, script

    def write(self, outdir, formats=("csv", "json", "plotdata")) -> list[Path]:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        written = []
        try:
            if "csv" in formats:
                p = outdir / f"{self.name}.csv"
                p.write_text(self.to_csv())
                written.append(p)
            if "json" in formats:
                p = outdir / f"{self.name}.json"
                p.write_text(self.to_json())
                written.append(p)
            if "plotdata" in formats:
                data, script = self.to_plotdata()
                p = outdir / f"{self.name}.dat"
                p.write_text(data)
                written.append(p)
                p2 = outdir / f"plot_{self.name}.py"
                p2.write_text(script)
                written.append(p2)
        except OSError as exc:
            raise OSError(f"writing report {self.name!r} under {outdir}: {exc}") from exc
        return written
