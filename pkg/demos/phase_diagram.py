"""A (h0, mu) phase diagram from a parameter sweep.

Each cell runs the free-boundary solver and records the verdict. The sweep
reads ``configs/sweep.cfg`` and writes CSV and JSON-lines output to
``demo_out/``.

Run with ``python demos/phase_diagram.py``.
"""

from pathlib import Path

from lesliefront.harness import parse_sweep, run_sweep

here = Path(__file__).parent
spec = parse_sweep((here / "configs" / "sweep.cfg").read_text())
rows, _ = run_sweep(spec, out_dir=Path("demo_out"))

axes = dict(spec.axes)
h0s = axes["h0"]
mus = axes["mu"]
grid = {(r["h0"], r["mu"]): r["verdict"] for r in rows}
print("h0 \\ mu " + "".join(f"{m:>13g}" for m in mus))
for h0 in h0s:
    print(f"{h0:7g} " + "".join(f"{grid[h0, m]:>13s}" for m in mus))
print("summary written to demo_out/sweep_summary.csv")
