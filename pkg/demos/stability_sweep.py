"""End-to-end stability sweep: deficits against hull distances.

Generates the boundary-bites family over a range of perturbation sizes, runs
the full verdict pipeline on each instance, writes the CSV, and renders the
log-log scatter of hull distance against deficit with its fitted slope.
Outputs land in demos/output/.
"""

import os
import tempfile

from bmstab.cli import fit_loglog_slope, render_loglog_svg, sweep

out_dir = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(out_dir, exist_ok=True)
csv_path = os.path.join(out_dir, "bites_sweep.csv")
svg_path = os.path.join(out_dir, "bites_sweep.svg")

config = f"""
family=boundary-bites
n=2
m=64
t=1/2
tau=1/2
eps_list=1/256,1/128,1/64,1/32,1/16,1/8
seeds=1,2,3
out={csv_path}
"""
with tempfile.NamedTemporaryFile("w", suffix=".cfg", delete=False) as fh:
    fh.write(config)
    cfg_path = fh.name

text = sweep(cfg_path)
with open(csv_path, "w") as fh:
    fh.write(text)
os.unlink(cfg_path)

rows = text.splitlines()
header = rows[0].split(",")
di = header.index("delta_norm")
hi = header.index("D_star")
deltas, dstars = [], []
for row in rows[1:]:
    parts = row.split(",")
    d, h = float(parts[di]), float(parts[hi])
    if d > 0 and h > 0:
        deltas.append(d)
        dstars.append(h)

slope, _ = fit_loglog_slope(deltas, dstars)
with open(svg_path, "w") as fh:
    fh.write(render_loglog_svg(deltas, dstars, "delta_norm", "D_star"))

print(text)
print(f"fitted log-log slope of D* against delta: {slope:.3f}")
print(f"csv: {csv_path}")
print(f"svg: {svg_path}")
