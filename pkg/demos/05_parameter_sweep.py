# %% [markdown]
# The overhead rate over a grid of link parameters, written as a
# long-format CSV ready for plotting.  Same result as
# `linkrate sweep --u-grid 0.05:0.95:10 --d-grid 0.05:0.95:10 --out sweep.csv`.

# %%
import sys
import tempfile
from pathlib import Path

from linkrate.cli import main
from linkrate.records import read_csv

out = Path(tempfile.mkdtemp()) / "sweep.csv"
main(["sweep", "--u-grid", "0.05:0.95:10", "--d-grid", "0.05:0.95:10", "--out", str(out)])
rows = read_csv(out)

# %% [markdown]
# Rates grow with the up-probability: long open runs mean long messages.
# On the anti-diagonal u + d = 1 the first-order bound is already exact.

# %%
def show(r):
    print(f"u={float(r['u']):.2f} d={float(r['d']):.2f}  rate={float(r['entropy_rate']):.6f}  "
          f"first-order={float(r['first_order']):.6f}  j_used={r['j_used']}")
for r in rows[::11]:
    show(r)
print("anti-diagonal:")
for r in rows:
    if abs(float(r["u"]) + float(r["d"]) - 1) < 1e-9:
        show(r)
slow = [r for r in rows if r["converged"] != "true"]
print("points that hit the j cap:", len(slow), file=sys.stderr)
