"""Long-time average of F as an order parameter over the (alpha, lambda) plane.

A coarse sweep: for each alpha the quench strength crosses its critical
value and the normalized average drops from order one to nearly zero.
The alpha = 0.9 row sits past the ground-state transition where no
critical field exists; the sweep records the row but leaves the overlay
column empty. Its normalized values swing wildly because the lambda = 0
reference average is itself nearly zero there, which is the point: the
normalization only means something on the ordered side.

Writes sweep.csv and a gnuplot-style heatmap.dat into demos/out/sweep/.
The full-resolution map (N = 400, a 21 x 21 or finer grid, averaging
horizon 1e4) is hours-scale on one core; run it through the CLI when
needed:

    lmg-otoc sweep --alphas 0,0.05,...,1.0 --lambdas 0,0.125,...,2.5 \
        --n 400 --out runs/heatmap-full

This demo keeps N = 80 and a horizon of 2000, which finishes in well
under a minute and already shows the cliff.
"""

import os

import numpy as np

from lmg_otoc import AveragingConfig, quench_sweep
from lmg_otoc.output import ResultTable, emit_heatmap_dat, write_csv

OUT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "out",
                   "sweep")
os.makedirs(OUT, exist_ok=True)

alphas = (0.2, 0.4, 0.9)
lambdas = tuple(np.round(np.linspace(0.0, 2.5, 11), 10))
grid = quench_sweep(alphas, lambdas, n_spins=80,
                    config=AveragingConfig(total_time=2000.0, dt=0.5))

rows = []
for i, alpha in enumerate(grid.alphas):
    lam_c = grid.lambda_c[i]
    print(f"alpha = {alpha}: lambda_c = "
          f"{'undefined' if lam_c is None else lam_c}")
    for j, lam in enumerate(grid.lambdas):
        cell = grid.cells[i][j]
        rows.append([alpha, lam, cell.value if cell else None,
                     lam_c if lam_c is not None else None])
        if cell is not None:
            marker = " <- lambda_c" if lam_c is not None and abs(
                lam - lam_c) < 0.125 else ""
            print(f"  lambda = {lam:5.2f}  Fbar_norm = "
                  f"{cell.value:7.4f}{marker}")

table = ResultTable(columns=("alpha", "lambda", "fbar_norm", "lambda_c"),
                    units=("dimensionless", "field", "dimensionless",
                           "field"),
                    rows=rows)
write_csv(os.path.join(OUT, "sweep.csv"), table)
heat = ResultTable(columns=("alpha", "lambda", "fbar_norm"),
                   units=("dimensionless", "field", "dimensionless"),
                   rows=[r[:3] for r in rows if r[2] is not None])
emit_heatmap_dat(os.path.join(OUT, "heatmap.dat"), heat)
print(f"outputs in {OUT}")
