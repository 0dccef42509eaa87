"""Reproduce the frozen harmonic-map regression values in tests/_cache.py.

Bisection to tol_a = 1e-10 with every shot at rel_tol = 1e-12,
abs_tol = 1e-14 and no extra tightening in the last bisection phase.
Takes a few minutes per d on one core.

    python notebooks/freeze_oracle.py
"""
import json
import time

from shrinkers import ModelParams, find_shrinkers
from shrinkers.ode import IntegratorConfig
from shrinkers.shooting import ShootConfig

cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)
scfg = ShootConfig(tol_a=1e-10, refine_tol_factor=1.0)

out = {}
for d in (3, 4, 5, 6):
    t0 = time.time()
    sols = find_shrinkers(ModelParams.hm(d), 3, cfg, scfg)
    out[d] = [(s.a, s.b) for s in sols]
    print(f"d={d} ({time.time() - t0:.0f} s)")
    for s in sols:
        print(f"  n={s.n}  a={s.a!r}  b={s.b!r}  energy={s.energy:.8f}  max type-I={s.max_type1:.4g}")

print(json.dumps(out, indent=1))
