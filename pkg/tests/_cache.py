"""Session-wide memo of the expensive runs shared by several test modules."""
from functools import lru_cache

from shrinkers import models, shooting
from shrinkers.models import ModelParams

# Frozen from the oracle run: bisection to tol_a = 1e-10 with every shot at
# rel_tol = 1e-12, abs_tol = 1e-14 (notebooks/freeze_oracle.py).
HM_ORACLE = {
    3: [(2.7387531258560376, 2.1439374598504877),
        (29.27644268550685, 1.3862770570563925),
        (314.1829926872784, 1.627410609886533)],
    4: [(2.1834781869758233, 1.879431633182245),
        (20.491742316294562, 1.536668562925625),
        (188.99989177599753, 1.5744981674589995)],
    5: [(2.2354285270440526, 1.7291557130565098),
        (24.90379260837572, 1.5663138914338306),
        (267.79422779489596, 1.570923496030634)],
    6: [(2.958087938967588, 1.6303247410813464),
        (71.14830275327589, 1.5706863110902873),
        (1646.5709750887409, 1.5707965322313093)],
}


def params(model, d):
    return ModelParams.hm(d) if model == "hm" else ModelParams.ym(d)


@lru_cache(maxsize=None)
def find(model, d, n_max):
    return tuple(shooting.find_shrinkers(params(model, d), n_max))


@lru_cache(maxsize=None)
def sweep(model, d, a_min=None, a_max=50.0, n=500):
    if a_min is None:
        # (0, 50] sampled from 1e-3 upwards
        a_min = 1e-3
    return shooting.bracket_sweep(params(model, d), a_min, a_max, n, keep_trajectories=True)
