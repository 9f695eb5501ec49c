"""Seeded self-check suites behind ``bellising verify``."""
from __future__ import annotations

import numpy as np

from .evolution import propagator, spectral_oracle
from .gates import teleport, verify_equivalences
from .model import PhysicalParams

SUITES = ("oracle", "unitarity", "gates", "teleportation")


def _random_params(rng, n):
    for _ in range(n):
        J = rng.uniform(-10, 10, 3)
        B1, B2 = rng.uniform(-10, 10, 2)
        yield PhysicalParams(J, B1, B2, int(rng.integers(1, 4))), float(rng.uniform(0, 10))


def oracle_suite(rng, tol, draws=1000) -> dict:
    worst = 0.0
    for p, t in _random_params(rng, draws):
        worst = max(worst, float(np.abs(propagator(p, t).matrix - spectral_oracle(p, t).matrix).max()))
    return {"draws": draws, "max_error": worst, "tol": tol, "pass": worst < tol}


def unitarity_suite(rng, tol, draws=1000) -> dict:
    worst_u = worst_det = 0.0
    for p, t in _random_params(rng, draws):
        U = propagator(p, t)
        worst_u = max(worst_u, U.unitarity_error())
        worst_det = max(worst_det, abs(U.det() - 1))
    worst = max(worst_u, worst_det)
    return {"draws": draws, "max_unitarity_error": worst_u, "max_det_error": worst_det,
            "tol": tol, "pass": worst < tol}


def gates_suite(rng, tol) -> dict:
    lines = verify_equivalences(tol)
    return {"identities": lines, "tol": tol, "pass": all(x["pass"] for x in lines)}


def teleportation_suite(rng, tol, draws=100) -> dict:
    worst_f = worst_p = 0.0
    table_ok = True
    for _ in range(draws):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        v /= np.linalg.norm(v)
        for basis in ("computational", "bell"):
            for o in teleport(v[0], v[1], basis).values():
                worst_f = max(worst_f, 1 - o.fidelity)
                worst_p = max(worst_p, abs(o.probability - 0.25))
                table_ok &= o.matches_table
    ok = table_ok and worst_f < tol and worst_p < tol
    return {"draws": draws, "max_infidelity": worst_f, "max_probability_error": worst_p,
            "table_matches": bool(table_ok), "tol": tol, "pass": bool(ok)}


_RUNNERS = {
    "oracle": oracle_suite,
    "unitarity": unitarity_suite,
    "gates": gates_suite,
    "teleportation": teleportation_suite,
}


def run_suites(seed: int = 0, tol: float = 1e-10, only=None) -> dict:
    names = SUITES if not only else tuple(only)
    results = {}
    for name in names:
        # each suite gets its own stream so selecting a subset does not change results
        rng = np.random.default_rng([seed, SUITES.index(name)])
        results[name] = _RUNNERS[name](rng, tol)
    return {"seed": seed, "suites": results, "pass": all(r["pass"] for r in results.values())}
