"""Seeded numerical experiments.

Each experiment returns an :class:`ExperimentResult` whose ``rows`` form a
table with a fixed column order (``columns``). Per-sample randomness comes
from ``derive_seed(seed, index)``, so results depend only on
``(name, samples, seed)`` and are bit-reproducible.

CSV columns
-----------
qubit_crosscheck      sample, kind, param, b_iterative, b_magic, gap, unitarity,
                      complement_lambda_min, complement_marginal,
                      weight_crosscheck, weyl_bound_gap, monotone
submult               sample, b_E, b_F, b_EF, product, gap, violation,
                      product_deviation, monotone, weyl_bound_gap
product_depolarizing  sample, kind, d_F, b_E, b_EF, expected, error, monotone,
                      weyl_bound_gap
max_boundariness      sample, kind, dim, n, b, bound, fixture
state_tightness       sample, dim, lambda_min, distance, expected, error,
                      scan_max, scan_excess
lemma_R               sample, kind, value_R, radius, gap, norm, mu_1, mu_2
polytope_maps         shape, x, y, b, m
"""
import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize

from . import convex_base, linalg
from .boundariness import (
    OptimizerConfig,
    b_channel,
    b_channel_qubit,
    b_povm,
    b_state,
    entangled_radius_iterative,
)
from .qobjects import (
    RandomSource,
    derive_seed,
    depolarizing_channel,
    erasure_channel,
    identity_channel,
    mix_channels,
    random_channel,
    random_povm,
    random_state,
    tensor_channels,
    trivial_povm,
)

DEFAULT_TOLERANCES = {
    "qubit_crosscheck": {"gap": 1e-6, "fixture": 1e-9, "unitarity": 1e-8,
                         "boundary": 1e-8, "psd": 1e-9, "marginal": 1e-9,
                         "crosscheck": 1e-7, "weyl": 1e-9},
    "submult": {"violation": 1e-6, "weyl": 1e-9},
    "product_depolarizing": {"error": 1e-5},
    "max_boundariness": {"state": 1e-9, "povm": 1e-9, "channel": 1e-6},
    "state_tightness": {"distance": 1e-9, "scan": 1e-9},
    "lemma_R": {"norm": 1e-6, "value": 1e-6},
    "polytope_maps": {"order": 1e-10, "exact": 1e-9},
}


@dataclass
class ExperimentSpec:
    name: str
    samples: int = 20
    seed: int = 0
    dims: list = field(default_factory=list)
    tolerances: dict = field(default_factory=dict)
    output_path: str = ""

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.name not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.name!r}; choose from {sorted(EXPERIMENTS)}")


@dataclass
class ExperimentResult:
    name: str
    passed: bool
    statistics: dict
    columns: list
    rows: list

    def write_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(self.columns)
            for row in self.rows:
                w.writerow([_csv_value(row[c]) for c in self.columns])

    def summary(self):
        return {"name": self.name, "pass": self.passed, "statistics": self.statistics,
                "rows": len(self.rows)}


def _csv_value(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    return v


def _tol(name, overrides):
    t = dict(DEFAULT_TOLERANCES[name])
    t.update(overrides or {})
    return t


def _monotone(report):
    res = report.witness
    return all(np.all(np.diff(h) >= 0) for h in res.histories)


def _gap_stats(values):
    v = np.asarray(values, dtype=float)
    return {"min": float(v.min()), "mean": float(v.mean()), "max": float(v.max())}


# ----------------------------------------------------------------------------


def exp_qubit_crosscheck(samples=100, seed=0, tolerances=None, cfg=None):
    """Iterative ascent versus the magic-basis closed form on qubit channels.

    Also validates the decomposition returned by the ascent (unitary
    optimizer, boundary complement) and includes erasure and depolarizing
    fixtures against their exact values.
    """
    tol = _tol("qubit_crosscheck", tolerances)
    cfg = cfg or OptimizerConfig()
    rows, violations = [], 0
    cases = [("random", None, random_channel(2, rng=RandomSource(derive_seed(seed, i))))
             for i in range(samples)]
    for p in np.round(np.arange(1, 10) / 10, 1):
        cases.append(("erasure", float(p), erasure_channel(np.diag([p, 1 - p]))))
    cases.append(("depolarizing", 0.25, depolarizing_channel(2)))
    for i, (kind, param, F) in enumerate(cases):
        it = b_channel(F, cfg)
        mb = b_channel_qubit(F)
        r = it.residuals
        row = {
            "sample": i, "kind": kind, "param": "" if param is None else param,
            "b_iterative": it.b, "b_magic": mb.b, "gap": abs(it.b - mb.b),
            "unitarity": r["unitarity"],
            "complement_lambda_min": r["complement_lambda_min"],
            "complement_marginal": r["complement_marginal"],
            "weight_crosscheck": r["weight_crosscheck"],
            "weyl_bound_gap": r["weyl_bound_gap"],
            "monotone": _monotone(it),
        }
        bad = (
            row["gap"] > tol["gap"]
            or row["unitarity"] > tol["unitarity"]
            or row["complement_lambda_min"] > tol["boundary"]
            or row["complement_lambda_min"] < -tol["psd"]
            or row["complement_marginal"] > tol["marginal"]
            or row["weight_crosscheck"] > tol["crosscheck"]
            or row["weyl_bound_gap"] < -tol["weyl"]
            or not row["monotone"]
        )
        if kind == "erasure":
            exact = param * (1 - param)
            bad |= abs(it.b - exact) > tol["fixture"] or abs(mb.b - exact) > tol["fixture"]
        if kind == "depolarizing":
            bad |= abs(it.b - 0.25) > tol["fixture"] or abs(mb.b - 0.25) > tol["fixture"]
        violations += bool(bad)
        rows.append(row)
    gaps = [row["gap"] for row in rows if row["kind"] == "random"] or [0.0]
    stats = {"violations": violations, "max_gap": float(max(gaps)),
             "max_weight_crosscheck": float(max(row["weight_crosscheck"] for row in rows))}
    return ExperimentResult("qubit_crosscheck", violations == 0, stats,
                            list(rows[0].keys()), rows)


def product_deviation(U, dims):
    """Frobenius distance from ``U`` to the nearest product operator ``A (x) B``.

    Computed from the singular values of the realigned matrix.
    """
    d1, d2 = dims
    T = np.asarray(U).reshape(d1, d2, d1, d2).transpose(0, 2, 1, 3).reshape(d1 * d1, d2 * d2)
    s = np.linalg.svd(T, compute_uv=False)
    return float(np.sqrt(max(np.sum(s[1:] ** 2), 0.0)))


def exp_submultiplicativity(samples=50, seed=0, tolerances=None, restarts=32):
    """Check ``b(E (x) F) <= b(E) b(F)`` on random qubit pairs.

    The ascent for ``E (x) F`` can only under-estimate the maximum, i.e.
    over-estimate ``b(E (x) F)``, so a shortfall of the optimizer never
    produces a false violation. The gap ``b(E)b(F) - b(E (x) F)`` is
    reported with its sign; equality is neither asserted nor excluded.
    """
    tol = _tol("submult", tolerances)
    cfg = OptimizerConfig(restarts=max(restarts, 32), seed=seed)
    rows, violations = [], 0
    for i in range(samples):
        src = RandomSource(derive_seed(seed, i))
        E = random_channel(2, rng=src.child(0))
        F = random_channel(2, rng=src.child(1))
        bE, bF = b_channel_qubit(E).b, b_channel_qubit(F).b
        rep = b_channel(tensor_channels(E, F), cfg)
        prod = bE * bF
        row = {
            "sample": i, "b_E": bE, "b_F": bF, "b_EF": rep.b, "product": prod,
            "gap": prod - rep.b, "violation": rep.b > prod + tol["violation"],
            "product_deviation": product_deviation(rep.optimizer, (2, 2)),
            "monotone": _monotone(rep), "weyl_bound_gap": rep.residuals["weyl_bound_gap"],
        }
        bad = row["violation"] or not row["monotone"] or row["weyl_bound_gap"] < -tol["weyl"]
        violations += bool(bad)
        rows.append(row)
    depol = depolarizing_channel(2)
    fixture = b_channel(tensor_channels(depol, depol), cfg).b
    fixture_error = abs(fixture - 1 / 16)
    violations += fixture_error > tol["violation"]
    stats = {"violations": violations, "gap": _gap_stats([r["gap"] for r in rows]),
             "product_deviation": _gap_stats([r["product_deviation"] for r in rows]),
             "depolarizing_fixture_b": fixture, "depolarizing_fixture_error": fixture_error}
    return ExperimentResult("submult", violations == 0, stats, list(rows[0].keys()), rows)


def exp_product_depolarizing(samples=20, seed=0, d_F=2, tolerances=None, restarts=32):
    """``b(E (x) F) = b(E) / d_F^2`` for qubit ``E`` and ``F`` fully depolarizing."""
    if d_F not in (2, 3):
        raise ValueError("d_F must be 2 or 3")
    tol = _tol("product_depolarizing", tolerances)
    cfg = OptimizerConfig(restarts=max(restarts, 32), seed=seed)
    F = depolarizing_channel(d_F)
    cases = [("random", random_channel(2, rng=RandomSource(derive_seed(seed, i))))
             for i in range(samples)]
    cases.append(("near_identity", mix_channels([identity_channel(2), depolarizing_channel(2)],
                                                [0.99, 0.01])))
    cases.append(("depolarizing", depolarizing_channel(2)))
    rows, violations = [], 0
    for i, (kind, E) in enumerate(cases):
        bE = b_channel_qubit(E).b
        rep = b_channel(tensor_channels(E, F), cfg)
        expected = bE / d_F**2
        row = {"sample": i, "kind": kind, "d_F": d_F, "b_E": bE, "b_EF": rep.b,
               "expected": expected, "error": abs(rep.b - expected), "monotone": _monotone(rep),
               "weyl_bound_gap": rep.residuals["weyl_bound_gap"]}
        violations += row["error"] > tol["error"] or not row["monotone"]
        rows.append(row)
    stats = {"violations": int(violations), "max_error": float(max(r["error"] for r in rows))}
    return ExperimentResult("product_depolarizing", violations == 0, stats,
                            list(rows[0].keys()), rows)


def exp_max_boundariness(samples=200, seed=0, tolerances=None):
    """Upper bounds ``1/d``, ``1/n`` and ``1/d^2`` and the maximally mixed fixtures."""
    tol = _tol("max_boundariness", tolerances)
    rows = []
    violations = 0

    def add(kind, dim, n, b, bound, fixture, t):
        nonlocal violations
        if fixture:
            bad = abs(b - bound) > t
        else:
            # strictly below the bound almost surely
            bad = b > bound + t or b >= bound
        violations += bool(bad)
        rows.append({"sample": len(rows), "kind": kind, "dim": dim, "n": n, "b": b,
                     "bound": bound, "fixture": fixture})

    for d in (2, 3):
        add("state", d, "", b_state(np.eye(d) / d).b, 1 / d, True, tol["state"])
        for i in range(samples):
            rho = random_state(d, RandomSource(derive_seed(seed, 1000 * d + i)))
            add("state", d, "", b_state(rho).b, 1 / d, False, tol["state"])
    for n in (2, 3):
        add("povm", 2, n, b_povm(trivial_povm(2, n)).b, 1 / n, True, tol["povm"])
        for i in range(samples):
            m = random_povm(2, n, RandomSource(derive_seed(seed, 2000 + 100 * n + i)))
            add("povm", 2, n, b_povm(m).b, 1 / n, False, tol["povm"])
    depol = depolarizing_channel(2)
    add("channel", 2, "", b_channel(depol).b, 0.25, True, tol["channel"])
    n_ch = max(1, samples // 10)
    for i in range(n_ch):
        F = random_channel(2, rng=RandomSource(derive_seed(seed, 5000 + i)))
        add("channel", 2, "", b_channel(F).b, 0.25, False, tol["channel"])
    for i in range(n_ch):
        R = random_channel(2, rng=RandomSource(derive_seed(seed, 6000 + i)))
        F = mix_channels([depol, R], [0.99, 0.01])
        add("perturbed_depolarizing", 2, "", b_channel(F).b, 0.25, False, tol["channel"])
    stats = {"violations": violations}
    for kind in ("state", "povm", "channel", "perturbed_depolarizing"):
        sel = [r for r in rows if r["kind"] == kind and not r["fixture"]]
        stats[f"max_ratio_{kind}"] = float(max(r["b"] / r["bound"] for r in sel))
    return ExperimentResult("max_boundariness", violations == 0, stats,
                            list(rows[0].keys()), rows)


def _trace_distances(rho, pure_vectors):
    """``||rho - |v><v| ||_1`` for every row ``v``."""
    P = np.einsum("ni,nj->nij", pure_vectors, pure_vectors.conj())
    w = np.linalg.eigvalsh(rho[None, :, :] - P)
    return np.abs(w).sum(axis=1)


def exp_state_tightness(samples=200, seed=0, tolerances=None, scan=1000):
    """Farthest pure state from ``rho`` in trace norm is at distance ``2(1 - lambda_min)``."""
    tol = _tol("state_tightness", tolerances)
    rows, violations = [], 0
    for d in (2, 3):
        for i in range(samples):
            src = RandomSource(derive_seed(seed, 10_000 * d + i))
            rho = random_state(d, src.child(0)).rho
            rep = b_state(rho)
            dist = linalg.trace_norm(rho - rep.optimizer)
            expected = 2 * (1 - rep.b)
            V = src.child(1).complex_normal((scan, d))
            V /= np.linalg.norm(V, axis=1, keepdims=True)
            scan_max = float(_trace_distances(rho, V).max())
            row = {"sample": len(rows), "dim": d, "lambda_min": rep.b, "distance": dist,
                   "expected": expected, "error": abs(dist - expected),
                   "scan_max": scan_max, "scan_excess": scan_max - expected}
            violations += row["error"] > tol["distance"] or row["scan_excess"] > tol["scan"]
            rows.append(row)
    stats = {"violations": int(violations), "max_error": float(max(r["error"] for r in rows)),
             "max_scan_excess": float(max(r["scan_excess"] for r in rows))}
    return ExperimentResult("state_tightness", violations == 0, stats, list(rows[0].keys()), rows)


# ----------------------------------------------------------- set R, d = 2


def _hermitian_from(p, d):
    H = np.zeros((d, d), dtype=complex)
    iu = np.triu_indices(d, 1)
    k = len(iu[0])
    H[np.diag_indices(d)] = p[:d]
    H[iu] = p[d:d + k] + 1j * p[d + k:d + 2 * k]
    H[(iu[1], iu[0])] = np.conj(H[iu])
    return H


def schmidt_vector(theta, d=2):
    """``sum_j sqrt(mu_j) |e_j>|f_j>`` from unitary generators and Schmidt weights."""
    n = d * d
    Ue = expm(1j * _hermitian_from(theta[:n], d))
    Uf = expm(1j * _hermitian_from(theta[n:2 * n], d))
    mu = np.clip(theta[2 * n:], 0.0, None)
    return (Ue @ np.diag(np.sqrt(mu)) @ Uf.T).reshape(-1)


def maximize_over_R(D, starts=100, rng=None, d=2, initial_mu=None):
    """Local search for ``max <y|D|y>`` over ``{y : tr_1 |y><y| <= I/d}``.

    The Schmidt weights are box-constrained to ``[0, 1/d]``, which is exactly
    the defining condition of the set.
    """
    rng = rng or RandomSource(0)
    n = d * d
    bounds = [(None, None)] * (2 * n) + [(0.0, 1.0 / d)] * d

    def neg(theta):
        y = schmidt_vector(theta, d)
        return -float(np.real(y.conj() @ D @ y))

    best = None
    for _ in range(starts):
        mu0 = rng.gen.uniform(0, 1.0 / d, size=d) if initial_mu is None else np.asarray(initial_mu)
        th0 = np.concatenate([rng.normal(2 * n), mu0])
        res = minimize(neg, th0, method="L-BFGS-B", bounds=bounds)
        if best is None or -res.fun > best[0]:
            best = (-res.fun, res.x, -neg(th0))
    value, theta, start_value = best
    return value, theta, start_value


def exp_lemma_R(samples=10, seed=0, tolerances=None, starts=100):
    """Maximizers of a positive quadratic form over the set R are unit vectors."""
    tol = _tol("lemma_R", tolerances)
    rows, violations = [], 0
    cases = [("identity", np.eye(4, dtype=complex))]
    for i in range(samples):
        src = RandomSource(derive_seed(seed, i))
        if i % 2 == 0:
            G = src.complex_normal((4, 4))
            cases.append(("wishart", G @ G.conj().T))
        else:
            F = random_channel(2, rng=src)
            cases.append(("choi_inverse", np.linalg.inv(F.choi)))
    for i, (kind, D) in enumerate(cases):
        D = (D + D.conj().T) / 2
        scale = float(np.linalg.eigvalsh(D)[-1])
        radius = entangled_radius_iterative(D).r
        value, theta, _ = maximize_over_R(D, starts, RandomSource(derive_seed(seed, 100_000 + i)))
        y = schmidt_vector(theta)
        norm = float(np.linalg.norm(y))
        mu = np.sort(np.clip(theta[-2:], 0, None))
        row = {"sample": i, "kind": kind, "value_R": value, "radius": radius,
               "gap": value - radius, "norm": norm, "mu_1": float(mu[0]), "mu_2": float(mu[1])}
        violations += abs(norm - 1) > tol["norm"] or abs(value - radius) > tol["value"] * scale
        rows.append(row)
    stats = {"violations": int(violations), "max_abs_gap": float(max(abs(r["gap"]) for r in rows))}
    return ExperimentResult("lemma_R", violations == 0, stats, list(rows[0].keys()), rows)


# ------------------------------------------------------------- polytope grids


def triangle_grid(resolution):
    return [(i / resolution, j / resolution)
            for i in range(resolution + 1) for j in range(resolution + 1 - i)]


def square_grid(resolution):
    return [(i / resolution, j / resolution)
            for i in range(resolution + 1) for j in range(resolution + 1)]


def exp_polytope_maps(resolution=100, tolerances=None, csv_path=None):
    """Boundariness and mixedness maps of the triangle and the square."""
    if resolution < 10:
        raise ValueError("resolution must be >= 10")
    tol = _tol("polytope_maps", tolerances)
    rows, violations = [], 0
    stats = {}
    shapes = [("triangle", convex_base.triangle(), triangle_grid(resolution), 1 / 3),
              ("square", convex_base.square(), square_grid(resolution), 1 / 2)]
    for name, B, grid, bmax in shapes:
        corners = {tuple(v[1:]) for v in B.vertices}
        for x, y in grid:
            w = convex_base.vertex_weights(B, B.lift([x, y]))
            b, m = float(w.min()), float(1 - w.max())
            rows.append({"shape": name, "x": x, "y": y, "b": b, "m": m})
            violations += b > m + tol["order"]
            if (x, y) in corners:
                violations += abs(b) > tol["exact"] or abs(m) > tol["exact"]
        top = max(r["b"] for r in rows if r["shape"] == name)
        stats[f"max_b_{name}"] = top
        violations += not (bmax - 2 / resolution <= top <= bmax + tol["exact"])
    stats["violations"] = int(violations)
    result = ExperimentResult("polytope_maps", violations == 0, stats, ["shape", "x", "y", "b", "m"], rows)
    if csv_path:
        result.write_csv(csv_path)
    return result


EXPERIMENTS = {
    "qubit_crosscheck": exp_qubit_crosscheck,
    "submult": exp_submultiplicativity,
    "product_depolarizing": exp_product_depolarizing,
    "max_boundariness": exp_max_boundariness,
    "state_tightness": exp_state_tightness,
    "lemma_R": exp_lemma_R,
    "polytope_maps": exp_polytope_maps,
}


def run_experiment(spec):
    """Run the experiment named by an :class:`ExperimentSpec`."""
    if spec.name == "polytope_maps":
        res = exp_polytope_maps(max(spec.samples, 10), spec.tolerances)
    else:
        res = EXPERIMENTS[spec.name](samples=spec.samples, seed=spec.seed, tolerances=spec.tolerances)
    if spec.output_path:
        res.write_csv(spec.output_path)
    return res
