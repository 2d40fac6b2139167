"""Slow reference implementations shared by the unit and acceptance suites.

Everything here trades speed for obviousness: plain loops, scalar calls,
exhaustive enumeration.  The real package must agree with these.
"""
import itertools

import numpy as np

from fabflow.queueing import (
    FleetConfig,
    RoutingModel,
    StationKind,
    StationProfile,
    gradient_grid,
    traffic_equations,
    wip,
)
from fabflow.scheduler import Assignment, evaluate_schedule


def brute_force_min_cut(net) -> int:
    """Minimum cut capacity by enumerating every source-side subset."""
    others = [n for n in net.nodes if n not in (net.source, net.sink)]
    best = None
    for r in range(len(others) + 1):
        for combo in itertools.combinations(others, r):
            side = {net.source, *combo}
            cap = sum(
                e.capacity_kg
                for e in net.edges
                if e.tail in side and e.head not in side
            )
            if best is None or cap < best:
                best = cap
    return best


def brute_force_front(inst):
    """Exact Pareto front over every assignment, as a set of rounded pairs."""
    vids = [v.vehicle_id for v in inst.vehicles]
    points = []
    for combo in itertools.product(vids, repeat=len(inst.tasks)):
        mapping = {t.task_id: v for t, v in zip(inst.tasks, combo)}
        obj = evaluate_schedule(inst, Assignment(mapping))
        points.append((obj.total_cost, obj.makespan_h))
    front = set()
    for c, m in points:
        dominated = any(
            (c2 <= c and m2 <= m) and (c2 < c or m2 < m) for c2, m2 in points
        )
        if not dominated:
            front.add((round(c, 9), round(m, 9)))
    return front


def brute_force_best_scalar(inst, bounds):
    best = float("inf")
    vids = [v.vehicle_id for v in inst.vehicles]
    for combo in itertools.product(range(len(vids)), repeat=len(inst.tasks)):
        mapping = {t.task_id: vids[v] for t, v in zip(inst.tasks, combo)}
        obj = evaluate_schedule(inst, Assignment(mapping))
        best = min(best, bounds.score(obj.total_cost, obj.makespan_h))
    return best


def three_point_gradient(model, p, fleet, h=1e-4):
    """Forward-difference WIP gradient, one free coordinate at a time.

    Uses the 3-point one-sided stencil (-3f0 + 4f1 - f2) / 2h along each
    e_i - e_0 direction, built entirely on scalar wip() calls so it shares
    no code with the batched central-difference path it is checked against.
    """
    p = np.asarray(p, dtype=float)
    n = p.size - 1
    out = np.empty(n)
    w0 = wip(model, p, fleet).total_wip
    for i in range(1, n + 1):
        d = np.zeros_like(p)
        d[i] = 1.0
        d[0] = -1.0
        w1 = wip(model, p + h * d, fleet).total_wip
        w2 = wip(model, p + 2.0 * h * d, fleet).total_wip
        out[i - 1] = (-3.0 * w0 + 4.0 * w1 - w2) / (2.0 * h)
    return out


def random_capped_instance(rng):
    """Random open network whose nominal utilizations all sit at 0.25.

    Row sums of the routing matrix stay below 0.7 for every p (constant
    factors at most 0.2 each, the single p-dependent cell scaled by at most
    0.3), so the network is open everywhere and finite-difference probes
    can never hit an unstable point.  Service rates are back-solved from
    the nominal arrival rates.

    Returns (model, p_nominal, fleet).
    """
    k = int(rng.integers(3, 7))
    dim = int(rng.integers(3, 5))
    names = [f"S{i}" for i in range(k)]
    gammas = [float(rng.uniform(0.3, 1.0)) for _ in range(k)]
    bindings = []
    for i in range(k):
        targets = [j for j in range(k) if j != i]
        rng.shuffle(targets)
        n_const = int(rng.integers(0, 3))
        for j in targets[:n_const]:
            c = rng.uniform(0.02, 0.2)
            bindings.append((names[i], names[j], f"const:{c}"))
        if n_const < len(targets) and rng.random() < 0.8:
            scale = rng.uniform(0.05, 0.3)
            idx = int(rng.integers(0, dim))
            bindings.append((names[i], names[targets[n_const]], f"const:{scale}*p:{idx}"))
    p_nominal = rng.dirichlet(np.full(dim, 5.0))
    p_nominal = 0.9 * p_nominal + 0.1 / dim  # keep probes clear of the boundary
    probe = [StationProfile(nm, StationKind.PROCESS, 1.0, g) for nm, g in zip(names, gammas)]
    lam = traffic_equations(RoutingModel.from_bindings(probe, bindings, wltp_dim=dim), p_nominal)
    profiles = [
        StationProfile(nm, StationKind.PROCESS, float(l) / 0.25, g)
        for nm, g, l in zip(names, gammas, lam)
    ]
    model = RoutingModel.from_bindings(profiles, bindings, wltp_dim=dim)
    return model, p_nominal, FleetConfig(())


def lattice_phi_max(model, fleet, dim, eta, m):
    """Grid-search lower level: max projected-gradient norm over a lattice.

    Walks a clipped-simplex lattice (corners included exactly), computes the
    free-coordinate WIP gradient at every point in one batch, embeds it as a
    tangent vector and takes the largest norm.  Returns (value, argmax point).
    """
    pts = clipped_simplex_lattice(dim, eta, m)
    _, grads = gradient_grid(model, pts, fleet)
    emb = np.hstack([np.zeros((len(pts), 1)), grads])
    tangents = emb - emb.mean(axis=1, keepdims=True)
    norms = np.linalg.norm(tangents, axis=1)
    best = int(np.argmax(norms))
    return float(norms[best]), pts[best]


def integer_compositions(total, parts):
    """All tuples of `parts` non-negative integers summing to `total`."""
    for dividers in itertools.combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for d in dividers + (total + parts - 1,):
            out.append(d - prev - 1)
            prev = d
        yield tuple(out)


def clipped_simplex_lattice(dim, eta, m):
    """Even lattice over the clipped simplex {p : p_i >= eta, sum = 1}.

    Includes the clipped corners exactly (composition (m,0,..) maps to
    p = (1-(dim-1)*eta, eta, ..)).
    """
    span = 1.0 - dim * eta
    return [
        np.array([eta + a * span / m for a in combo])
        for combo in integer_compositions(m, dim)
    ]
