"""Open queueing-network WIP model over the transfer-probability simplex.

Every station is a pooled exponential server: process stations have a fixed
service rate, transport stations multiply their base rate by the number of
vehicles of their bound type.  Lot arrival rates solve the linear traffic
equations lambda = gamma + R(p)^T lambda, where the routing matrix R may
depend on the transfer-probability vector p.  Steady-state WIP per station
is rho / (1 - rho).

Derivatives over p are taken in free coordinates: p_0 is the dependent
coordinate, and the i-th partial means the directional derivative along
e_i - e_0 (which stays on the simplex).  Gradients are central differences
with step 1e-6.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np

from . import simplex
from .errors import (
    InvalidDirection,
    InvalidRouting,
    InvalidWltp,
    NonOpenNetwork,
    UnstableStation,
    ZeroVehicles,
)

STABILITY_MARGIN = 1e-6        # station is stable when rho <= 1 - this
TRAFFIC_RESIDUAL_TOL = 1e-10
GRADIENT_STEP = 1e-6
WLTP_SUM_TOL = 1e-12
DIRECTION_SUM_TOL = 1e-12
_ARRIVAL_EPS = 1e-12           # arrivals below this count as "no traffic"


# --- transfer-probability vectors ------------------------------------------

def wltp_errors(values: Sequence[float]) -> list[str]:
    """All constraint violations of a candidate transfer-probability vector."""
    p = np.asarray(values, dtype=float)
    out = []
    if p.ndim != 1 or p.size < 2:
        return ["transfer probabilities need at least two entries"]
    if abs(p.sum() - 1.0) > WLTP_SUM_TOL:
        out.append(f"probabilities must sum to 1 (got {p.sum()!r})")
    if (p <= 0.0).any() or (p >= 1.0).any():
        out.append("each probability must lie strictly between 0 and 1")
    return out


@dataclass(frozen=True)
class WltpVector:
    """Validated transfer-probability vector (p_0, ..., p_n)."""

    probs: tuple[float, ...]

    def __post_init__(self):
        errs = wltp_errors(self.probs)
        if errs:
            raise InvalidWltp("; ".join(errs))
        object.__setattr__(self, "probs", tuple(float(x) for x in self.probs))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    @property
    def n_free(self) -> int:
        return len(self.probs) - 1


def _as_p(p) -> np.ndarray:
    if isinstance(p, WltpVector):
        return p.array
    return np.asarray(p, dtype=float)


# --- stations, fleets, routing ----------------------------------------------

class StationKind(Enum):
    PROCESS = "process"
    TRANSPORT = "transport"


@dataclass(frozen=True)
class StationProfile:
    """One service station.

    mu_base is lots/hour; for transport stations the effective rate is
    mu_base times the vehicle count of `vehicle_type` (an index into
    FleetConfig.counts).  gamma is the external arrival rate.
    """

    station_id: str
    kind: StationKind
    mu_base: float
    gamma: float = 0.0
    vehicle_type: int | None = None

    def __post_init__(self):
        if self.mu_base <= 0:
            raise InvalidRouting(f"station {self.station_id}: mu_base must be positive")
        if self.gamma < 0:
            raise InvalidRouting(f"station {self.station_id}: gamma must be non-negative")
        if self.kind == StationKind.TRANSPORT and self.vehicle_type is None:
            raise InvalidRouting(
                f"transport station {self.station_id} needs a vehicle_type binding"
            )


@dataclass(frozen=True)
class FleetConfig:
    """Vehicle counts per type."""

    counts: tuple[int, ...]

    def __post_init__(self):
        if any(c < 0 or int(c) != c for c in self.counts):
            raise InvalidRouting("vehicle counts must be non-negative integers")
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))

    @property
    def total(self) -> int:
        return sum(self.counts)


# Routing cells are tiny product expressions over p: "const:0.3", "p:2",
# "1-p:2", or products joined by "*" such as "p:1*1-p:2".  The two simple
# forms cover ordinary fixtures; products exist so that non-monotone routing
# (used by the adversarial fixture) stays serializable.

def _parse_factor(token: str):
    token = token.strip()
    if token.startswith("const:"):
        value = float(token[6:])
        if not (0.0 <= value <= 1.0):
            raise InvalidRouting(f"constant routing factor out of [0,1]: {token}")
        return ("const", value)
    if token.startswith("1-p:"):
        return ("comp", int(token[4:]))
    if token.startswith("p:"):
        return ("p", int(token[2:]))
    raise InvalidRouting(f"unparseable routing factor: {token!r}")


def parse_routing_expr(text: str) -> tuple:
    return tuple(_parse_factor(tok) for tok in text.split("*"))


def routing_expr_to_str(factors: Iterable[tuple]) -> str:
    parts = []
    for kind, value in factors:
        if kind == "const":
            parts.append(f"const:{value}")
        elif kind == "p":
            parts.append(f"p:{value}")
        else:
            parts.append(f"1-p:{value}")
    return "*".join(parts)


def _eval_expr(factors, P: np.ndarray) -> np.ndarray:
    """Evaluate one routing cell for a batch of p rows, shape (N,)."""
    out = np.ones(P.shape[0])
    for kind, value in factors:
        if kind == "const":
            out *= value
        elif kind == "p":
            out *= P[:, value]
        else:
            out *= 1.0 - P[:, value]
    return out


@dataclass(frozen=True)
class RoutingModel:
    """Stations plus a p-dependent routing matrix.

    Built either from serializable bindings (scenario files) or from an
    arbitrary callable (tests).  Rows of the routing matrix must sum to at
    most 1; the slack is the probability of leaving the network.
    """

    stations: tuple[StationProfile, ...]
    wltp_dim: int
    bindings: tuple[tuple[str, str, tuple], ...] | None = None
    matrix_fn: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        ids = [s.station_id for s in self.stations]
        if len(set(ids)) != len(ids):
            raise InvalidRouting("duplicate station ids")
        if (self.bindings is None) == (self.matrix_fn is None):
            raise InvalidRouting("provide exactly one of bindings or matrix_fn")
        if self.bindings is not None:
            index = {sid: i for i, sid in enumerate(ids)}
            for frm, to, factors in self.bindings:
                if frm not in index or to not in index:
                    raise InvalidRouting(f"routing binding references unknown station {frm}->{to}")
                for kind, value in factors:
                    if kind in ("p", "comp") and not (0 <= value < self.wltp_dim):
                        raise InvalidRouting(
                            f"routing binding {frm}->{to} uses p index {value} out of range"
                        )

    @classmethod
    def from_bindings(cls, stations, bindings, wltp_dim) -> "RoutingModel":
        parsed = tuple(
            (frm, to, parse_routing_expr(expr) if isinstance(expr, str) else tuple(expr))
            for frm, to, expr in bindings
        )
        return cls(stations=tuple(stations), wltp_dim=wltp_dim, bindings=parsed)

    @classmethod
    def from_function(cls, stations, fn, wltp_dim) -> "RoutingModel":
        return cls(stations=tuple(stations), wltp_dim=wltp_dim, matrix_fn=fn)

    @property
    def station_ids(self) -> tuple[str, ...]:
        return tuple(s.station_id for s in self.stations)

    @property
    def n_free(self) -> int:
        return self.wltp_dim - 1

    def routing_batch(self, P: np.ndarray) -> np.ndarray:
        """Routing matrices for a batch of p rows, shape (N, k, k)."""
        P = np.atleast_2d(np.asarray(P, dtype=float))
        k = len(self.stations)
        if self.matrix_fn is not None:
            R = np.stack([np.asarray(self.matrix_fn(row), dtype=float) for row in P])
        else:
            index = {s.station_id: i for i, s in enumerate(self.stations)}
            R = np.zeros((P.shape[0], k, k))
            for frm, to, factors in self.bindings:
                R[:, index[frm], index[to]] = _eval_expr(factors, P)
        row_sums = R.sum(axis=2)
        if (row_sums > 1.0 + 1e-9).any():
            bad = np.unravel_index(np.argmax(row_sums), row_sums.shape)
            raise InvalidRouting(
                f"routing row for station {self.station_ids[bad[1]]} sums to {row_sums[bad]:.6f} > 1"
            )
        return R

    def routing(self, p) -> np.ndarray:
        return self.routing_batch(_as_p(p)[None, :])[0]


def service_rates(model: RoutingModel, fleet: FleetConfig) -> np.ndarray:
    """Effective service rate per station; zero-vehicle transport gives 0."""
    mu = np.empty(len(model.stations))
    for i, st in enumerate(model.stations):
        if st.kind == StationKind.TRANSPORT:
            if st.vehicle_type >= len(fleet.counts):
                raise InvalidRouting(
                    f"station {st.station_id} binds vehicle type {st.vehicle_type}, "
                    f"but the fleet has {len(fleet.counts)} types"
                )
            mu[i] = st.mu_base * fleet.counts[st.vehicle_type]
        else:
            mu[i] = st.mu_base
    return mu


# --- traffic equations ------------------------------------------------------

def _traffic_batch(model: RoutingModel, P: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Solve lambda = gamma + R(p)^T lambda for each row of P.

    Returns (lam, open_mask); rows where the network is not open (spectral
    radius of R at or above 1, negative solution, residual too large) get
    open_mask False and NaN arrival rates.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    R = model.routing_batch(P)
    gamma = np.asarray([s.gamma for s in model.stations])
    k = gamma.size
    N = P.shape[0]
    ok = np.ones(N, dtype=bool)
    spectral = np.abs(np.linalg.eigvals(R)).max(axis=1)
    ok &= spectral < 1.0 - 1e-12
    lam = np.full((N, k), np.nan)
    if ok.any():
        A = np.eye(k)[None, :, :] - np.swapaxes(R[ok], 1, 2)
        rhs = np.broadcast_to(gamma[:, None], (int(ok.sum()), k, 1))
        try:
            sol = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError:
            ok[:] = False
            return lam, ok
        lam[ok] = sol[:, :, 0]
        residual = np.abs(
            lam[ok] - (gamma + np.einsum("nij,ni->nj", R[ok], lam[ok]))
        ).max(axis=1)
        good = (residual <= TRAFFIC_RESIDUAL_TOL) & (lam[ok] > -1e-9).all(axis=1)
        ok_idx = np.flatnonzero(ok)
        ok[ok_idx[~good]] = False
        lam[ok_idx[~good]] = np.nan
    return lam, ok


def traffic_equations(model: RoutingModel, p) -> np.ndarray:
    """Arrival rate per station for a single p; raises NonOpenNetwork."""
    lam, ok = _traffic_batch(model, _as_p(p)[None, :])
    if not ok[0]:
        raise NonOpenNetwork(
            "routing keeps lots circulating forever (spectral radius >= 1)"
        )
    return np.maximum(lam[0], 0.0)


# --- WIP ---------------------------------------------------------------------

@dataclass(frozen=True)
class WipReport:
    station_ids: tuple[str, ...]
    per_station_wip: tuple[float, ...]
    utilizations: tuple[float, ...]
    total_wip: float

    def to_csv_rows(self):
        header = ("station", "utilization", "wip")
        rows = [
            (sid, repr(u), repr(w))
            for sid, u, w in zip(self.station_ids, self.utilizations, self.per_station_wip)
        ]
        return header, rows


def _utilizations(model: RoutingModel, lam: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """Batch rho = lam/mu with the zero-vehicle convention (rho inf, or 0 when idle)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = lam / mu
    rho = np.where((mu <= 0.0) & (lam <= _ARRIVAL_EPS), 0.0, rho)
    rho = np.where((mu <= 0.0) & (lam > _ARRIVAL_EPS), np.inf, rho)
    return rho


def wip_totals_batch(
    model: RoutingModel, P: np.ndarray, fleet: FleetConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Total WIP for each p row; unstable (or non-open) rows give NaN.

    The workhorse behind gradients, grids, and the planner's searches; one
    call means one batched linear solve.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    lam, ok = _traffic_batch(model, P)
    mu = service_rates(model, fleet)
    totals = np.full(P.shape[0], np.nan)
    stable = np.zeros(P.shape[0], dtype=bool)
    if ok.any():
        rho = _utilizations(model, np.maximum(lam[ok], 0.0), mu)
        row_ok = (rho <= 1.0 - STABILITY_MARGIN).all(axis=1)
        with np.errstate(over="ignore", invalid="ignore"):
            w = np.where(row_ok[:, None], rho / np.maximum(1.0 - rho, 1e-300), np.nan)
        idx = np.flatnonzero(ok)
        totals[idx[row_ok]] = w[row_ok].sum(axis=1)
        stable[idx[row_ok]] = True
    return totals, stable


def wip(model: RoutingModel, p, fleet: FleetConfig) -> WipReport:
    """Steady-state WIP report at a single p; raises on instability."""
    lam = traffic_equations(model, p)
    mu = service_rates(model, fleet)
    for i, st in enumerate(model.stations):
        if mu[i] <= 0.0 and lam[i] > _ARRIVAL_EPS:
            raise ZeroVehicles(st.station_id)
    rho = _utilizations(model, lam, mu)
    for i, st in enumerate(model.stations):
        if rho[i] > 1.0 - STABILITY_MARGIN:
            raise UnstableStation(st.station_id, rho[i])
    per = rho / (1.0 - rho)
    return WipReport(
        station_ids=model.station_ids,
        per_station_wip=tuple(float(x) for x in per),
        utilizations=tuple(float(x) for x in rho),
        total_wip=float(per.sum()),
    )


def _free_probe_matrix(p: np.ndarray, h: float) -> np.ndarray:
    """Rows p + h*(e_i - e_0) and p - h*(e_i - e_0) for i = 1..n, then p itself."""
    n = p.size - 1
    probes = np.tile(p, (2 * n + 1, 1))
    for i in range(1, n + 1):
        probes[2 * (i - 1), i] += h
        probes[2 * (i - 1), 0] -= h
        probes[2 * (i - 1) + 1, i] -= h
        probes[2 * (i - 1) + 1, 0] += h
    return probes


def wip_gradient(model: RoutingModel, p, fleet: FleetConfig, step: float = GRADIENT_STEP) -> np.ndarray:
    """Free-coordinate WIP gradient: d/dp_i along e_i - e_0, i = 1..n.

    Central differences; any unstable probe point raises the same error a
    direct wip() call there would.
    """
    p = _as_p(p)
    probes = _free_probe_matrix(p, step)
    totals, stable = wip_totals_batch(model, probes, fleet)
    if not stable.all():
        # re-run the first bad probe through the scalar path for a precise error
        bad = int(np.flatnonzero(~stable)[0])
        wip(model, probes[bad], fleet)
        raise UnstableStation("unknown", float("nan"))  # unreachable
    n = p.size - 1
    return (totals[0 : 2 * n : 2] - totals[1 : 2 * n : 2]) / (2.0 * step)


def directional_derivative(model: RoutingModel, p, x, fleet: FleetConfig) -> float:
    """Derivative of total WIP along a simplex-tangent direction x.

    x has one entry per probability (including the dependent p_0) and must
    sum to zero; the value is linear in x, so unit scaling is up to the
    caller.
    """
    x = np.asarray(x, dtype=float)
    p = _as_p(p)
    if x.shape != p.shape:
        raise InvalidDirection("direction and probability vector sizes differ")
    if abs(x.sum()) > DIRECTION_SUM_TOL:
        raise InvalidDirection(f"direction must sum to zero (got {x.sum()!r})")
    if not x.any():
        return 0.0
    g = wip_gradient(model, p, fleet)
    # unique decomposition x = sum_i x_i (e_i - e_0)
    return float(np.dot(g, x[1:]))


def steepest_feasible_direction(
    model: RoutingModel, p, fleet: FleetConfig
) -> tuple[np.ndarray, float]:
    """Unit sum-zero direction maximizing the WIP derivative, and its value.

    The maximizer is the free-coordinate gradient embedded at (0, g_1..g_n)
    and projected onto the sum-zero subspace; the maximum value is that
    projection's Euclidean norm.
    """
    g = wip_gradient(model, p, fleet)
    embedded = np.concatenate([[0.0], g])
    tangent = simplex.project_sum_zero(embedded)
    norm = float(np.linalg.norm(tangent))
    if norm == 0.0:
        return np.zeros_like(embedded), 0.0
    return tangent / norm, norm


# --- monotonicity audit ------------------------------------------------------

CLAIM_GRADIENT_POSITIVE = "gradient_positive"
CLAIM_P0_DECREASING = "p0_decreasing"
CLAIM_PI_INCREASING = "pi_increasing"
_LINE_TOL = 1e-9


@dataclass(frozen=True)
class MonotonicityViolation:
    claim: str
    coordinate: int
    line: str
    p_a: tuple[float, ...]
    p_b: tuple[float, ...]
    value_a: float
    value_b: float


@dataclass(frozen=True)
class MonotonicityReport:
    """Per-claim audit of WIP gradient behaviour on a grid.

    Claims checked:
      gradient_positive: dW/dp_i > 0 at every grid point;
      p0_decreasing: along lines where p_i is held and p_0 grows, dW/dp_i
        never increases;
      pi_increasing: along lines where only p_i (and the dependent p_0)
        moves, dW/dp_i never decreases.
    Violations are data, not errors.
    """

    grid_points: int
    claim_passed: dict
    line_records: tuple
    violations: tuple

    def passed(self, claim: str) -> bool:
        return self.claim_passed[claim]

    @property
    def all_passed(self) -> bool:
        return all(self.claim_passed.values())

    def to_csv_rows(self):
        header = ("claim", "grid_line", "pass", "violating_points")
        rows = [
            (claim, line, "true" if ok else "false", detail)
            for claim, line, ok, detail in self.line_records
        ]
        return header, rows


def _fmt_point(p: np.ndarray) -> str:
    return "(" + ",".join(f"{x:.6f}" for x in p) + ")"


def gradient_grid(
    model: RoutingModel, grid: Sequence, fleet: FleetConfig
) -> tuple[np.ndarray, np.ndarray]:
    """Free-coordinate gradients at every grid point, one batched solve."""
    pts = np.vstack([_as_p(p) for p in grid])
    n = pts.shape[1] - 1
    probes = np.vstack([_free_probe_matrix(row, GRADIENT_STEP) for row in pts])
    totals, stable = wip_totals_batch(model, probes, fleet)
    if not stable.all():
        bad = int(np.flatnonzero(~stable)[0])
        wip(model, probes[bad], fleet)
    per_point = totals.reshape(len(pts), 2 * n + 1)
    grads = (per_point[:, 0 : 2 * n : 2] - per_point[:, 1 : 2 * n : 2]) / (2.0 * GRADIENT_STEP)
    return pts, grads


def check_monotonicity(
    model: RoutingModel, grid: Sequence, fleet: FleetConfig
) -> MonotonicityReport:
    """Audit the three gradient claims on an explicit grid of p points."""
    pts, grads = gradient_grid(model, grid, fleet)
    n = pts.shape[1] - 1
    claim_passed = {
        CLAIM_GRADIENT_POSITIVE: True,
        CLAIM_P0_DECREASING: True,
        CLAIM_PI_INCREASING: True,
    }
    line_records = []
    violations = []

    positive_bad = []
    for idx in range(len(pts)):
        for i in range(n):
            if not grads[idx, i] > 0.0:
                positive_bad.append(f"{_fmt_point(pts[idx])}:dW/dp{i + 1}={grads[idx, i]:.3e}")
                claim_passed[CLAIM_GRADIENT_POSITIVE] = False
                violations.append(
                    MonotonicityViolation(
                        CLAIM_GRADIENT_POSITIVE, i + 1, "pointwise",
                        tuple(pts[idx]), tuple(pts[idx]),
                        float(grads[idx, i]), float(grads[idx, i]),
                    )
                )
    line_records.append(
        (
            CLAIM_GRADIENT_POSITIVE,
            f"all_points[n={len(pts)}]",
            not positive_bad,
            ";".join(positive_bad[:4]),
        )
    )

    def _key(values) -> tuple:
        return tuple(round(float(v), 10) for v in values)

    # p0_decreasing: for target coordinate i, hold p_i and every other free
    # coordinate except one compensator j; p_0 then trades off against p_j.
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if j == i:
                continue
            groups: dict = {}
            for idx in range(len(pts)):
                key = _key(pts[idx][m] for m in range(1, n + 1) if m != j)
                groups.setdefault(key, []).append(idx)
            for key, members in sorted(groups.items()):
                if len(members) < 2:
                    continue
                members.sort(key=lambda m: pts[m][0])
                label = f"dW/dp{i} along p0 (p{i}={key[0] if n == 2 else key}, trade p{j})"
                ok, detail = True, ""
                for a, b in zip(members, members[1:]):
                    if grads[b, i - 1] > grads[a, i - 1] + _LINE_TOL:
                        ok = False
                        claim_passed[CLAIM_P0_DECREASING] = False
                        detail = f"{_fmt_point(pts[a])}->{_fmt_point(pts[b])}"
                        violations.append(
                            MonotonicityViolation(
                                CLAIM_P0_DECREASING, i, label,
                                tuple(pts[a]), tuple(pts[b]),
                                float(grads[a, i - 1]), float(grads[b, i - 1]),
                            )
                        )
                        break
                line_records.append((CLAIM_P0_DECREASING, label, ok, detail))

    # pi_increasing: vary only p_i (p_0 compensates), all other free held.
    for i in range(1, n + 1):
        groups = {}
        for idx in range(len(pts)):
            key = _key(pts[idx][m] for m in range(1, n + 1) if m != i)
            groups.setdefault(key, []).append(idx)
        for key, members in sorted(groups.items()):
            if len(members) < 2:
                continue
            members.sort(key=lambda m: pts[m][i])
            label = f"dW/dp{i} along p{i} (fixed={key})"
            ok, detail = True, ""
            for a, b in zip(members, members[1:]):
                if grads[b, i - 1] < grads[a, i - 1] - _LINE_TOL:
                    ok = False
                    claim_passed[CLAIM_PI_INCREASING] = False
                    detail = f"{_fmt_point(pts[a])}->{_fmt_point(pts[b])}"
                    violations.append(
                        MonotonicityViolation(
                            CLAIM_PI_INCREASING, i, label,
                            tuple(pts[a]), tuple(pts[b]),
                            float(grads[a, i - 1]), float(grads[b, i - 1]),
                        )
                    )
                    break
            line_records.append((CLAIM_PI_INCREASING, label, ok, detail))

    return MonotonicityReport(
        grid_points=len(pts),
        claim_passed=claim_passed,
        line_records=tuple(line_records),
        violations=tuple(violations),
    )


def box_simplex_grid(axes: Sequence[tuple[int, float, float, int]], dim: int) -> list[np.ndarray]:
    """Grid over free coordinates; p_0 absorbs the remainder.

    `axes` holds (coordinate index, start, stop, num) per free coordinate.
    Points whose dependent coordinate would leave (0, 1) are dropped.
    """
    grids = [np.linspace(start, stop, num) for _, start, stop, num in axes]
    coords = [axis[0] for axis in axes]
    mesh = np.meshgrid(*grids, indexing="ij")
    flat = np.stack([m.ravel() for m in mesh], axis=1)
    points = []
    for row in flat:
        p = np.zeros(dim)
        for c, v in zip(coords, row):
            p[c] = v
        p[0] = 1.0 - row.sum()
        if 0.0 < p[0] < 1.0:
            points.append(p)
    return points


def grid_from_axes(free_axes: Sequence[Sequence[float]], dim: int) -> list[np.ndarray]:
    """Grid from explicit per-coordinate value lists (free coords 1..n in order).

    This is what scenario metadata carries; p_0 absorbs the remainder and
    points leaving the open simplex are dropped.
    """
    points = []
    for combo in itertools.product(*free_axes):
        p = np.zeros(dim)
        p[1 : 1 + len(combo)] = combo
        p[0] = 1.0 - float(np.sum(combo))
        if 0.0 < p[0] < 1.0:
            points.append(p)
    return points


def build_routing_model(scenario) -> RoutingModel:
    """RoutingModel from a scenario's stations and routing bindings."""
    if not getattr(scenario, "stations", None):
        raise InvalidRouting("scenario has no stations section")
    if scenario.nominal_p is None:
        raise InvalidRouting("scenario has no nominal_p vector")
    return RoutingModel.from_bindings(
        scenario.stations, scenario.routing, wltp_dim=len(scenario.nominal_p)
    )
