#!/usr/bin/env python3
"""Compare the baseline and upgraded freight networks.

Prints max flow, the binding cut, and a cost-vs-demand sweep for both
bundled networks, then the delta the upgrade buys.

Usage:
    python3 scripts/network_study.py [--demand-step KG] [--out results.csv]
"""
import argparse
import csv
from pathlib import Path

from fabflow.netflow import build_network, flow_cost, max_flow, min_cost_flow, min_cut
from fabflow.scenario import load_fixture


def describe(name: str):
    net = build_network(load_fixture(name))
    fa = max_flow(net)
    side, cap = min_cut(net)
    real = sorted(n for n in side if not n.startswith("__"))
    print(f"{name}: max flow {fa.value} kg, min cut {cap} kg")
    print(f"  bottleneck side: {', '.join(real)}")
    return net, fa.value


def cost_curve(net, top: int, step: int):
    rows = []
    for demand in range(step, top + 1, step):
        fa = min_cost_flow(net, demand)
        rows.append((demand, float(flow_cost(net, fa))))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--demand-step", type=int, default=2000)
    ap.add_argument("--out", type=Path, help="write the cost sweep as CSV")
    args = ap.parse_args()

    base_net, base_flow = describe("fig9_baseline")
    opt_net, opt_flow = describe("fig10_optimized")
    print(f"upgrade gain: {opt_flow - base_flow} kg "
          f"({100.0 * (opt_flow - base_flow) / base_flow:.1f}%)")
    print()

    curves = {
        "baseline": cost_curve(base_net, base_flow, args.demand_step),
        "optimized": cost_curve(opt_net, opt_flow, args.demand_step),
    }
    print(f"{'demand kg':>10} {'baseline cost':>14} {'optimized cost':>15}")
    opt_by_demand = dict(curves["optimized"])
    for demand, cost in curves["baseline"]:
        opt_cost = opt_by_demand.get(demand)
        opt_txt = f"{opt_cost:15.1f}" if opt_cost is not None else " " * 15
        print(f"{demand:>10} {cost:>14.1f} {opt_txt}")
    for demand, cost in curves["optimized"]:
        if demand > base_flow:
            print(f"{demand:>10} {'infeasible':>14} {cost:>15.1f}")

    if args.out:
        with args.out.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["network", "demand_kg", "cost"])
            for label, rows in curves.items():
                writer.writerows((label, d, c) for d, c in rows)
        print(f"\nwrote {args.out}")


if __name__ == "__main__":
    main()
