"""fabflow: capacity, congestion, and dispatch analysis for wafer-fab logistics.

The package is organised around one scenario file format (see fabflow.scenario)
and five compute layers:

- netflow: integer-capacity flow networks, max flow / min cut / min-cost flow
- queueing: open queueing network WIP, gradients over the transfer-probability
  simplex, monotonicity audits
- robust_planner: adversarial worst-case WIP search and fleet sizing
- scheduler: transport task assignment via GA with SA and ACO baselines
- cli: the `fabflow` command line front end
"""

__version__ = "0.1.0"
