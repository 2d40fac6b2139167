"""Exception hierarchy shared across the package.

Callers mostly care about two families: ScenarioValidationError means the
input (file, override, argument) is malformed and maps to CLI exit code 1;
InfeasibleError means the input parsed fine but the model has no answer
(unstable station, no feasible fleet, demand above capacity) and maps to
exit code 2.  Every leaf class carries a short machine-readable ``code``
that the CLI echoes as ``error=<code>``.
"""


class FabflowError(Exception):
    code = "error"


class ScenarioValidationError(FabflowError):
    """Malformed input: bad file, bad reference, bad argument."""

    code = "validation"


class InfeasibleError(FabflowError):
    """Well-formed input for which the model has no feasible answer."""

    code = "infeasible"


# --- scenario / parsing ---------------------------------------------------

class ParseError(ScenarioValidationError):
    code = "parse_error"


class SchemaVersionUnsupported(ScenarioValidationError):
    code = "schema_version_unsupported"


class ValidationErrors(ScenarioValidationError):
    """Aggregates every validation failure found in one pass."""

    code = "validation_errors"

    def __init__(self, errors):
        self.errors = [str(e) for e in errors]
        super().__init__("; ".join(self.errors))


class IoError(ScenarioValidationError):
    code = "io_error"


# --- flow network construction --------------------------------------------

class DuplicateNode(ScenarioValidationError):
    code = "duplicate_node"


class DanglingEdge(ScenarioValidationError):
    code = "dangling_edge"


class NoOriginOrDestination(ScenarioValidationError):
    code = "no_origin_or_destination"


class InfeasibleDemand(InfeasibleError):
    code = "infeasible_demand"

    def __init__(self, demand, max_value):
        self.demand = demand
        self.max_value = max_value
        super().__init__(
            f"demand {demand} kg exceeds network capacity {max_value} kg"
        )


# --- queueing --------------------------------------------------------------

class InvalidWltp(ScenarioValidationError):
    code = "invalid_wltp"


class InvalidDirection(ScenarioValidationError):
    code = "invalid_direction"


class InvalidRouting(ScenarioValidationError):
    code = "invalid_routing"


class NonOpenNetwork(InfeasibleError):
    code = "non_open_network"


class UnstableStation(InfeasibleError):
    code = "unstable_station"

    def __init__(self, station_id, rho):
        self.station_id = station_id
        self.rho = float(rho)
        super().__init__(f"station {station_id} unstable: utilization {rho:.6f}")


class ZeroVehicles(InfeasibleError):
    code = "zero_vehicles"

    def __init__(self, station_id):
        self.station_id = station_id
        super().__init__(
            f"transport station {station_id} has positive arrivals but no vehicles"
        )


# --- planner ---------------------------------------------------------------

class NoStablePoint(InfeasibleError):
    code = "no_stable_point"


class NoFeasibleFleet(InfeasibleError):
    code = "no_feasible_fleet"


# --- scheduler -------------------------------------------------------------

class MissingDistance(ScenarioValidationError):
    code = "missing_distance"

    def __init__(self, origin, destination):
        self.origin = origin
        self.destination = destination
        super().__init__(f"no distance entry for {origin} -> {destination}")


class OverloadedVehicleRound(ScenarioValidationError):
    code = "overloaded_vehicle_round"


class EmptySeeds(ScenarioValidationError):
    code = "empty_seeds"
