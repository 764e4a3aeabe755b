"""
Network Models.

Radial distribution network used by the linearized DistFlow rows. Bus and
branch quantities are per-unit on ``PER_UNIT_BASE_MVA``.
"""

from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property


@dataclass(frozen=True)
class Bus:
    """Network bus with squared-voltage bounds derived from ``v_min``/``v_max`` (p.u.)."""

    id: str
    v_min: float = 0.95
    v_max: float = 1.05


@dataclass(frozen=True)
class Branch:
    """Directed branch from the parent ``from_bus`` to the child ``to_bus``."""

    from_bus: str
    to_bus: str
    resistance: float
    flow_min: float
    flow_max: float

    @property
    def key(self) -> tuple[str, str]:
        """Branch identifier."""
        return (self.from_bus, self.to_bus)


@dataclass(frozen=True)
class NetworkModel:
    """Radial network rooted at ``root``."""

    buses: tuple[Bus, ...]
    branches: tuple[Branch, ...]
    root: str

    @cached_property
    def bus_ids(self) -> tuple[str, ...]:
        """Bus identifiers in declaration order."""
        return tuple(bus.id for bus in self.buses)

    @cached_property
    def children(self) -> dict[str, tuple[str, ...]]:
        """Map bus → child buses."""
        mapping: dict[str, list[str]] = defaultdict(list)
        for branch in self.branches:
            mapping[branch.from_bus].append(branch.to_bus)
        return {bus: tuple(mapping.get(bus, ())) for bus in self.bus_ids}

    @cached_property
    def parent(self) -> dict[str, str | None]:
        """Map bus → parent bus (None at the root)."""
        mapping: dict[str, str | None] = dict.fromkeys(self.bus_ids)
        for branch in self.branches:
            mapping[branch.to_bus] = branch.from_bus
        return mapping

    def issues(self) -> list[str]:
        """Return reasons why the network is not a connected radial tree."""
        found = []
        ids = set(self.bus_ids)
        if len(ids) != len(self.buses):
            found.append("network: duplicate bus identifiers")
        if self.root not in ids:
            found.append(f"network: root bus {self.root!r} is not declared")
            return found
        if len(self.branches) != len(self.buses) - 1:
            found.append(
                f"network: {len(self.branches)} branches for {len(self.buses)} buses "
                "(radial requires buses - 1)"
            )
        for branch in self.branches:
            if branch.from_bus not in ids or branch.to_bus not in ids:
                found.append(f"network: branch {branch.key} references an unknown bus")
        incoming = defaultdict(int)
        for branch in self.branches:
            incoming[branch.to_bus] += 1
        found.extend(
            f"network: bus {bus!r} has {count} parents" for bus, count in incoming.items() if count > 1
        )
        if incoming.get(self.root):
            found.append("network: the root bus has a parent")
        if not found:
            reached = {self.root}
            frontier = [self.root]
            while frontier:
                bus = frontier.pop()
                for child in self.children[bus]:
                    if child not in reached:
                        reached.add(child)
                        frontier.append(child)
            missing = sorted(ids - reached)
            if missing:
                found.append(f"network: buses {missing} are not connected to the root")
        return found
