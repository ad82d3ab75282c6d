from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CountOverflow

COUNTER_BITS = 128
_LIMIT = 1 << COUNTER_BITS

QUANTITIES = ("saw", "polygon", "bridge", "saw_to_neighbor", "ball")


def checked(n: int, value: int) -> int:
    """Return ``value`` unchanged, raising if it does not fit in 128 bits."""
    if value < 0 or value >= _LIMIT:
        raise CountOverflow(n, value)
    return value


@dataclass
class CountSeries:
    """Exact per-n counts of one quantity on one graph."""

    quantity: str
    graph: str
    counts: dict[int, int] = field(default_factory=dict)
    height_label: str | None = None

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise ValueError(f"unknown quantity {self.quantity!r}")
        first_bad = None
        for n in sorted(self.counts):
            try:
                checked(n, self.counts[n])
            except CountOverflow:
                first_bad = n
                break
        if first_bad is not None:
            raise CountOverflow(first_bad, self.counts[first_bad])

    def __getitem__(self, n: int) -> int:
        return self.counts[n]

    def __len__(self):
        return len(self.counts)

    @property
    def n_max(self) -> int:
        return max(self.counts)

    def values(self) -> list[int]:
        return [self.counts[n] for n in sorted(self.counts)]

    def to_json(self) -> dict:
        # exact integers are rendered as decimal strings
        return {
            "quantity": self.quantity,
            "graph": self.graph,
            "height": self.height_label,
            "counts": {str(n): str(c) for n, c in sorted(self.counts.items())},
        }

    @classmethod
    def from_json(cls, data: dict) -> CountSeries:
        return cls(
            quantity=data["quantity"],
            graph=data["graph"],
            height_label=data.get("height"),
            counts={int(n): int(c) for n, c in data["counts"].items()},
        )
