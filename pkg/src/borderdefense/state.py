"""Game state and speed data shared by every module."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np

from .geometry import Point2


@dataclass(frozen=True)
class SpeedTable:
    pursuer_speeds: Tuple[float, ...]
    evader_speeds: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "pursuer_speeds", tuple(float(v) for v in self.pursuer_speeds))
        object.__setattr__(self, "evader_speeds", tuple(float(v) for v in self.evader_speeds))
        if any(v <= 0 for v in self.pursuer_speeds + self.evader_speeds):
            raise ValueError("speeds must be positive")

    def alpha(self, i: int, j: int) -> float:
        """Speed ratio v_E_j / v_P_i."""
        return self.evader_speeds[j] / self.pursuer_speeds[i]

    def allowed(self, i: int, j: int) -> bool:
        # a pursuer not faster than the evader may not be assigned to it
        return self.alpha(i, j) < 1.0

    @property
    def v_max(self) -> float:
        return max(self.pursuer_speeds + self.evader_speeds)

    def subset(self, pursuers: Sequence[int], evaders: Sequence[int]) -> "SpeedTable":
        return SpeedTable(tuple(self.pursuer_speeds[i] for i in pursuers),
                          tuple(self.evader_speeds[j] for j in evaders))


@dataclass(frozen=True)
class GameState:
    """Positions of N pursuers and M evaders plus activity flags.

    An inactive evader carries ``frozen_y``, its capture height (or 0 when it
    reached the border). Inactive agents never move.
    """

    pursuers: Tuple[Point2, ...]
    evaders: Tuple[Point2, ...]
    pursuer_active: Tuple[bool, ...] = ()
    evader_active: Tuple[bool, ...] = ()
    frozen_y: Tuple[Optional[float], ...] = ()
    time: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "pursuers", tuple(Point2(float(p[0]), float(p[1])) for p in self.pursuers))
        object.__setattr__(self, "evaders", tuple(Point2(float(p[0]), float(p[1])) for p in self.evaders))
        if not self.pursuer_active:
            object.__setattr__(self, "pursuer_active", (True,) * len(self.pursuers))
        if not self.evader_active:
            object.__setattr__(self, "evader_active", (True,) * len(self.evaders))
        if not self.frozen_y:
            object.__setattr__(self, "frozen_y", (None,) * len(self.evaders))
        if len(self.pursuer_active) != len(self.pursuers) or len(self.evader_active) != len(self.evaders) \
                or len(self.frozen_y) != len(self.evaders):
            raise ValueError("flag sequences must match the number of agents")
        for j, act in enumerate(self.evader_active):
            if not act and self.frozen_y[j] is None:
                raise ValueError(f"inactive evader {j} needs frozen_y")

    @property
    def n_pursuers(self) -> int:
        return len(self.pursuers)

    @property
    def n_evaders(self) -> int:
        return len(self.evaders)

    def active_pursuers(self) -> Tuple[int, ...]:
        return tuple(i for i, a in enumerate(self.pursuer_active) if a)

    def active_evaders(self) -> Tuple[int, ...]:
        return tuple(j for j, a in enumerate(self.evader_active) if a)

    def frozen_payoff(self) -> float:
        return sum(y for j, y in enumerate(self.frozen_y) if not self.evader_active[j])

    def to_vector(self) -> np.ndarray:
        """Flat coordinates, pursuers first then evaders, (x, y) per agent."""
        return np.array([c for p in self.pursuers + self.evaders for c in p], dtype=float)

    def with_vector(self, vec: Sequence[float]) -> "GameState":
        vec = np.asarray(vec, dtype=float)
        n = self.n_pursuers
        pts = [Point2(float(vec[2 * k]), float(vec[2 * k + 1])) for k in range(len(vec) // 2)]
        return replace(self, pursuers=tuple(pts[:n]), evaders=tuple(pts[n:]))

    def translated(self, dx: float, dy: float) -> "GameState":
        return replace(self,
                       pursuers=tuple(Point2(p.x + dx, p.y + dy) for p in self.pursuers),
                       evaders=tuple(Point2(p.x + dx, p.y + dy) for p in self.evaders))

    def diameter(self) -> float:
        pts = np.array(self.pursuers + self.evaders, dtype=float)
        diff = pts[:, None, :] - pts[None, :, :]
        return float(np.sqrt((diff ** 2).sum(-1)).max())
