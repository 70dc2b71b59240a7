"""Multi-agent border defense differential games.

Pursuers guard the line y = 0 against evaders; the payoff is the sum of the
evaders' heights at capture. The package computes the game's value from
Apollonius-circle geometry, enumerates pursuer-to-evader assignments,
produces the saddle-point headings and simulates engagements.
"""
from .assignment import (Assignment, GameOfKindReport, NoFeasibleAssignmentError, enumerate_assignments,
                         game_of_kind, hungarian_assign, optimal_assignment)
from .geometry import (CapturePoint, Circle, Point2, apollonius_circle, circle_intersections,
                       cooperative_lowest_point, lowest_point, pursuer_pair_circle, vs_closed_form)
from .sim import Scenario, TrajectoryLog, run_engagement, step
from .state import GameState, SpeedTable
from .strategy import HeadingCommand, TeamPolicy, team_headings
from .value import hji_residual, value, value_gradient

__all__ = [
    "Assignment", "CapturePoint", "Circle", "GameOfKindReport", "GameState", "HeadingCommand",
    "NoFeasibleAssignmentError", "Point2", "Scenario", "SpeedTable", "TeamPolicy", "TrajectoryLog",
    "apollonius_circle", "circle_intersections", "cooperative_lowest_point", "enumerate_assignments",
    "game_of_kind", "hji_residual", "hungarian_assign", "lowest_point", "optimal_assignment",
    "pursuer_pair_circle", "run_engagement", "step", "team_headings", "value", "value_gradient",
    "vs_closed_form",
]
__version__ = "0.1.0"
