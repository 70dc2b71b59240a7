"""Static figure of an engagement: paths, initial Apollonius circles, aimpoints, events."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .geometry import apollonius_circle  # noqa: E402
from .sim import Scenario, TrajectoryLog  # noqa: E402


def plot_engagement(scenario: Scenario, log: TrajectoryLog, path, title: str = "") -> None:
    st, sp = scenario.state, scenario.speeds
    n, m = st.n_pursuers, st.n_evaders
    pos = np.asarray(log.positions)
    fig, ax = plt.subplots(figsize=(7, 6))
    ax.axhline(0.0, color="k", lw=1.5)
    for i in range(n):
        ax.plot(pos[:, 2 * i], pos[:, 2 * i + 1], color="tab:blue", lw=1.2)
        ax.plot(*st.pursuers[i], "o", color="tab:blue")
        ax.annotate(f"P{i + 1}", st.pursuers[i], textcoords="offset points", xytext=(4, 4))
    for j in range(m):
        k = 2 * (n + j)
        ax.plot(pos[:, k], pos[:, k + 1], color="tab:red", lw=1.2)
        ax.plot(*st.evaders[j], "s", color="tab:red")
        ax.annotate(f"E{j + 1}", st.evaders[j], textcoords="offset points", xytext=(4, 4))

    committed = log.commitment
    if committed is not None:
        t = np.linspace(0.0, 2 * np.pi, 200)
        for j, ps in committed.pairs.items():
            for i in ps:
                if not sp.allowed(i, j):
                    continue
                c = apollonius_circle(st.pursuers[i], st.evaders[j], sp.alpha(i, j))
                ax.plot(c.center.x + c.radius * np.cos(t), c.center.y + c.radius * np.sin(t),
                        ls="--", lw=0.8, color="gray")
            plan = committed.plans[j]
            if plan is not None:
                ax.plot(plan.point.x, plan.point.y, "x", color="k", ms=8)

    for ev in log.events:
        marker = "*" if ev.kind == "capture" else "v"
        ax.plot(ev.location.x, ev.location.y, marker, color="tab:green", ms=11)

    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
