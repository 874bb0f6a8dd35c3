# %% [markdown]
# # A small sweep
#
# The same thing is available as `trotter-lab run` and `trotter-lab summarize`.

# %%
import io

from trotter_lab.harness import (SweepConfig, expected_row_count, run_sweep, summarize,
                                 summary_text, write_csv)

cfg = SweepConfig(family="xxz", sizes=(4, 6), deltas=(0.25,), gs=(0.5, 1.5), orders=(1, 2),
                  steps=(3, 10), n_random=10, seed=0)
rows = list(run_sweep(cfg))
print(len(rows), "rows, expected", expected_row_count(cfg))

# %%
buf = io.StringIO()
write_csv(rows[:5], buf, include_wall_time=False)
print(buf.getvalue())

# %%
summary = summarize(rows)
lines = summary_text([s for s in summary if s["table"] == "by_steps" and "best" in s["method"]])
print(lines)

# %%
wins = [s for s in summary if s["table"] == "perm_wins" and s["method"] == "xyz_groups"]
for s in wins:
    print(s["order"], s["steps"], s["perm"], f"{s['value']:.2f}")
