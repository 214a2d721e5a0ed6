# %% [markdown]
# For short horizons the joint law of the messages can be computed
# exactly.  The diagonal of link states seen by a node at time t is a
# finite Markov chain of independent coordinates; a forward pass over it
# gives the law of the last few messages.

# %%
from linkrate import LinkParams, bounds
from linkrate import oracle

p = LinkParams(0.3, 0.1)
law = oracle.oracle_joint(p, 8, 1)
for m in range(9):
    print(m, law.pmf[(m,)], p.D * p.U**m)

# %% [markdown]
# A second implementation enumerates every link in the space-time triangle.

# %%
dp = oracle.oracle_joint(p, 5, 2).pmf
en = oracle.enumerate_triangle(p, 5, 2)
print("max difference", max(abs(dp[k] - en.get(k, 0.0)) for k in dp))

# %% [markdown]
# Record probabilities at finite t approach the analytic p_j.  How fast
# depends on U: the truncated diagonal caps M_t at t, a loss of order U**t.

# %%
for u, d in [(0.05, 0.5), (0.3, 0.1)]:
    q = LinkParams(u, d)
    pj = bounds(q, 3).table.p[3]
    print((u, d), "analytic p_3", pj, "oracle", [oracle.oracle_pj(q, t, 3) for t in (6, 8, 10)])

# %% [markdown]
# The finite-t conditional entropies approach the upper and lower bounds
# from below as t grows.

# %%
b = bounds(p, 2)
print("L_2, U_2:", b.L[1], b.Ub[1])
for t in (4, 6, 8, 10):
    print(t, oracle.oracle_conditional_entropy(p, t, 2), oracle.oracle_conditional_entropy_given_Z(p, t, 2))
print("t -> infinity limit of the first:", oracle.limit_conditional_entropy(p, 2))
