# %% [markdown]
# The message entropy rate sits between two sequences of bounds L_j and
# U_j that close in geometrically.  The record probabilities p_j that
# drive the recursion come from the level coefficients r_j^(m).

# %%
from linkrate import LinkParams, bounds, convergence_fit, entropy_rate, rj_closed_form, rj_table

p = LinkParams(0.3, 0.1)
t = rj_table(p, 6)
print("r_j:", t.r)
print("p_j:", t.p)
print("closed forms:", [rj_closed_form(p, j) for j in (1, 2, 3)])
print("levels summed per j:", t.m_truncation, "dropped tail:", t.residual.max())

# %%
b = bounds(p, 12)
for j, lo, hi, g in zip(b.j, b.L, b.Ub, b.gap):
    print(f"j={j:2d}  L={lo:.10f}  U={hi:.10f}  gap={g:.3e}")

# %% [markdown]
# entropy_rate keeps extending the bounds until the bracket is narrow enough.

# %%
est = entropy_rate(p, target_halfwidth=1e-10)
print(est)
print("fit:", convergence_fit(bounds(p, 40)))

# %% [markdown]
# When u + d = 1 the link forgets its past in one step, the bounds coincide
# from the start and the rate is h(U)/D.

# %%
q = LinkParams(0.5, 0.5)
print(entropy_rate(q), convergence_fit(bounds(q, 40)))

# %% [markdown]
# Slow links (|lambda| near 1) need many more terms.

# %%
print(entropy_rate(LinkParams(0.05, 0.05), 1e-10, j_cap=20))
print(entropy_rate(LinkParams(0.05, 0.05), 1e-10))
