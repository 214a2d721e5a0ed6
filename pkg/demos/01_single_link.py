# %% [markdown]
# A single link is a two-state Markov chain: a closed link opens with
# probability u per step, an open link closes with probability d.
# This script walks through its stationary law, multi-step kernels and
# the entropy quantities the overhead bounds are built from.

# %%
import numpy as np

from linkrate import (LinkParams, jstep, jstep_by_matrix_power, jstep_entropy_rate, link_entropy,
                      stationary, step_information)

p = LinkParams(0.3, 0.1)
print("lambda =", p.lam)
print(stationary(p))

# %% [markdown]
# The j-step kernel has a closed form through the second eigenvalue
# lambda = 1 - u - d.  Repeated matrix products give the same numbers.

# %%
for j in (1, 2, 5, 20):
    print(j, jstep(p, j), jstep_by_matrix_power(p, j))

# %% [markdown]
# Sampling the link every j steps gives a chain with entropy rate
# H(X^(j)).  It climbs towards the single-link entropy h(U) as the samples
# decorrelate.  The difference is computed without cancellation.

# %%
print("h(U) =", link_entropy(p))
for j in (1, 2, 4, 8, 16, 32):
    print(f"j={j:2d}  H(X^(j))={jstep_entropy_rate(p, j):.12f}  gap={step_information(p, j):.3e}")

# %% [markdown]
# The gap shrinks like lambda**(2j): the first-order term cancels.

# %%
js = np.arange(4, 41)
gaps = np.array([step_information(p, int(j)) for j in js])
print("fitted slope", np.polyfit(js, np.log(gaps), 1)[0], "vs 2 log|lambda|", 2 * np.log(abs(p.lam)))
