"""How ordinal feedback turns into pairwise preferences.

Each arm yields a label on an ordered scale (say poor < fair < good). Two arms
are compared by drawing one label from each; the higher label wins and ties
are split by a fair coin. This script computes the resulting preference
matrix for a few built-in instances and shows why Borda and Condorcet
winners can disagree, or why a Condorcet winner may not exist at all.
"""
import numpy as np

from qdb import preference_summary
from qdb.core import duel_sample
from qdb.instances import builtin
from qdb.sampling import RngState, sample_categorical

np.set_printoptions(precision=4, suppress=True)

for name in ["borda-failure", "medicine", "dice"]:
    inst = builtin(name)
    s = preference_summary(inst)
    print(f"== {name}: K={inst.K} arms, L={inst.L} levels")
    print("win probabilities mu[i, j] = P(arm i beats arm j):")
    print(s.mu)
    if inst.K == 2:
        print(f"mu[0, 1] = {s.mu[0, 1]:.7f}, a margin too small to see at 4 decimals")
    print("Borda scores:", s.borda, "-> Borda winner", s.borda_winner)
    print("Condorcet winner:", s.condorcet if s.condorcet is not None else "none (preferences are cyclic)")
    print()

# the closed form agrees with simulated duels
inst = builtin("borda-failure")
rng = RngState(0)
wins = sum(
    duel_sample(sample_categorical(inst.probs[1], rng), sample_categorical(inst.probs[2], rng), rng)
    for _ in range(100_000)
)
print(f"simulated P(arm 1 beats arm 2) = {wins / 100_000:.4f}, "
      f"exact = {preference_summary(inst).mu[1, 2]:.4f}")
