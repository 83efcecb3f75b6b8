"""Instance-dependent constants behind the regret guarantees.

For a losing arm i, the hardest "confusing" alternative is the distribution
closest to p_i in KL divergence that would still tie with the winner. This
script solves that projection for every arm of a Condorcet instance and
prints the full constants report that `qdb bounds` emits.
"""
import json

from qdb import BoundsConfig, kl_divergence, p_star, preference_summary, regret_constants
from qdb.instances import builtin

inst = builtin("condorcet-k5")
s = preference_summary(inst)
winner = s.condorcet
print(f"Condorcet winner: arm {winner}")
for i in range(inst.K):
    if i == winner:
        continue
    P, kl = p_star(inst.probs[i], inst.probs[winner])
    print(f"arm {i}: p = {inst.probs[i].round(3)}  ->  closest tie = {P.probs.round(3)}  KL = {kl:.4f}")
    assert abs(kl - kl_divergence(inst.probs[i], P.probs)) < 1e-12

report = regret_constants(inst, BoundsConfig(delta=0.15))
print()
print(json.dumps(report.to_dict(), indent=2))
