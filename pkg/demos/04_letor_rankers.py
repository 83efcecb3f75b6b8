"""Turning a learning-to-rank dataset into a bandit instance.

Each ranking feature becomes an arm. For every query the feature acts as a
ranker: the document it scores highest is "shown", and that document's
graded relevance label is the qualitative feedback. Averaging over queries
gives the arm's feedback distribution. The package ships a tiny LETOR-format
fixture; point the script at a real file to use your own data.
"""
import sys

from qdb import RunConfig, preference_summary, run_many
from qdb.instances import build_letor_instance, bundled_letor_fixture, parse_letor

if len(sys.argv) > 1:
    with open(sys.argv[1]) as fh:
        ds = parse_letor(fh)
else:
    ds = parse_letor(bundled_letor_fixture())

features = sorted(ds.feature_ids)[:10]
inst = build_letor_instance(ds, features)
s = preference_summary(inst)
print(f"{len(ds.queries)} queries, {len(ds.records)} documents, relevance levels 0..{ds.L - 1}")
for f, row in zip(features, inst.probs):
    print(f"feature {f}: relevance distribution {row.round(3)}")
print("Borda scores:", s.borda.round(4), "-> best ranker is feature", features[s.borda_winner])

agg = run_many(RunConfig(inst, "tbs", 5000, replications=3, checkpoints=[500, 5000]))
print("Thompson Borda regret at t=500, 5000:", agg.borda_mean.round(2))
