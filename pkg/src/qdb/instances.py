"""Problem instances: analytic constructions, synthetic benchmarks and LETOR data.

All vectors are ordered worst level first, so level ``L`` is the best.
"""
from __future__ import annotations

import io
import json
import logging
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Collection, Dict, Iterable, List, Optional, TextIO, Tuple, Union

import numpy as np

from .core import SIMPLEX_TOL, FeedbackDistribution, InvalidArgumentError, QdbInstance

log = logging.getLogger(__name__)

JSON_SUM_TOL = 1e-6


def _check_eps(eps: float) -> None:
    if not 0 < eps < 1 / 8:
        raise InvalidArgumentError(f"eps must lie in (0, 1/8), got {eps}")


def thm2_instance(eps: float = 0.05) -> QdbInstance:
    """Three arms on which Thompson Borda sampling with known arms 1, 2 can stall."""
    _check_eps(eps)
    return QdbInstance(
        (
            [eps, eps, 1 - 4 * eps, eps, eps],
            [eps, 0.25 + eps, 0.5 - 4 * eps, 0.25 + eps, eps],
            [0.5, 0.25, eps, 0.25 - 2 * eps, eps],
        ),
        name=f"thm2(eps={eps})",
    )


def thm2_decoy(eps: float = 0.05) -> np.ndarray:
    """Third-arm distribution under which arm 2 looks like the Borda winner."""
    _check_eps(eps)
    return np.array([0.5, 0.25 - 2 * eps, eps, 0.25, eps])


def thm5_pair(eps: float = 0.05) -> Tuple[QdbInstance, QdbInstance]:
    """Instances ``(gamma, theta)`` differing only in the third arm.

    ``theta`` keeps the third arm of :func:`thm2_instance`; ``gamma`` swaps
    it for :func:`thm2_decoy`, which makes arm 2 the Borda winner.
    """
    base = thm2_instance(eps)
    gamma = QdbInstance(base.arms[:2] + (FeedbackDistribution(thm2_decoy(eps)),), name=f"thm5-gamma(eps={eps})")
    theta = QdbInstance(base.arms, name=f"thm5-theta(eps={eps})")
    return gamma, theta


def borda_failure_instance() -> QdbInstance:
    """K=3, L=4 instance where Thompson Borda sampling under-explores arm 3."""
    return QdbInstance(
        ([0.0, 0.0, 1.0, 0.0], [0.0, 0.5, 0.0, 0.5], [0.2, 0.4, 0.3, 0.1]),
        name="borda-failure",
    )


def medicine_instance() -> QdbInstance:
    """Two treatments with outcomes (dead, not cured, cured); A is preferred."""
    return QdbInstance(
        ([0.002, 0.003, 0.995], [0.003, 0.002, 0.995]),
        name="medicine",
    )


def dice_instance() -> QdbInstance:
    """Intransitive dice on L=9: each arm beats the next with probability 5/9."""
    faces = ((2, 4, 9), (1, 6, 8), (3, 5, 7))
    arms = []
    for f in faces:
        p = np.zeros(9)
        p[np.array(f) - 1] = 1 / 3
        arms.append(p)
    return QdbInstance(tuple(arms), name="dice")


def condorcet_k5_instance() -> QdbInstance:
    """Five arms on L=5 with arm 0 as a clear Condorcet winner."""
    return QdbInstance(
        (
            [0.05, 0.10, 0.20, 0.30, 0.35],
            [0.10, 0.15, 0.25, 0.25, 0.25],
            [0.15, 0.20, 0.25, 0.20, 0.20],
            [0.20, 0.25, 0.20, 0.20, 0.15],
            [0.30, 0.25, 0.20, 0.15, 0.10],
        ),
        name="condorcet-k5",
    )


def lemma3_instance(eps_prime: float) -> QdbInstance:
    """Two-level pair where duel information is tiny but KL separation is not.

    Arm 0 is ``(eps', 1 - eps')``; arm 1, the Condorcet winner, puts mass
    ``exp(-1/eps')`` on the bad level.
    """
    if not 0 < eps_prime <= 0.5:
        raise InvalidArgumentError("eps_prime must lie in (0, 1/2]")
    tiny = math.exp(-1 / eps_prime)
    return QdbInstance(([eps_prime, 1 - eps_prime], [tiny, 1 - tiny]), name=f"lemma3(eps'={eps_prime})")


BUILTINS: Dict[str, Callable[[], QdbInstance]] = {
    "thm2": thm2_instance,
    "borda-failure": borda_failure_instance,
    "thm5-gamma": lambda: thm5_pair()[0],
    "thm5-theta": lambda: thm5_pair()[1],
    "medicine": medicine_instance,
    "dice": dice_instance,
    "condorcet-k5": condorcet_k5_instance,
}


def builtin(name: str) -> QdbInstance:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise InvalidArgumentError(f"unknown built-in instance {name!r}; choose from {sorted(BUILTINS)}") from None


# Instance JSON: {"L": int, "arms": [[p_1, ..., p_L], ...]}


def instance_from_dict(obj: dict, name: str = "") -> QdbInstance:
    try:
        L = int(obj["L"])
        rows = [np.asarray(r, dtype=float) for r in obj["arms"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"malformed instance JSON: {exc}") from None
    arms = []
    for i, r in enumerate(rows):
        if r.ndim != 1 or r.size != L:
            raise InvalidArgumentError(f"arm {i} has {r.size} levels, expected {L}")
        if np.any(r < 0) or not np.all(np.isfinite(r)):
            raise InvalidArgumentError(f"arm {i} has negative or non-finite entries")
        total = r.sum()
        if abs(total - 1) > JSON_SUM_TOL:
            raise InvalidArgumentError(f"arm {i} sums to {total}, not 1")
        # leave float noise alone so a save/load round trip is exact
        arms.append(r / total if abs(total - 1) > SIMPLEX_TOL else r)
    return QdbInstance(tuple(arms), name=obj.get("name", name))


def instance_to_dict(instance: QdbInstance) -> dict:
    out = {"L": instance.L, "arms": instance.probs.tolist()}
    if instance.name:
        out["name"] = instance.name
    return out


def load_instance(path) -> QdbInstance:
    with open(path) as f:
        return instance_from_dict(json.load(f), name=str(path))


def resolve_instance(spec: str) -> QdbInstance:
    """A built-in name or a path to an instance JSON file."""
    if spec in BUILTINS:
        return builtin(spec)
    try:
        return load_instance(spec)
    except FileNotFoundError:
        raise InvalidArgumentError(
            f"{spec!r} is neither a built-in instance ({', '.join(sorted(BUILTINS))}) nor a file"
        ) from None


# LETOR ranking data: "<rel> qid:<q> <fid>:<val> ... # comment"


class LetorParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class LetorRecord:
    relevance: int
    query_id: int
    features: Dict[int, float]


@dataclass
class LetorDataset:
    queries: Dict[int, List[LetorRecord]]
    L: int
    feature_ids: frozenset = field(default_factory=frozenset)

    @property
    def records(self) -> List[LetorRecord]:
        return [r for group in self.queries.values() for r in group]


def _parse_line(line: str, line_no: int) -> Optional[LetorRecord]:
    body = line.split("#", 1)[0].strip()
    if not body:
        return None
    tokens = body.split()
    if len(tokens) < 2:
        raise LetorParseError(line_no, "expected '<relevance> qid:<id> ...'")
    try:
        rel = int(tokens[0])
    except ValueError:
        raise LetorParseError(line_no, f"relevance {tokens[0]!r} is not an integer") from None
    if rel < 0:
        raise LetorParseError(line_no, f"negative relevance {rel}")
    key, _, qid = tokens[1].partition(":")
    if key != "qid" or not qid:
        raise LetorParseError(line_no, f"expected qid:<id>, got {tokens[1]!r}")
    try:
        query_id = int(qid)
    except ValueError:
        raise LetorParseError(line_no, f"query id {qid!r} is not an integer") from None
    features = {}
    for tok in tokens[2:]:
        fid, sep, val = tok.partition(":")
        try:
            fid_i, val_f = int(fid), float(val)
        except ValueError:
            raise LetorParseError(line_no, f"bad feature token {tok!r}") from None
        if not sep or fid_i < 1:
            raise LetorParseError(line_no, f"bad feature token {tok!r}")
        if fid_i in features:
            raise LetorParseError(line_no, f"feature {fid_i} repeated")
        features[fid_i] = val_f
    return LetorRecord(rel, query_id, features)


def parse_letor(stream: Union[TextIO, str, Iterable[str]], levels: Optional[int] = None) -> LetorDataset:
    """Parse LETOR text; relevance ``r`` becomes feedback level ``r + 1``.

    ``levels`` overrides the inferred number of levels (max label + 1).
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    queries: Dict[int, List[LetorRecord]] = {}
    fids = set()
    for line_no, line in enumerate(stream, start=1):
        rec = _parse_line(line, line_no)
        if rec is None:
            continue
        queries.setdefault(rec.query_id, []).append(rec)
        fids.update(rec.features)
    if not queries:
        raise InvalidArgumentError("no records found")
    max_rel = max(r.relevance for g in queries.values() for r in g)
    L = max_rel + 1 if levels is None else int(levels)
    if L < max_rel + 1:
        raise InvalidArgumentError(f"levels={L} too small for relevance label {max_rel}")
    return LetorDataset(queries=queries, L=L, feature_ids=frozenset(fids))


def bundled_letor_fixture() -> str:
    return resources.files("qdb.data").joinpath("letor_fixture.txt").read_text()


def build_letor_instance(
    ds: LetorDataset,
    feature_ids: List[int],
    levels: Optional[int] = None,
    ascending: Collection[int] = (),
) -> QdbInstance:
    """One arm per single-feature ranker.

    Arm ``f`` yields the relevance level of the top document for a uniformly
    random query when documents are ranked by feature ``f`` (largest first,
    or smallest first for ids in ``ascending``). Ties go to the earlier
    document in file order. Documents missing the feature score 0, following
    the sparse LETOR convention; a query where no document carries the
    feature is skipped for that arm.
    """
    L = ds.L if levels is None else int(levels)
    if L < ds.L:
        raise InvalidArgumentError(f"levels={L} below the dataset's {ds.L}")
    if not feature_ids:
        raise InvalidArgumentError("need at least one feature")
    arms = []
    for fid in feature_ids:
        if fid not in ds.feature_ids:
            raise InvalidArgumentError(f"feature {fid} does not occur in the dataset")
        sign = -1.0 if fid in ascending else 1.0
        hist = np.zeros(L)
        for qid, docs in ds.queries.items():
            if not any(fid in d.features for d in docs):
                log.warning("feature %d absent from every document of query %d; query skipped", fid, qid)
                continue
            scores = [sign * d.features.get(fid, 0.0) for d in docs]
            top = docs[int(np.argmax(scores))]
            hist[top.relevance] += 1
        arms.append(hist / hist.sum())
    return QdbInstance(tuple(arms), name="letor[" + ",".join(map(str, feature_ids)) + "]")
