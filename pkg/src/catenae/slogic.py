"""Subjective-logic opinion algebra, evidence mapping, fusion trees,
query difficulty, and polyrepresentation ranking.

An opinion (b, d, u, a) generalizes a probability with explicit ignorance:
belief, disbelief, and uncertainty sum to one, and the base rate a fills
in for missing evidence.  Two operators combine opinions: consensus for
independent sources and trust discounting for dependent chains.  Fusing a
document's representation opinions and ranking by the fused expectation
gives the polyrepresentation score; the uncertainty of a query's fused
term opinions gives its difficulty.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import reduce
from typing import Mapping, Sequence, Union

from .errors import (
    DataError,
    DogmaticConflictError,
    DomainError,
    ParameterError,
    ValidationError,
)
from .retrieval import InvertedIndex, RankedRun

_SIMPLEX_TOL = 1e-9
PRIOR_WEIGHT = 2.0


@dataclass(frozen=True)
class Opinion:
    """A subjective-logic opinion: belief + disbelief + uncertainty = 1."""

    b: float
    d: float
    u: float
    a: float

    def __post_init__(self) -> None:
        for name, value in (("b", self.b), ("d", self.d), ("u", self.u), ("a", self.a)):
            if not -_SIMPLEX_TOL <= value <= 1.0 + _SIMPLEX_TOL:
                raise ParameterError(f"opinion component {name}={value} outside [0, 1]")
        if abs(self.b + self.d + self.u - 1.0) > _SIMPLEX_TOL:
            raise ParameterError(
                f"b + d + u = {self.b + self.d + self.u} does not sum to 1"
            )

    @property
    def is_dogmatic(self) -> bool:
        return self.u == 0.0

    @classmethod
    def vacuous(cls, a: float = 0.5) -> "Opinion":
        return cls(b=0.0, d=0.0, u=1.0, a=a)


def opinion_from_evidence(r: float, s: float, a: float = 0.5) -> Opinion:
    """Map positive/negative evidence counts to an opinion.

    Uses the non-informative prior weight 2: b = r/(r+s+2), d = s/(r+s+2),
    u = 2/(r+s+2).  No evidence gives the vacuous opinion.
    """
    if r < 0 or s < 0:
        raise ParameterError(f"evidence counts must be non-negative, got r={r}, s={s}")
    total = r + s + PRIOR_WEIGHT
    return Opinion(b=r / total, d=s / total, u=PRIOR_WEIGHT / total, a=a)


def expectation(w: Opinion) -> float:
    """Probability expectation E = b + a * u."""
    return w.b + w.a * w.u


def consensus(w1: Opinion, w2: Opinion) -> Opinion:
    """Fuse two independent opinions about the same proposition.

    Undefined (raises) when both are dogmatic.  A vacuous opinion is the
    identity element.  The fused base rate is evidence-weighted, falling
    back to the plain average when both operands are vacuous.
    """
    kappa = w1.u + w2.u - w1.u * w2.u
    if kappa == 0.0:
        raise DogmaticConflictError("consensus of two dogmatic opinions (u1 = u2 = 0)")
    b = (w1.b * w2.u + w2.b * w1.u) / kappa
    d = (w1.d * w2.u + w2.d * w1.u) / kappa
    u = (w1.u * w2.u) / kappa
    denom = kappa - w1.u * w2.u
    if denom != 0.0:
        a = (w1.a * w2.u + w2.a * w1.u - (w1.a + w2.a) * w1.u * w2.u) / denom
    else:
        a = (w1.a + w2.a) / 2.0
    a = min(max(a, 0.0), 1.0)
    return Opinion(b=b, d=d, u=u, a=a)


def discount(trust: Opinion, w: Opinion) -> Opinion:
    """Weight an opinion by trust in its source (the recommendation operator).

    Full trust leaves the opinion unchanged; full distrust yields vacuity.
    The target's base rate is kept: trust concerns the source, not the
    proposition.
    """
    return Opinion(
        b=trust.b * w.b,
        d=trust.b * w.d,
        u=trust.d + trust.u + trust.b * w.u,
        a=w.a,
    )


@dataclass(frozen=True)
class OpinionLeaf:
    opinion: Opinion
    source_id: str = ""


@dataclass(frozen=True)
class ConsensusNode:
    children: tuple["FusionNode", ...]

    def __post_init__(self) -> None:
        if len(self.children) < 2:
            raise ValidationError("consensus node needs at least 2 children")


@dataclass(frozen=True)
class DiscountNode:
    trust: "FusionNode"
    target: "FusionNode"


FusionNode = Union[OpinionLeaf, ConsensusNode, DiscountNode]


def fuse(tree: FusionNode) -> Opinion:
    """Evaluate a fusion tree bottom-up.

    Consensus nodes fold their children with the consensus operator
    (independent representations); discount nodes apply the trust operand
    to the target (dependent representations).
    """
    if isinstance(tree, OpinionLeaf):
        return tree.opinion
    if isinstance(tree, ConsensusNode):
        return reduce(consensus, (fuse(child) for child in tree.children))
    if isinstance(tree, DiscountNode):
        return discount(fuse(tree.trust), fuse(tree.target))
    raise ParameterError(f"not a fusion node: {tree!r}")


def parse_fusion_tree(obj: object) -> FusionNode:
    """Build a fusion tree from its JSON object form.

    Leaves are ``{"b":..,"d":..,"u":..,"a":..}`` (optional ``"id"``);
    internal nodes are ``{"op":"consensus","children":[...]}`` or
    ``{"op":"discount","trust":{...},"target":{...}}``.
    """
    if not isinstance(obj, dict):
        raise DataError(f"fusion node must be a JSON object, got {type(obj).__name__}")
    if "op" not in obj:
        missing = [key for key in ("b", "d", "u", "a") if key not in obj]
        if missing:
            raise DataError(f"opinion leaf missing fields: {', '.join(missing)}")
        try:
            opinion = Opinion(
                b=float(obj["b"]), d=float(obj["d"]), u=float(obj["u"]), a=float(obj["a"])
            )
        except ParameterError as exc:
            raise DataError(str(exc)) from exc
        return OpinionLeaf(opinion=opinion, source_id=str(obj.get("id", "")))
    op = obj["op"]
    if op == "consensus":
        children = obj.get("children")
        if not isinstance(children, list) or len(children) < 2:
            raise DataError("consensus node needs a 'children' list of >= 2 nodes")
        return ConsensusNode(children=tuple(parse_fusion_tree(c) for c in children))
    if op == "discount":
        if "trust" not in obj or "target" not in obj:
            raise DataError("discount node needs 'trust' and 'target'")
        return DiscountNode(
            trust=parse_fusion_tree(obj["trust"]),
            target=parse_fusion_tree(obj["target"]),
        )
    raise DataError(f"unknown fusion op {op!r}")


def load_fusion_tree(text: str) -> FusionNode:
    try:
        return parse_fusion_tree(json.loads(text))
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid fusion tree JSON: {exc.msg}") from exc


def polyrep_rank(
    query_opinions: Mapping[str, FusionNode],
    query_id: str = "polyrep",
    tag: str = "polyrep",
) -> RankedRun:
    """Rank documents by the expectation of their fused representation.

    The fused expectation is the cognitive-overlap score.  Ties order by
    ascending doc_id for reproducible runs.
    """
    scored = [(doc_id, expectation(fuse(tree))) for doc_id, tree in query_opinions.items()]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return RankedRun(query_id=query_id, entries=tuple(scored), tag=tag)


def query_difficulty(
    query_terms: Sequence[str],
    index: InvertedIndex,
    a: float = 0.5,
    scale_evidence: bool = True,
) -> float:
    """Uncertainty of the consensus over per-term evidence opinions.

    Each term contributes positive evidence r = document frequency and
    negative evidence s = doc_count - df.  With scaling on, both are
    divided by doc_count/100 so the uncertainty does not vanish on large
    corpora.  Higher values mean a harder query.
    """
    terms = [t for t in query_terms if t]
    if not terms:
        raise DomainError("query difficulty needs at least one query term")
    if index.doc_count == 0:
        raise DomainError("query difficulty needs a non-empty index")
    gamma = index.doc_count / 100.0 if scale_evidence else 1.0
    opinions = []
    for term in terms:
        df = index.df(term)
        r = df / gamma
        s = (index.doc_count - df) / gamma
        opinions.append(opinion_from_evidence(r, s, a))
    fused = reduce(consensus, opinions)
    return fused.u
