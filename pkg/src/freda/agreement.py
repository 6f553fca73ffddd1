"""Inter-annotator agreement: Cohen's kappa over first vs. second decisions.

Only rounds 1 and 2 enter the contingency table; tie-breaking third
responses never do.  Deleted sentences are excluded.  The overall kappa
is computed on the pooled table summed across relations, not by
averaging per-relation kappas.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .engine import SentenceState
from .errors import EmptyTable


@dataclass(frozen=True)
class ContingencyTable:
    a: int  # both expresses
    b: int  # first expresses, second not
    c: int  # first not, second expresses
    d: int  # both not

    def __post_init__(self):
        if min(self.a, self.b, self.c, self.d) < 0:
            raise ValueError("contingency counts must be >= 0")

    @property
    def total(self) -> int:
        return self.a + self.b + self.c + self.d

    def __add__(self, other: "ContingencyTable") -> "ContingencyTable":
        return ContingencyTable(self.a + other.a, self.b + other.b,
                                self.c + other.c, self.d + other.d)


def kappa(t: ContingencyTable) -> float:
    """Cohen's kappa; when chance agreement is 1, returns 1 on perfect observed
    agreement and 0 otherwise."""
    n = t.total
    if n < 1:
        raise EmptyTable("kappa needs at least one observation")
    p_o = (t.a + t.d) / n
    p_e = ((t.a + t.b) / n) * ((t.a + t.c) / n) + ((t.c + t.d) / n) * ((t.b + t.d) / n)
    if p_e == 1.0:
        return 1.0 if p_o == 1.0 else 0.0
    return (p_o - p_e) / (1.0 - p_e)


def build_contingency(states: Iterable[SentenceState], relation: str) -> ContingencyTable:
    """Tally round-1 vs round-2 decisions for one relation."""
    a = b = c = d = 0
    for st in states:
        if st.relation_name != relation or st.status == "deleted":
            continue
        if len(st.responses) < 2:
            continue
        first = st.responses[0].decision == "expresses"
        second = st.responses[1].decision == "expresses"
        if first and second:
            a += 1
        elif first:
            b += 1
        elif second:
            c += 1
        else:
            d += 1
    return ContingencyTable(a, b, c, d)


@dataclass(frozen=True)
class AgreementReport:
    per_relation: dict[str, tuple[ContingencyTable, float]]
    overall: tuple[ContingencyTable, float]


def build_agreement_report(states: Iterable[SentenceState]) -> AgreementReport:
    states = list(states)
    relations = sorted({st.relation_name for st in states})
    per_relation: dict[str, tuple[ContingencyTable, float]] = {}
    pooled = ContingencyTable(0, 0, 0, 0)
    for rel in relations:
        table = build_contingency(states, rel)
        pooled = pooled + table
        if table.total >= 1:
            per_relation[rel] = (table, kappa(table))
    overall_kappa = kappa(pooled) if pooled.total >= 1 else None
    return AgreementReport(per_relation, (pooled, overall_kappa))


def table_to_json(t: ContingencyTable) -> dict:
    return {"a": t.a, "b": t.b, "c": t.c, "d": t.d}


def report_to_json(r: AgreementReport) -> dict:
    pooled, overall_kappa = r.overall
    return {
        "per_relation": {
            rel: {"table": table_to_json(t), "kappa": k}
            for rel, (t, k) in sorted(r.per_relation.items())
        },
        "overall": {"table": table_to_json(pooled), "kappa": overall_kappa},
    }


def render_kappa_table(r: AgreementReport) -> str:
    """Fixed-width per-relation kappa table, kappa to 2 decimals."""
    rows = [(rel, t, k) for rel, (t, k) in sorted(r.per_relation.items())]
    width = max([len("relation")] + [len(rel) for rel, _, _ in rows] + [len("overall")])
    lines = [f"{'relation':<{width}}  {'n':>6}  kappa"]
    for rel, t, k in rows:
        lines.append(f"{rel:<{width}}  {t.total:>6}  {k:.2f}")
    pooled, overall_kappa = r.overall
    if overall_kappa is not None:
        lines.append(f"{'overall':<{width}}  {pooled.total:>6}  {overall_kappa:.2f}")
    return "\n".join(lines)
