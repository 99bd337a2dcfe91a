"""Workload questionnaire handling and paired hypothesis tests.

Responses carry six 0-100 scales (mental, physical, temporal, performance,
effort, frustration) per participant and condition. Each null hypothesis
("the interface has no impact on X") gets a paired two-sided Student test
across participants; decisions come from the p value at a configurable
significance level. The t-distribution tail is evaluated in-package via the
regularized incomplete beta function (continued fraction, target precision
1e-10).
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from enum import Enum

from .errors import (
    ConfigurationError,
    DegenerateTestError,
    InsufficientDataError,
    UnpairedParticipantError,
)

CRITERIA = ("mental", "physical", "temporal", "performance", "effort", "frustration")

CRITERION_LABELS = {
    "mental": "Mental Demand",
    "physical": "Physical Demand",
    "temporal": "Temporal Demand",
    "performance": "Performance",
    "effort": "Effort",
    "frustration": "Frustration",
}

CONDITION_LABELS = {"dream": "DrEAM", "joystick": "Joystick"}

CSV_HEADER = ["participant", "condition", *CRITERIA]


@dataclass(frozen=True)
class TlxResponse:
    participant: str
    condition: str  # "dream" | "joystick"
    mental: float
    physical: float
    temporal: float
    performance: float
    effort: float
    frustration: float

    def __post_init__(self):
        if self.condition not in CONDITION_LABELS:
            raise ConfigurationError(f"condition must be one of {sorted(CONDITION_LABELS)}, got {self.condition!r}")
        for name in CRITERIA:
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and 0.0 <= v <= 100.0):
                raise ConfigurationError(f"score {name} must be in [0, 100], got {v!r}")

    def scores(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in CRITERIA)


def rtlx_score(response: TlxResponse) -> float:
    """Unweighted mean of the six scales (raw TLX)."""
    return sum(response.scores()) / len(CRITERIA)


# ---------------------------------------------------------------------------
# Student t distribution via the regularized incomplete beta function.

_INCBETA_EPS = 1e-12
_INCBETA_MAX_ITER = 400


def _betacf(a: float, b: float, x: float) -> float:
    # Lentz's continued fraction for the incomplete beta function.
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, _INCBETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _INCBETA_EPS:
            return h
    raise ArithmeticError("incomplete beta continued fraction failed to converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be > 0")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_two_sided_p(t: float, df: int) -> float:
    """P(|T| >= |t|) for a Student t variable with df degrees of freedom."""
    if df < 1:
        raise ValueError(f"df must be >= 1, got {df}")
    if not math.isfinite(t):
        raise ValueError(f"t must be finite, got {t!r}")
    if t == 0.0:
        return 1.0
    x = df / (df + t * t)
    return regularized_incomplete_beta(df / 2.0, 0.5, x)


# ---------------------------------------------------------------------------
# Paired test and the six-hypothesis run.


@dataclass(frozen=True)
class TTestOutcome:
    t: float
    df: int
    p: float


def paired_t_test(xs: list[float], ys: list[float]) -> TTestOutcome:
    """Two-sided paired Student test on xs - ys (sample std, n-1)."""
    if len(xs) != len(ys):
        raise InsufficientDataError(f"paired samples differ in length: {len(xs)} vs {len(ys)}")
    n = len(xs)
    if n < 2:
        raise InsufficientDataError(f"need at least 2 pairs, got {n}")
    diffs = [float(x) - float(y) for x, y in zip(xs, ys)]
    mean = sum(diffs) / n
    var = sum((d - mean) ** 2 for d in diffs) / (n - 1)
    sd = math.sqrt(var)
    if sd == 0.0:
        raise DegenerateTestError("paired differences have zero variance")
    t = mean / (sd / math.sqrt(n))
    return TTestOutcome(t=t, df=n - 1, p=t_two_sided_p(t, n - 1))


class Decision(Enum):
    REJECTED = "Rejected"
    NOT_REJECTED = "Not Rejected"


def decide(p: float, alpha: float) -> Decision:
    """Reject the null hypothesis iff p < alpha (strict)."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"p must be in [0, 1], got {p!r}")
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must be in [0, 1], got {alpha!r}")
    return Decision.REJECTED if p < alpha else Decision.NOT_REJECTED


@dataclass(frozen=True)
class TestResult:
    __test__ = False  # not a pytest class, despite the name

    criterion: str
    t: float
    df: int
    p: float
    decision: Decision

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "label": CRITERION_LABELS[self.criterion],
            "t": self.t,
            "df": self.df,
            "p": self.p,
            "decision": self.decision.value,
        }


@dataclass(frozen=True)
class DegenerateResult:
    criterion: str
    error: str

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "label": CRITERION_LABELS[self.criterion],
            "error": self.error,
        }


HypothesisRow = TestResult | DegenerateResult


def pair_by_participant(responses: list[TlxResponse]) -> list[tuple[TlxResponse, TlxResponse]]:
    """(dream, joystick) response pairs ordered by participant id."""
    by_key: dict[tuple[str, str], TlxResponse] = {}
    for r in responses:
        key = (r.participant, r.condition)
        if key in by_key:
            raise ConfigurationError(f"duplicate response for participant {r.participant!r}, {r.condition!r}")
        by_key[key] = r
    participants = sorted({r.participant for r in responses})
    pairs = []
    for pid in participants:
        a = by_key.get((pid, "dream"))
        b = by_key.get((pid, "joystick"))
        if a is None or b is None:
            missing = "dream" if a is None else "joystick"
            raise UnpairedParticipantError(f"participant {pid!r} has no {CONDITION_LABELS[missing]} response")
        pairs.append((a, b))
    return pairs


def run_hypotheses(responses: list[TlxResponse], alpha: float = 0.05) -> list[HypothesisRow]:
    """One paired test per criterion; degenerate criteria become error rows."""
    pairs = pair_by_participant(responses)
    if len(pairs) < 2:
        raise InsufficientDataError(f"need at least 2 paired participants, got {len(pairs)}")
    rows: list[HypothesisRow] = []
    for criterion in CRITERIA:
        xs = [getattr(a, criterion) for a, _ in pairs]
        ys = [getattr(b, criterion) for _, b in pairs]
        try:
            outcome = paired_t_test(xs, ys)
        except DegenerateTestError as exc:
            rows.append(DegenerateResult(criterion=criterion, error=str(exc)))
            continue
        rows.append(
            TestResult(
                criterion=criterion,
                t=outcome.t,
                df=outcome.df,
                p=outcome.p,
                decision=decide(outcome.p, alpha),
            )
        )
    return rows


# ---------------------------------------------------------------------------
# CSV input and table output.


def read_responses_csv(source: str | os.PathLike) -> list[TlxResponse]:
    """Read responses from the documented CSV schema."""
    with open(source, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigurationError("empty CSV: missing header") from None
        if [h.strip() for h in header] != CSV_HEADER:
            raise ConfigurationError(
                f"CSV header must be {','.join(CSV_HEADER)!r}, got {','.join(header)!r}"
            )
        responses = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(CSV_HEADER):
                raise ConfigurationError(f"line {line_no}: expected {len(CSV_HEADER)} columns, got {len(row)}")
            participant = row[0].strip()
            condition = row[1].strip().lower()
            if condition not in CONDITION_LABELS:
                raise ConfigurationError(
                    f"line {line_no}: condition must be DrEAM or Joystick, got {row[1]!r}"
                )
            try:
                scores = [float(cell) for cell in row[2:]]
            except ValueError as exc:
                raise ConfigurationError(f"line {line_no}: {exc}") from exc
            try:
                responses.append(TlxResponse(participant, condition, *scores))
            except ConfigurationError as exc:
                raise ConfigurationError(f"line {line_no}: {exc}") from exc
    return responses


def format_hypothesis_table(rows: list[HypothesisRow], alpha: float) -> str:
    """Aligned text table: one row per criterion, decision column last."""
    out = [f"{'Hypothesis':<18}{'t':>10}{'df':>5}{'p':>10}  H0 Result"]
    out.append("-" * len(out[0]))
    for row in rows:
        label = CRITERION_LABELS[row.criterion]
        if isinstance(row, DegenerateResult):
            out.append(f"{label:<18}{'-':>10}{'-':>5}{'-':>10}  degenerate ({row.error})")
        else:
            out.append(f"{label:<18}{row.t:>10.4f}{row.df:>5}{row.p:>10.4f}  {row.decision.value}")
    out.append(f"(alpha = {alpha})")
    return "\n".join(out)


def hypotheses_to_dict(rows: list[HypothesisRow], alpha: float) -> dict:
    return {"alpha": alpha, "rows": [row.to_dict() for row in rows]}
