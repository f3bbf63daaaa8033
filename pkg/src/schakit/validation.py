"""Analysis validation.

``validate`` returns a report instead of raising: errors mark conditions that
make depth clustering infeasible, warnings mark suspicious but workable input.
Feasibility is checked by simulating the depth layers (drop depth-0 notes,
decrement, repeat) and testing at every layer whether each clustered note has a
legal target, so voices that only become stranded at deeper layers are caught
as well as the all-zero-depth cases.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import INNER_PARTS, OUTER_PARTS, Analysis, Part

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Finding:
    severity: str
    code: str
    location: str
    message: str

    def line(self) -> str:
        return f"{self.severity.upper()} {self.code} {self.location} {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...]

    @property
    def errors(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity == ERROR)

    @property
    def warnings(self) -> tuple[Finding, ...]:
        return tuple(f for f in self.findings if f.severity == WARNING)

    @property
    def ok(self) -> bool:
        return not self.errors


def validate(a: Analysis, lenient: bool = False) -> ValidationReport:
    """Checks structural invariants and clustering feasibility.

    With ``lenient=True``, V_NO_SURVIVOR degrades to a warning wherever the
    other-outer-voice fallback can actually take over; it stays an error when
    even the fallback has no target.
    """
    findings: list[Finding] = []
    findings.extend(_structural_findings(a))
    # Feasibility only makes sense on structurally sound voices.
    if not any(f.code in ("V_LENGTH", "V_HOLD") for f in findings):
        findings.extend(_feasibility_findings(a, lenient))
        findings.extend(_warnings(a))
    return ValidationReport(tuple(findings))


def _structural_findings(a: Analysis) -> list[Finding]:
    out: list[Finding] = []
    lengths = {v.part: len(v) for v in a.voices}
    if len(set(lengths.values())) > 1:
        detail = ", ".join(f"{p.value}={n}" for p, n in lengths.items())
        out.append(Finding(ERROR, "V_LENGTH", "-", f"voices have unequal slot counts ({detail})"))
        return out  # slot-level checks below assume aligned voices

    for v in a.voices:
        for i, ev in enumerate(v.slots):
            if ev.is_hold and (i == 0 or v.slots[i - 1].is_rest):
                out.append(
                    Finding(ERROR, "V_HOLD", f"{v.part.value}[{i}]", "hold must follow a pitch or hold slot")
                )

    n_v = a.n_v
    for k, sym in enumerate(a.cross_voice):
        for part, idx in sym.endpoints:
            if not 0 <= idx < n_v or not a.voice(part).slots[idx].is_pitch:
                out.append(
                    Finding(
                        ERROR,
                        "V_INDEX",
                        f"crossVoice[{k}]",
                        f"endpoint ({part.value}, {idx}) does not reference a pitched slot",
                    )
                )
    return out


def _feasibility_findings(a: Analysis, lenient: bool) -> list[Finding]:
    out: list[Finding] = []
    # (part, index) -> current depth, evolved layer by layer
    live: dict[tuple[Part, int], int] = {
        (part, i): ev.depth for part, i, ev in a.notes()  # type: ignore[misc]
    }
    reported: set[tuple[str, Part]] = set()
    layer = 0
    while live:
        clustering = any(d > 0 for d in live.values())
        # Layer 0 is checked even with no positive depth anywhere: an all-zero
        # outer or stranded inner voice is invalid by definition, not merely
        # when a later layer would cluster it. The final all-zero layer of a
        # deeper analysis is the surviving reduction and is not checked.
        if layer > 0 and not clustering:
            break
        zeros = [(p, i) for (p, i), d in live.items() if d == 0]
        survivors_by_part: dict[Part, bool] = {
            p: any(d > 0 for (q, _), d in live.items() if q == p) for p in Part
        }
        for p, i in zeros:
            if survivors_by_part[p]:
                continue  # same-voice branch applies
            if p in OUTER_PARTS:
                if ("V_NO_SURVIVOR", p) in reported:
                    continue
                reported.add(("V_NO_SURVIVOR", p))
                other = Part.BASS if p is Part.SOP else Part.SOP
                # With no clustering anywhere the voice never needs a target,
                # so lenient mode can always degrade; otherwise the other
                # outer voice must offer one.
                fallback_ok = not clustering or survivors_by_part[other]
                if lenient and fallback_ok:
                    detail = (
                        f"falling back to the {other.value} voice"
                        if clustering
                        else "all depths are 0; nothing clusters"
                    )
                    out.append(
                        Finding(
                            WARNING,
                            "V_NO_SURVIVOR",
                            p.value,
                            f"no positive-depth note at layer {layer}; {detail}",
                        )
                    )
                else:
                    msg = f"outer voice has no positive-depth note at layer {layer}"
                    if lenient and not fallback_ok:
                        msg += f" and the {other.value} voice offers no fallback target"
                    out.append(Finding(ERROR, "V_NO_SURVIVOR", p.value, msg))
            else:
                if ("V_INNER_NEEDS_OUTER", p) in reported:
                    continue
                missing = [q.value for q in OUTER_PARTS if not survivors_by_part[q]]
                if missing:
                    reported.add(("V_INNER_NEEDS_OUTER", p))
                    out.append(
                        Finding(
                            ERROR,
                            "V_INNER_NEEDS_OUTER",
                            p.value,
                            f"inner voice needs a 50/50 split at layer {layer} but "
                            f"{' and '.join(missing)} {'has' if len(missing) == 1 else 'have'} no positive-depth note",
                        )
                    )
        live = {k: d - 1 for k, d in live.items() if d > 0}
        layer += 1
    return out


def _warnings(a: Analysis) -> list[Finding]:
    out: list[Finding] = []
    notes = [ev for _, _, ev in a.notes()]
    if notes:
        if all(ev.depth > 0 for ev in notes):  # type: ignore[operator]
            out.append(
                Finding(WARNING, "W_ALL_POSITIVE", "-", "no depth-0 note anywhere; first clustering layer is an identity")
            )
        if not any(ev.ursatz for ev in notes):
            out.append(Finding(WARNING, "W_NO_URSATZ", "-", "no note is marked as part of the Ursatz"))
    return out


# Inner voices whose notes all sit at depth 0 are the classic 50/50 case; the
# simulation above reports them through the same code paths, so no special
# handling is needed here.
