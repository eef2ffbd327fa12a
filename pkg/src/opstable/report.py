"""Analysis reports and their JSON form."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .closedform import DimensionReport
from .numlab.trace import CriterionEstimate, DyadicTrace
from .spectral import SpectralProfile


def _clean(obj):
    # JSON has no NaN/inf; map them to null so output stays standard
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


@dataclass
class Report:
    profile: SpectralProfile
    dimension: DimensionReport
    estimates: dict[str, CriterionEstimate] = field(default_factory=dict)
    traces: dict[str, DyadicTrace] = field(default_factory=dict)
    deltas: dict[str, object] = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "profile": self.profile.to_dict(),
            "dimension": self.dimension.to_dict(),
            "estimates": {k: v.to_dict() for k, v in self.estimates.items()},
            "traces": {k: v.to_dict() for k, v in self.traces.items()},
            "deltas": dict(self.deltas),
            "provenance": dict(self.provenance),
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(_clean(self.to_dict()), sort_keys=True, indent=indent, allow_nan=False)

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        return cls(
            profile=SpectralProfile.from_dict(data["profile"]),
            dimension=DimensionReport.from_dict(data["dimension"]),
            estimates={k: CriterionEstimate.from_dict(v) for k, v in data.get("estimates", {}).items()},
            traces={k: DyadicTrace.from_dict(v) for k, v in data.get("traces", {}).items()},
            deltas=dict(data.get("deltas", {})),
            provenance=dict(data.get("provenance", {})),
        )

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def verdicts(self) -> dict:
        """Every verdict-like field, for round-trip comparisons."""
        out = {
            "dim": self.dimension.dim_value,
            "exists": self.dimension.exists,
            "critical_beta": self.dimension.critical_beta,
            "case": self.profile.case_label,
        }
        out.update({f"trace:{k}": t.verdict for k, t in self.traces.items()})
        out.update({f"estimate:{k}": (e.beta_lo, e.beta_hi) for k, e in self.estimates.items()})
        return out

    def summary_lines(self) -> list[str]:
        p, dm = self.profile, self.dimension
        alphas = ", ".join(f"{a:.6g}" for a in p.alphas)
        lines = [
            f"dimension d       {p.dim}",
            f"exponents alpha   ({alphas})",
            f"case              {p.case_label}",
            f"gamma             {p.gamma:.6g}",
            f"critical beta     {_fmt(dm.critical_beta)}",
            f"dim M2            {_fmt(dm.dim_value)}",
            f"double points     {'yes' if dm.exists else 'no'}",
        ]
        for name, est in self.estimates.items():
            lines.append(f"{name:<18}[{est.beta_lo:.4g}, {est.beta_hi:.4g}]"
                         f" ({est.evaluations} evaluations)")
        for name, tr in self.traces.items():
            lines.append(f"{name:<18}{tr.verdict} (rate {_fmt(tr.rate)})")
        for name, val in self.deltas.items():
            lines.append(f"delta {name:<12}{_fmt(val)}")
        return lines


def _fmt(x) -> str:
    if isinstance(x, float):
        return "nan" if math.isnan(x) else f"{x:.6g}"
    return str(x)
