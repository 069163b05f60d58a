"""Report serialization: delimited output plus JSON sidecars.

Format contract: CSV is UTF-8, comma-separated, header mandatory, reals at
17 significant digits with '.' as the decimal separator regardless of
locale.  Complex quantities always serialize as separate _re/_im columns
so round-trips are lossless and downstream plotting never parses strings.
JSON sidecars are written with sorted keys and no timestamps, so identical
runs produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .meansquare import MeanSquareReport


def fmt_real(x: float) -> str:
    """17-significant-digit, locale-independent rendering."""
    if isinstance(x, bool):
        return "1" if x else "0"
    xf = float(x)
    if math.isnan(xf):
        return "nan"
    if math.isinf(xf):
        return "inf" if xf > 0 else "-inf"
    return format(xf, ".17g")


def render_csv(header: list[str], rows: list[list]) -> str:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, str):
                cells.append(cell)
            elif isinstance(cell, (int, bool)) and not isinstance(cell, float):
                cells.append(str(int(cell)))
            else:
                cells.append(fmt_real(cell))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def write_text(path: str | Path | None, text: str) -> None:
    if path is None:
        print(text, end="")
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def _json_default(o):
    # numpy scalars leak into manifests from vectorized arithmetic
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def render_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


# ---------------------------------------------------------------------------
# mean-square reports
# ---------------------------------------------------------------------------

MEAN_SQUARE_HEADER = ["T", "I", "I_over_T", "zeta_sq_ref", "residual"]


def mean_square_rows(report: MeanSquareReport) -> list[list[float]]:
    rows = []
    for (T, I), c, r in zip(report.I_values, report.coefficient_estimates,
                            report.residuals):
        rows.append([T, I, c, report.zeta_sq_ref, r])
    return rows


def _finite_or_none(x: float):
    return float(x) if math.isfinite(x) else None


def mean_square_sidecar(report: MeanSquareReport) -> dict:
    reg = report.regime
    return {
        "regime": {
            "theorem": reg.theorem,
            "error_exponent": _finite_or_none(reg.error_exponent),
            "log_power": reg.log_power,
            "log_inside_sqrt": reg.log_inside_sqrt,
            "target": reg.target,
            "margins": {k: float(v) for k, v in sorted(reg.margins.items())},
            "alternates": list(reg.alternates),
        },
        "zeta_sq_ref": report.zeta_sq_ref,
        "ref_error_bound": float(report.ref_error_bound),
        "fitted_exponent": _finite_or_none(report.fitted_exponent),
        "fitted_exponent_stderr": _finite_or_none(report.fitted_exponent_stderr),
        "dropped_samples": report.dropped_samples,
        "manifest": report.run_manifest,
    }


def parse_mean_square_csv(text: str) -> list[dict[str, float]]:
    """Re-parse a mean-square CSV into row dicts (round-trip check)."""
    lines = [ln for ln in text.splitlines() if ln]
    header = lines[0].split(",")
    out = []
    for ln in lines[1:]:
        out.append({k: float(v) for k, v in zip(header, ln.split(","))})
    return out
