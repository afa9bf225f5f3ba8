"""Structured command reports and the text / JSON / LaTeX emitters.

The JSON layout is stable and versioned (see schema/report-v1.json); text
output is the canonical pretty-print, and LaTeX renders expressions in
journal notation.
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass, field

from ..expr.expression import Expr
from .printer import expr_latex, expr_text

__all__ = ["SCHEMA_VERSION", "Report", "emit"]

SCHEMA_VERSION = 1


@dataclass
class Report:
    command: str
    status: str                      # 'zero' | 'nonzero' | 'error'
    detail: str = ""
    residuals: list[tuple[str, Expr]] = field(default_factory=list)
    vectors: dict[str, dict[str, Expr]] = field(default_factory=dict)
    identity: "dict | None" = None   # {'terms': [(eq, deriv, Expr)], 'remainder': Expr}
    side_conditions: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return {"zero": 0, "nonzero": 1}.get(self.status, 2)

    # -- json ----------------------------------------------------------------

    def to_dict(self) -> dict:
        doc: dict = {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "status": self.status,
            "residuals": [
                {"name": n, "expr": expr_text(e), "latex": expr_latex(e)}
                for n, e in self.residuals
            ],
            "vectors": {
                comp: {k: expr_text(v) for k, v in parts.items()}
                for comp, parts in self.vectors.items()
            },
            "identity": None,
            "side_conditions": list(self.side_conditions),
        }
        if self.identity is not None:
            doc["identity"] = {
                "terms": [
                    {"equation": eq, "derivative": deriv,
                     "coefficient": expr_text(c)}
                    for eq, deriv, c in self.identity["terms"]
                ],
                "remainder": expr_text(self.identity["remainder"]),
            }
        if self.detail:
            doc["detail"] = self.detail
        if self.extra:
            doc["extra"] = self.extra
        return doc


def _color_enabled() -> bool:
    env = os.environ.get("CONSLAW_COLOR")
    if env == "1":
        return True
    if env == "0":
        return False
    return sys.stdout.isatty()


def _paint(text: str, code: str) -> str:
    if _color_enabled():
        return f"\x1b[{code}m{text}\x1b[0m"
    return text


def _render_text(rep: Report) -> str:
    lines = [f"command: {rep.command}"]
    status = rep.status
    color = {"zero": "32", "nonzero": "31", "error": "33"}[status]
    lines.append(f"status: {_paint(status, color)}")
    if rep.detail:
        lines.append(f"detail: {rep.detail}")
    for name, e in rep.residuals:
        lines.append(f"residual[{name}]: {expr_text(e)}")
    for comp, parts in rep.vectors.items():
        for kind, e in parts.items():
            tag = f"C[{comp}]" if kind == "reduced" else f"C[{comp}].{kind}"
            lines.append(f"{tag}: {expr_text(e)}")
    if rep.identity is not None:
        lines.append("identity: div(C) ="
                     + ("" if rep.identity["terms"] else " 0 (on solutions)"))
        for eq, deriv, c in rep.identity["terms"]:
            dtag = f"D[{deriv}]" if deriv else ""
            lines.append(f"  + ({expr_text(c)}) * {dtag}{eq}")
        rem = rep.identity["remainder"]
        lines.append(f"  + remainder: {expr_text(rem)}")
    for cond in rep.side_conditions:
        lines.append(f"side condition (assumed nonzero): {cond}")
    for key in sorted(rep.extra):
        val = rep.extra[key]
        if isinstance(val, list):
            for item in val:
                lines.append(f"{key}: {item}")
        else:
            lines.append(f"{key}: {val}")
    return "\n".join(lines) + "\n"


def _render_latex(rep: Report) -> str:
    lines = [f"% command: {rep.command}", f"% status: {rep.status}"]
    for name, e in rep.residuals:
        lines.append(f"\\mathrm{{residual}}[{name}] = {expr_latex(e)} \\\\")
    for comp, parts in rep.vectors.items():
        if "reduced" in parts:
            lines.append(f"C^{{{comp}}} = {expr_latex(parts['reduced'])} \\\\")
    if rep.identity is not None:
        rem = rep.identity["remainder"]
        pieces = [f"\\big({expr_latex(c)}\\big) D_{{{deriv}}} {eq}"
                  if deriv else f"\\big({expr_latex(c)}\\big) {eq}"
                  for eq, deriv, c in rep.identity["terms"]]
        rhs = " + ".join(pieces) if pieces else "0"
        if not rem.is_zero:
            rhs += f" + {expr_latex(rem)}"
        lines.append(f"D_i C^i = {rhs} \\\\")
    return "\n".join(lines) + "\n"


def emit(rep: Report, fmt: str = "text") -> str:
    """Render a report; JSON output is deterministic byte-for-byte."""
    if fmt == "json":
        return json.dumps(rep.to_dict(), sort_keys=True, indent=2,
                          ensure_ascii=False) + "\n"
    if fmt == "latex":
        return _render_latex(rep)
    if fmt == "text":
        return _render_text(rep)
    raise ValueError(f"unknown format {fmt!r}")
