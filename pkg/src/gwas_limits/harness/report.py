"""Threshold summaries of sweep CSVs, plus a small self-contained SVG plot."""
from __future__ import annotations

import math
from collections import defaultdict
from xml.sax.saxutils import escape

CURVE_KEYS = ("decoder", "G", "L", "m", "q", "alpha", "tau", "epsilon")
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _curves(records):
    curves = defaultdict(list)
    for r in records:
        if r.get("status", "ok") != "ok":
            continue
        key = tuple(r[k] for k in CURVE_KEYS)
        curves[key].append(r)
    for pts in curves.values():
        pts.sort(key=lambda r: float(r["rate"]), reverse=True)
    return dict(sorted(curves.items()))


def non_increasing_within(p, se, sigmas=2.0) -> bool:
    """True if no later point exceeds an earlier one by more than the combined sigma band."""
    return all(p[j] <= p[i] + sigmas * math.hypot(se[i], se[j])
               for i in range(len(p)) for j in range(i + 1, len(p)))


def summarize(records) -> list[dict]:
    out = []
    for key, pts in _curves(records).items():
        p = [float(r["p_err"]) for r in pts]
        se = [float(r["stderr"]) for r in pts]
        cap = float(pts[0]["capacity"])
        out.append({
            **dict(zip(CURVE_KEYS, key)),
            "capacity": cap,
            "N": [int(r["N"]) for r in pts],
            "rate_over_capacity": [float(r["rate"]) / cap for r in pts],
            "p_err": p,
            "stderr": se,
            "drop": p[0] - p[-1],
            "monotone_2sigma": non_increasing_within(p, se),
            "flagged_m_over_N": [int(r["N"]) for r in pts if r.get("m_over_N_flag") == "1"],
        })
    return out


def format_summary(summary) -> str:
    lines = []
    for c in summary:
        lines.append(f"decoder={c['decoder']} q={c['q']} G={c['G']} L={c['L']} m={c['m']} alpha={c['alpha']} "
                     f"tau={float(c['tau']):.4g} eps={c['epsilon']} capacity={c['capacity']:.4f}")
        lines.append(f"  {'N':>6} {'R/C':>8} {'p_err':>8} {'+-2se':>8}")
        for n, rc, p, s in zip(c["N"], c["rate_over_capacity"], c["p_err"], c["stderr"]):
            lines.append(f"  {n:>6} {rc:>8.4f} {p:>8.4f} {2 * s:>8.4f}")
        lines.append(f"  drop smallest->largest N: {c['drop']:+.4f}; "
                     f"non-increasing within 2 sigma: {'yes' if c['monotone_2sigma'] else 'no'}")
        if c["flagged_m_over_N"]:
            lines.append(f"  m/N > 0.1 at N = {c['flagged_m_over_N']}")
    return "\n".join(lines)


def render_svg(summary, width: int = 640, height: int = 420) -> str:
    """p_err against R/C for each curve, with 2-sigma bars."""
    left, right, top, bottom = 60, 160, 20, 50
    pw, ph = width - left - right, height - top - bottom
    xs = [x for c in summary for x in c["rate_over_capacity"]] or [1.0]
    xmax = max(1.0, max(xs)) * 1.05

    def sx(x):
        return left + pw * x / xmax

    def sy(y):
        return top + ph * (1.0 - y)

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
             f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>']
    for k in range(6):
        y = k / 5
        parts.append(f'<text x="{left - 6}" y="{sy(y) + 4:.1f}" text-anchor="end">{y:.1f}</text>')
        x = xmax * k / 5
        parts.append(f'<text x="{sx(x):.1f}" y="{top + ph + 16}" text-anchor="middle">{x:.2f}</text>')
    parts.append(f'<line x1="{sx(1):.1f}" y1="{top}" x2="{sx(1):.1f}" y2="{top + ph}" '
                 f'stroke="#999" stroke-dasharray="4 3"/>')
    parts.append(f'<text x="{left + pw / 2}" y="{height - 12}" text-anchor="middle">rate / capacity</text>')
    parts.append(f'<text x="14" y="{top + ph / 2}" transform="rotate(-90 14 {top + ph / 2})" '
                 f'text-anchor="middle">error probability</text>')
    for i, c in enumerate(summary):
        color = PALETTE[i % len(PALETTE)]
        pts = list(zip(c["rate_over_capacity"], c["p_err"], c["stderr"]))
        path = " ".join(f"{sx(x):.1f},{sy(p):.1f}" for x, p, _ in pts)
        parts.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for x, p, s in pts:
            lo, hi = max(0.0, p - 2 * s), min(1.0, p + 2 * s)
            parts.append(f'<line x1="{sx(x):.1f}" y1="{sy(lo):.1f}" x2="{sx(x):.1f}" y2="{sy(hi):.1f}" stroke="{color}"/>')
            parts.append(f'<circle cx="{sx(x):.1f}" cy="{sy(p):.1f}" r="2.5" fill="{color}"/>')
        label = escape(f"{c['decoder']} tau={float(c['tau']):.3g}")
        ly = top + 14 * (i + 1)
        parts.append(f'<text x="{left + pw + 10}" y="{ly}" fill="{color}">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
