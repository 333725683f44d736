"""
Gnuplot-compatible plot-script emission.  Every script is self-contained:
data rides along in inline heredoc blocks, so an empty report still yields
a syntactically valid script with empty stanzas.
"""

from __future__ import annotations

from pathlib import Path


def _data_block(name, rows):
    lines = [f"${name} << EOD"]
    lines += [" ".join(f"{v:.12g}" if isinstance(v, float) else str(v) for v in row) for row in rows]
    lines.append("EOD")
    return "\n".join(lines)


def emit_loglog_errors(report: dict, path):
    """log-log error-vs-epsilon curves, one per ladder metric."""
    eps = report.get("epsilons", [])
    metrics = ("xs_error", "rho_error", "current_error", "eps_term_norm")
    rungs = report.get("rungs", [])
    blocks, plots = [], []
    for m in metrics:
        rows = [
            (float(e), float(r[m]))
            for e, r in zip(eps, rungs)
            if r.get(m) is not None and r.get(m, 0) > 0
        ]
        blocks.append(_data_block(m, rows))
        plots.append(f"${m} using 1:2 with linespoints title '{m}'")
    slopes = report.get("slopes", {})
    title = ", ".join(
        f"{k}:{v:.2f}" for k, v in slopes.items() if isinstance(v, float)
    )
    script = "\n".join(
        [
            "set logscale xy",
            "set xlabel 'epsilon'",
            "set ylabel 'sup-in-time error'",
            f"set title 'semiclassical convergence ({title})'",
            *blocks,
            "plot " + ", \\\n     ".join(plots),
        ]
    )
    Path(path).write_text(script + "\n", encoding="utf-8")
    return path


def emit_diagnostics_timeseries(records: list, path):
    """Diagnostics vs t: charge, monitor, residuals on a shared axis."""
    keys = ("charge", "monitor", "blowup_sum", "continuity_residual", "gauge_residual", "tail_fraction")
    blocks, plots = [], []
    for k in keys:
        rows = [
            (float(r["t"]), float(r[k]))
            for r in records
            if r.get(k) is not None
        ]
        blocks.append(_data_block(k, rows))
        plots.append(f"${k} using 1:2 with lines title '{k}'")
    script = "\n".join(
        [
            "set xlabel 't'",
            "set ylabel 'value'",
            "set title 'diagnostics'",
            *blocks,
            "plot " + ", \\\n     ".join(plots),
        ]
    )
    Path(path).write_text(script + "\n", encoding="utf-8")
    return path


def emit_wigner_heat(slice_doc: dict, path):
    """
    Heat data for one-dimensional Wigner slices: x-index, xi, f triples
    per base point, plus per-epsilon defect bars when present.
    """
    blocks, plots = [], []
    points = slice_doc.get("base_points", [])
    values = slice_doc.get("values", [])
    xi = slice_doc.get("xi", [])
    for p, idx in enumerate(points):
        rows = []
        if p < len(values) and xi:
            rows = [(float(x), float(f)) for x, f in zip(xi, values[p])]
        name = f"slice_{p}"
        blocks.append(_data_block(name, rows))
        plots.append(f"${name} using 1:2 with lines title 'x-index {idx}'")
    defects = slice_doc.get("defects") or []
    epsilons = slice_doc.get("epsilons") or []
    rows = [
        (float(e), float(d)) for e, d in zip(epsilons, defects) if d is not None
    ]
    blocks.append(_data_block("defects", rows))
    if rows:
        plots.append("$defects using 1:2 with boxes title 'defect(eps)'")
    script = "\n".join(
        [
            "set xlabel 'xi'",
            "set ylabel 'f'",
            "set title 'Wigner slices'",
            *blocks,
            "plot " + ", \\\n     ".join(plots) if plots else "plot 0 title ''",
        ]
    )
    Path(path).write_text(script + "\n", encoding="utf-8")
    return path
