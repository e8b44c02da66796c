"""Eigenvalue-simplex sweeps: classify a (lambda1, lambda2) grid at fixed lambda4.

Each grid point gets an LP verdict and a region class. Records come back in
row-major order (lambda1, then lambda2) whatever the worker count, so the CSV
is byte-identical across runs.
"""

from __future__ import annotations

import csv
import io
import math
import os
import xml.etree.ElementTree as ET
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from memsconv import nelp, regions
from memsconv.regions import Region

CSV_COLUMNS = ("lambda1", "lambda2", "lambda3", "lambda4", "class", "detail", "lp_status", "marginal", "cuts")
ORDER_TOL = 1e-12

DEFAULT_PALETTE = {
    Region.GREEN.value: "#2ca02c",
    Region.BLUE.value: "#1f77b4",
    Region.ORANGE.value: "#ff7f0e",
    Region.BLACK.value: "#000000",
    Region.ALL_SEPARABLE.value: "#d9d9d9",
    Region.TARGET_SEPARABLE.value: "#969696",
}

FAST_STEP = 0.02


@dataclass
class SweepConfig:
    lambda4: float = 0.0
    step: float = 0.005
    a_grid_size: int = nelp.DEFAULT_GRID_SIZE
    feas_tol: float = nelp.FEAS_TOL
    region_tol: float = regions.TOL
    workers: int | None = None
    csv_path: str | None = None
    svg_path: str | None = None
    palette: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.lambda4 <= 0.25:
            raise ValueError(f"lambda4 must lie in [0, 1/4], got {self.lambda4}")
        if not 1e-4 <= self.step <= 0.1:
            raise ValueError(f"step must lie in [1e-4, 0.1], got {self.step}")
        if self.a_grid_size < 3 or self.a_grid_size % 2 == 0:
            raise ValueError("a_grid_size must be odd and >= 3 so the grid holds 0, 1/2, 1")
        unknown = set(self.palette) - set(DEFAULT_PALETTE)
        if unknown:
            raise ValueError(f"unknown palette classes: {sorted(unknown)}")


def _sig9(x: float) -> float:
    return float(f"{x:.9g}")


@dataclass(frozen=True)
class SweepRecord:
    lambda1: float
    lambda2: float
    lambda3: float
    lambda4: float
    cls: str
    detail: str | None
    lp_status: str
    marginal: bool
    cuts: int

    @property
    def spectrum(self) -> tuple[float, float, float, float]:
        return self.lambda1, self.lambda2, self.lambda3, self.lambda4

    def check(self) -> None:
        l1, l2, l3, l4 = self.spectrum
        if not (l1 >= l2 >= l3 >= l4 >= 0):
            raise ValueError(f"record out of order: {self.spectrum}")
        if abs(l1 + l2 + l3 + l4 - 1) > 1e-9:
            raise ValueError(f"record does not sum to 1: {self.spectrum}")


def grid_points(cfg: SweepConfig) -> list[tuple[float, float, float, float]]:
    """Ordered spectra on the grid lambda1 = i*step, lambda2 = j*step; nothing is clamped."""
    l4 = cfg.lambda4
    pts = []
    for i in range(math.ceil(0.25 / cfg.step) - 1, math.floor(1 / cfg.step) + 2):
        l1 = round(i * cfg.step, 12)
        if not 0 <= l1 <= 1:
            continue
        for j in range(0, i + 1):
            l2 = round(j * cfg.step, 12)
            l3 = round(1 - l1 - l2 - l4, 12)
            if l3 < -ORDER_TOL:
                continue
            if l1 + ORDER_TOL < l2 or l2 + ORDER_TOL < l3 or l3 + ORDER_TOL < l4:
                continue
            # inside ORDER_TOL the ties are exact in exact arithmetic; snap the rounding residue
            pts.append((l1, l2, min(max(l3, l4, 0.0), l2), l4))
    return pts


def evaluate_point(s: tuple[float, ...], cfg: SweepConfig) -> SweepRecord:
    v = nelp.feasible_for_spectrum(s, cfg.a_grid_size, feas_tol=cfg.feas_tol)
    c = regions.classify(s, v, cfg.region_tol)
    return SweepRecord(
        *(_sig9(x) for x in s),
        cls=c.tag.value,
        detail=c.detail,
        lp_status=v.status,
        marginal=bool(v.marginal),
        cuts=len(v.cuts),
    )


def _evaluate_star(args) -> SweepRecord:
    return evaluate_point(*args)


def sweep(cfg: SweepConfig) -> list[SweepRecord]:
    pts = grid_points(cfg)
    if not pts:
        raise ValueError("the sweep configuration admits no ordered grid point")
    workers = cfg.workers or os.cpu_count() or 1
    jobs = [(p, cfg) for p in pts]
    if workers == 1:
        records = [_evaluate_star(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            records = list(ex.map(_evaluate_star, jobs, chunksize=max(1, len(jobs) // (8 * workers))))
    if cfg.csv_path:
        write_csv(records, cfg.csv_path)
    if cfg.svg_path:
        with open(cfg.svg_path, "w") as fh:
            fh.write(render_svg(records, {**DEFAULT_PALETTE, **cfg.palette}, lambda4=cfg.lambda4))
    return records


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([
            f"{r.lambda1:.9g}", f"{r.lambda2:.9g}", f"{r.lambda3:.9g}", f"{r.lambda4:.9g}",
            r.cls, r.detail or "", r.lp_status, "true" if r.marginal else "false", r.cuts,
        ])
    return buf.getvalue()


def records_from_csv(text: str) -> list[SweepRecord]:
    rows = csv.reader(io.StringIO(text))
    header = next(rows, None)
    if header is None or tuple(header) != CSV_COLUMNS:
        raise ValueError(f"bad CSV header: {header}")
    out = []
    for row in rows:
        if not row:
            continue
        l1, l2, l3, l4, cls, detail, status, marginal, cuts = row
        out.append(SweepRecord(
            float(l1), float(l2), float(l3), float(l4), Region(cls).value, detail or None,
            status, {"true": True, "false": False}[marginal], int(cuts),
        ))
    return out


def write_csv(records, path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(records_to_csv(records))


def read_csv(path: str) -> list[SweepRecord]:
    with open(path) as fh:
        return records_from_csv(fh.read())


def _pitch(values: list[float]) -> float:
    xs = sorted(set(values))
    gaps = [b - a for a, b in zip(xs, xs[1:]) if b - a > 1e-9]
    return min(gaps) if gaps else 0.01


def render_svg(records, palette: dict[str, str] | None = None, lambda4: float | None = None,
               size: int = 480) -> str:
    """Standalone SVG: one cell per record in the (lambda1, lambda2) plane, plus a legend."""
    records = list(records)
    if not records:
        raise ValueError("nothing to render")
    pal = {**DEFAULT_PALETTE, **(palette or {})}
    h = min(_pitch([r.lambda1 for r in records]), _pitch([r.lambda2 for r in records]))
    x0 = min(r.lambda1 for r in records) - h / 2
    x1 = max(r.lambda1 for r in records) + h / 2
    y0 = min(r.lambda2 for r in records) - h / 2
    y1 = max(r.lambda2 for r in records) + h / 2
    scale = size / max(x1 - x0, y1 - y0)
    margin, legend_w = 50, 190
    width = margin * 2 + (x1 - x0) * scale + legend_w
    height = margin * 2 + (y1 - y0) * scale

    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", version="1.1",
                     width=f"{width:.0f}", height=f"{height:.0f}")
    title = "LP feasibility" + (f", lambda4 = {lambda4:g}" if lambda4 is not None else "")
    ET.SubElement(svg, "text", x=str(margin), y="25", attrib={"font-size": "14"}).text = title
    cells = ET.SubElement(svg, "g", id="cells")
    side = h * scale
    for r in records:
        px = margin + (r.lambda1 - h / 2 - x0) * scale
        py = margin + (y1 - r.lambda2 - h / 2) * scale  # lambda2 grows upwards
        ET.SubElement(cells, "rect", x=f"{px:.3f}", y=f"{py:.3f}", width=f"{side:.3f}",
                      height=f"{side:.3f}", fill=pal[r.cls])
    axes = ET.SubElement(svg, "g", id="axes", attrib={"font-size": "12"})
    bottom = margin + (y1 - y0) * scale
    ET.SubElement(axes, "text", x=f"{margin + (x1 - x0) * scale / 2:.1f}", y=f"{bottom + 30:.1f}").text = "lambda1"
    ET.SubElement(axes, "text", x="5", y=f"{margin + (y1 - y0) * scale / 2:.1f}").text = "lambda2"
    for val, anchor_x, anchor_y in ((x0 + h / 2, True, False), (x1 - h / 2, True, False),
                                    (y0 + h / 2, False, True), (y1 - h / 2, False, True)):
        if anchor_x:
            ET.SubElement(axes, "text", x=f"{margin + (val - x0) * scale:.1f}", y=f"{bottom + 15:.1f}").text = f"{val:.3g}"
        else:
            ET.SubElement(axes, "text", x=f"{margin - 40:.1f}", y=f"{margin + (y1 - val) * scale:.1f}").text = f"{val:.3g}"
    legend = ET.SubElement(svg, "g", id="legend", attrib={"font-size": "12"})
    lx = margin * 1.5 + (x1 - x0) * scale
    for k, (name, colour) in enumerate(pal.items()):
        y = margin + 22 * k
        ET.SubElement(legend, "rect", x=f"{lx:.1f}", y=f"{y}", width="14", height="14",
                      fill=colour, stroke="#444444")
        ET.SubElement(legend, "text", x=f"{lx + 20:.1f}", y=f"{y + 12}").text = name
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(svg, encoding="unicode") + "\n"


@dataclass
class ValidationReport:
    counts: dict[str, int]
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def text(self) -> str:
        lines = [f"{k}: {n}" for k, n in sorted(self.counts.items())]
        lines.append(f"violations: {len(self.violations)}")
        lines.extend(f"  {v}" for v in self.violations)
        return "\n".join(lines)


def cross_validate(records) -> ValidationReport:
    """Check the analytic classes against the LP column of a sweep."""
    counts: dict[str, int] = {r.value: 0 for r in Region}
    bad = []
    for r in records:
        counts[r.cls] = counts.get(r.cls, 0) + 1
        where = f"({r.lambda1:.9g}, {r.lambda2:.9g}, {r.lambda3:.9g}, {r.lambda4:.9g})"
        try:
            r.check()
        except ValueError as exc:
            bad.append(f"{where}: {exc}")
        if r.cls == Region.GREEN.value and r.lp_status != "feasible":
            bad.append(f"{where}: GreenFeasible but LP {r.lp_status}")
        if r.cls == Region.BLACK.value and r.lp_status != "infeasible":
            bad.append(f"{where}: BlackInfeasible({r.detail}) outside the LP-infeasible set")
        if r.cls == Region.ORANGE.value and r.lp_status != "infeasible":
            bad.append(f"{where}: OrangeInfeasible but LP {r.lp_status}")
        if r.cls == Region.BLUE.value and r.lp_status != "feasible":
            bad.append(f"{where}: BlueFeasible but LP {r.lp_status}")
    return ValidationReport(counts, bad)
