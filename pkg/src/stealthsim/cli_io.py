"""JSON configs, run manifests, ROC CSV files and SVG ROC plots."""
from __future__ import annotations

import csv
import io
import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .detection import RocCurve
from .scenario import CampaignResult, ConfigValidationError, ScenarioConfig, config_fields


class ConfigNotFoundError(FileNotFoundError):
    pass


class ConfigParseError(ValueError):
    pass


# -- config ---------------------------------------------------------------------

def config_from_dict(d: dict) -> ScenarioConfig:
    if not isinstance(d, dict):
        raise ConfigValidationError("<root>", "config must be a JSON object")
    known = set(config_fields())
    for key in d:
        if key not in known:
            raise ConfigValidationError(key, "unknown configuration key")
    kw = dict(d)
    for key in ("ue_position", "eve_position"):
        if isinstance(kw.get(key), list):
            kw[key] = tuple(kw[key])
    if "detectors" in kw:
        det = kw["detectors"]
        if isinstance(det, str) or not isinstance(det, (list, tuple)):
            raise ConfigValidationError("detectors", "must be a list")
        kw["detectors"] = tuple(det)
    try:
        return ScenarioConfig(**kw)
    except TypeError as exc:
        raise ConfigValidationError("<root>", str(exc)) from None


def config_to_dict(cfg: ScenarioConfig) -> dict:
    return cfg.to_dict()


def parse_config(path) -> ScenarioConfig:
    """Read a JSON config; absent keys take the default scenario values."""
    p = Path(path)
    if not p.is_file():
        raise ConfigNotFoundError(f"config file not found: {p}")
    try:
        d = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"{p}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return config_from_dict(d)


def write_config(cfg: ScenarioConfig, path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(cfg), indent=2, sort_keys=True) + "\n")


# -- manifest -------------------------------------------------------------------

@dataclass
class RunManifest:
    config: dict
    seed: int
    version: str = __version__
    started: str = ""
    finished: str = ""
    outputs: dict[str, str] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        return cls(**json.loads(text))

    def write(self, path) -> None:
        Path(path).write_text(self.to_json())

    def scenario(self) -> ScenarioConfig:
        return config_from_dict(self.config)


# -- ROC CSV ------------------------------------------------------------------------

CSV_HEADER = ("mode", "detector", "observer", "antennas", "pfa", "pd", "n_h0", "n_h1")


def roc_records(results) -> list[tuple[str, str, str, int, RocCurve]]:
    """Flatten campaign results into (mode, detector, observer, antennas, curve).

    Accepts a CampaignResult, a list of them, or a mapping
    ``{(mode, detector, observer, antennas): RocCurve}``.
    """
    if isinstance(results, CampaignResult):
        results = [results]
    out = []
    if isinstance(results, dict):
        for (mode, det, obs, ant), curve in results.items():
            out.append((mode, det, obs, int(ant), curve))
    else:
        for res in results:
            for (obs, det, mode), curve in res.curves.items():
                out.append((mode, det, obs, res.antennas, curve))
    return out


def _fmt(v) -> str:
    return format(float(v), ".6g")


def emit_roc_csv(results, path) -> Path:
    """One row per ROC point, sorted by (mode, detector, observer, antennas, pfa, pd)."""
    recs = roc_records(results)
    if not recs:
        raise ValueError("no ROC curves to write")
    rows = []
    for mode, det, obs, ant, c in recs:
        for pfa, pd in zip(c.pfa, c.pd):
            rows.append((mode, det, obs, ant, float(pfa), float(pd), c.n_h0, c.n_h1))
    rows.sort()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for mode, det, obs, ant, pfa, pd, n0, n1 in rows:
        w.writerow((mode, det, obs, ant, _fmt(pfa), _fmt(pd), n0, n1))
    path = Path(path)
    path.write_bytes(buf.getvalue().encode())
    return path


def read_roc_csv(path) -> dict[tuple[str, str, str, int], RocCurve]:
    groups: dict = {}
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        for row in reader:
            key = (row["mode"], row["detector"], row["observer"], int(row["antennas"]))
            groups.setdefault(key, []).append(
                (float(row["pfa"]), float(row["pd"]), int(row["n_h0"]), int(row["n_h1"])))
    out = {}
    for key, pts in groups.items():
        a = np.array(pts)
        out[key] = RocCurve(pfa=a[:, 0], pd=a[:, 1], n_h0=int(a[0, 2]), n_h1=int(a[0, 3]))
    return out


# -- SVG plot ---------------------------------------------------------------------

_W, _H = 480, 400
_LEFT, _RIGHT, _TOP, _BOTTOM = 60, 170, 20, 50
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")
_DASH = {"baseline": None, "csi": "6,3"}


def plot_coords(pfa, pd) -> tuple[np.ndarray, np.ndarray]:
    """Map ROC coordinates in [0, 1]^2 to SVG user units."""
    w = _W - _LEFT - _RIGHT
    h = _H - _TOP - _BOTTOM
    return _LEFT + np.asarray(pfa) * w, _TOP + (1 - np.asarray(pd)) * h


def emit_plot(results, path, title: str = "ROC") -> Path:
    """Self-contained SVG with one polyline and legend entry per curve."""
    recs = roc_records(results)
    if not recs:
        raise ValueError("no ROC curves to plot")
    recs.sort(key=lambda r: r[:4])
    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=str(_W), height=str(_H),
                     viewBox=f"0 0 {_W} {_H}")
    ET.SubElement(svg, "rect", x="0", y="0", width=str(_W), height=str(_H), fill="white")
    x0, y1 = plot_coords(0, 0)
    x1, y0 = plot_coords(1, 1)
    axes = ET.SubElement(svg, "g", {"class": "axes", "stroke": "black", "fill": "none"})
    ET.SubElement(axes, "rect", x=f"{x0:.2f}", y=f"{y0:.2f}", width=f"{x1 - x0:.2f}", height=f"{y1 - y0:.2f}")
    text = {"font-family": "sans-serif", "font-size": "11"}
    for v in np.linspace(0, 1, 6):
        tx, ty = plot_coords(v, v)
        ET.SubElement(axes, "line", x1=f"{tx:.2f}", y1=f"{y1:.2f}", x2=f"{tx:.2f}", y2=f"{y1 + 4:.2f}")
        ET.SubElement(axes, "line", x1=f"{x0 - 4:.2f}", y1=f"{ty:.2f}", x2=f"{x0:.2f}", y2=f"{ty:.2f}")
        ET.SubElement(svg, "text", x=f"{tx:.2f}", y=f"{y1 + 16:.2f}", **{"text-anchor": "middle"}, **text).text = f"{v:.1f}"
        ET.SubElement(svg, "text", x=f"{x0 - 7:.2f}", y=f"{ty + 4:.2f}", **{"text-anchor": "end"}, **text).text = f"{v:.1f}"
    ET.SubElement(svg, "text", x=f"{(x0 + x1) / 2:.2f}", y=f"{_H - 12}", **{"text-anchor": "middle"}, **text).text = "PFA"
    ET.SubElement(svg, "text", x="16", y=f"{(y0 + y1) / 2:.2f}", transform=f"rotate(-90 16 {(y0 + y1) / 2:.2f})",
                  **{"text-anchor": "middle"}, **text).text = "PD"
    ET.SubElement(svg, "text", x=f"{(x0 + x1) / 2:.2f}", y="14", **{"text-anchor": "middle"}, **text).text = title

    curves = ET.SubElement(svg, "g", {"class": "curves"})
    legend = ET.SubElement(svg, "g", {"class": "legend"})
    for i, (mode, det, obs, ant, c) in enumerate(recs):
        label = f"{obs} {det} {mode} M={ant}"
        px, py = plot_coords(c.pfa, c.pd)
        attrs = {"class": "roc", "fill": "none", "stroke": _COLORS[i % len(_COLORS)], "stroke-width": "1.5",
                 "points": " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))}
        if _DASH.get(mode):
            attrs["stroke-dasharray"] = _DASH[mode]
        line = ET.SubElement(curves, "polyline", attrs)
        ET.SubElement(line, "title").text = label
        ly = _TOP + 10 + 16 * i
        entry = ET.SubElement(legend, "g", {"class": "legend-entry"})
        seg = {"x1": f"{x1 + 10:.2f}", "y1": f"{ly:.2f}", "x2": f"{x1 + 30:.2f}", "y2": f"{ly:.2f}",
               "stroke": attrs["stroke"], "stroke-width": "1.5"}
        if "stroke-dasharray" in attrs:
            seg["stroke-dasharray"] = attrs["stroke-dasharray"]
        ET.SubElement(entry, "line", seg)
        ET.SubElement(entry, "text", x=f"{x1 + 34:.2f}", y=f"{ly + 4:.2f}", **text).text = label
    path = Path(path)
    ET.ElementTree(svg).write(path, encoding="utf-8", xml_declaration=True)
    return path
