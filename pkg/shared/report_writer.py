"""
Report writers for CSV, JSON and SVG outputs

Every CSV starts with a "# schema_version=N kind=..." line and every JSON
document carries "schema_version" and "kind" keys, so files re-parse under the
documented schema.
"""

import csv
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Circle, Polygon  # noqa: E402

import numpy as np  # noqa: E402

from shared.errors import ConfigError  # noqa: E402

SCHEMA_VERSION = 1

# Fixed salt and no timestamp keep SVG bytes identical across runs
_SVG_HASHSALT = "arith-density"


def write_csv_report(path, kind: str, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write rows under a schema header; values are written as given"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# schema_version={SCHEMA_VERSION} kind={kind}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(list(columns))
        for row in rows:
            writer.writerow(list(row))
    return path


def read_csv_report(path) -> Tuple[Dict[str, str], List[Dict[str, str]]]:
    """
    Parse a CSV written by write_csv_report.

    Returns:
        (header metadata, list of row dicts keyed by column)
    """
    with open(path, "r", encoding="utf-8", newline="") as f:
        first = f.readline().strip()
        if not first.startswith("#"):
            raise ConfigError(f"{path} has no schema header")
        meta = dict(item.split("=", 1) for item in first[1:].split())
        if int(meta.get("schema_version", -1)) != SCHEMA_VERSION:
            raise ConfigError(f"{path} has unsupported schema {meta.get('schema_version')}")
        rows = list(csv.DictReader(f))
    return meta, rows


def write_json_report(path, kind: str, payload: Dict[str, Any]) -> Path:
    """Write a JSON document stamped with schema_version and kind"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {"schema_version": SCHEMA_VERSION, "kind": kind}
    document.update(payload)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(document, f, indent=2, ensure_ascii=False)
        f.write("\n")
    return path


def read_json_report(path) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        document = json.load(f)
    if document.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"{path} has unsupported schema {document.get('schema_version')}")
    return document


def _save_svg(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context({"svg.hashsalt": _SVG_HASHSALT, "svg.fonttype": "none"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_density_curve(radii: Sequence[float], density_lb: Sequence[float], errors: Sequence[float], path) -> Path:
    """Line plot of the density lower bound against log10 r"""
    fig, ax = plt.subplots(figsize=(6, 4))
    x = np.log10(np.asarray(radii, dtype=float))
    y = np.asarray(density_lb, dtype=float)
    ax.errorbar(x, y, yerr=np.asarray(errors, dtype=float), marker="o", capsize=3, color="#1f77b4")
    ax.set_xlabel("log10 r")
    ax.set_ylabel("density lower bound")
    ax.set_ylim(min(0.0, float(y.min()) - 0.05) if len(y) else 0.0, 1.05)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return _save_svg(fig, path)


def plot_band_picture(
    center: Sequence[float],
    radius: float,
    bands: Sequence[Tuple[Sequence[int], float]],
    path,
    title: str = "",
) -> Path:
    """
    Draw the disc B(center, radius) together with the strips
    {beta : |(beta, i)| < w} of the given (i, w) bands (plane only).
    """
    c = np.asarray(center, dtype=float)
    if c.shape != (2,):
        raise ConfigError("Band pictures are drawn in the plane only (n = 2)")

    fig, ax = plt.subplots(figsize=(5, 5))
    span = 1.6 * radius
    for i, width in bands:
        normal = np.asarray(i, dtype=float)
        norm = float(np.linalg.norm(normal))
        u = normal / norm
        v = np.array([-u[1], u[0]])
        base = c - (float(c @ normal) / norm ** 2) * normal
        offset = (float(width) / norm) * u
        length = 4.0 * span
        corners = [base + offset + length * v, base + offset - length * v,
                   base - offset - length * v, base - offset + length * v]
        ax.add_patch(Polygon(corners, closed=True, alpha=0.35, color="#d62728", linewidth=0))
    ax.add_patch(Circle(tuple(c), radius, fill=False, color="black", linewidth=1.2))
    ax.plot([c[0]], [c[1]], marker="+", color="black")
    ax.set_xlim(c[0] - span, c[0] + span)
    ax.set_ylim(c[1] - span, c[1] + span)
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save_svg(fig, path)
