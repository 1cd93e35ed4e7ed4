"""CSV/JSON readers and writers for labelings, models and node lists.

All writers emit ``\\n`` line endings and sorted JSON keys so identical
inputs give byte-identical files.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

__all__ = ["write_json", "read_json", "write_labels_csv", "read_labels_csv",
           "read_node_list", "write_cost_curve_csv", "model_record"]


def _default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_default)
        fh.write("\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_labels_csv(path, node_ids, groups) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node_id", "group"])
        for node, g in zip(node_ids, groups):
            w.writerow([node, int(g)])


def read_labels_csv(path) -> dict[str, int]:
    """``node_id -> group`` from a ``node_id,group`` CSV."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"node_id", "group"} <= set(reader.fieldnames):
            raise ValueError(f"{path}: expected header 'node_id,group'")
        out = {}
        for row in reader:
            node = row["node_id"].strip()
            if node in out:
                raise ValueError(f"{path}: node {node!r} listed twice")
            out[node] = int(row["group"])
        return out


def read_node_list(path) -> list[str]:
    """One node ID per line; an optional ``node_id`` header and '#' comments are skipped."""
    ids = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            tok = line.strip().split(",")[0].strip()
            if not tok or tok.startswith("#"):
                continue
            ids.append(tok)
    if ids and ids[0] == "node_id":
        ids = ids[1:]
    return ids


def write_cost_curve_csv(path, costs) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "cost"])
        for k, c in enumerate(costs, start=1):
            w.writerow([k, repr(float(c))])


def model_record(model, reference_ids, target_ids) -> dict:
    """JSON-ready description of a fitted model; IDs are external node IDs."""
    return {
        "k": model.k,
        "cost": model.cost,
        "group_sizes": model.group_sizes.tolist(),
        "labeling": {str(t): int(g) for t, g in zip(target_ids, model.labels)},
        "means": model.means.tolist(),
        "seed": model.seed,
        "config": model.config.to_dict(),
        "restarts_run": model.restarts_run,
        "iterations_used": model.iterations_used,
        "reference_ids": [str(r) for r in reference_ids],
        "target_ids": [str(t) for t in target_ids],
    }
