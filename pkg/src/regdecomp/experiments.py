"""End-to-end commands behind the CLI.

Each ``cmd_*`` function writes its result files into an output
directory and returns a :class:`RunRecord`. Result files are pure
functions of the arguments and seed; wall time goes only into
``run.json``.
"""
from __future__ import annotations

import csv
import logging
import math
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import theory
from .core import (RDConfig, classify_many, expand_partition,
                   misclassification_rate, regular_decomposition, select_k)
from .generators import (PlantedParams, SBMParams, planted_partition,
                         preferential_attachment, sbm)
from .graph import (Graph, distance_matrix, giant_component, read_edge_list,
                    write_edge_list)
from .io import (model_record, read_labels_csv, read_node_list,
                 write_cost_curve_csv, write_json, write_labels_csv)
from .sampling import (ReferenceSet, betweenness_references,
                       uniform_references)

logger = logging.getLogger(__name__)

__all__ = ["RunRecord", "BlockSummary", "child_seed", "cmd_generate",
           "cmd_decompose", "cmd_sweep_refs", "cmd_summarize", "cmd_theory",
           "block_summary", "parse_refs_spec", "parse_targets_spec"]


@dataclass
class RunRecord:
    command: str
    parameters: dict
    seed: int | None
    wall_time_seconds: float = 0.0
    outputs: list = field(default_factory=list)
    metrics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class BlockSummary:
    groups: list
    group_sizes: list
    density: list
    per_group_edges: list
    directed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def child_seed(seed: int, *tags: int) -> int:
    """Deterministic 63-bit seed for a named sub-task of a run."""
    state = np.random.SeedSequence([seed, *tags]).generate_state(1, np.uint64)[0]
    return int(state >> np.uint64(1))


def _finish(record: RunRecord, out: Path, started: float) -> RunRecord:
    record.wall_time_seconds = time.perf_counter() - started
    run_path = out / "run.json"
    record.outputs.append(str(run_path))
    write_json(run_path, record.to_dict())
    return record


def cmd_generate(model: str, params: dict, seed: int, out_dir) -> RunRecord:
    """Write ``graph.edgelist`` (and ``labels.csv`` for block models)."""
    started = time.perf_counter()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    record = RunRecord("generate", {"model": model, **params}, seed)
    labels = None
    if model == "planted":
        graph, labels = planted_partition(
            PlantedParams(int(params["n"]), float(params["a"]), float(params["b"])), seed)
    elif model == "sbm":
        graph, labels = sbm(SBMParams(tuple(params["sizes"]),
                                      np.asarray(params["probs"], dtype=float)), seed)
    elif model == "pa":
        graph = preferential_attachment(int(params["n"]),
                                        int(params.get("links", 3)), seed)
    else:
        raise ValueError(f"unknown model {model!r}; use planted, sbm or pa")
    if graph.edge_count == 0:
        logger.warning("generated graph has no edges")
    edge_path = out / "graph.edgelist"
    write_edge_list(graph, edge_path,
                    header=f"model={model} seed={seed} nodes={graph.node_count}")
    record.outputs.append(str(edge_path))
    if labels is not None:
        label_path = out / "labels.csv"
        write_labels_csv(label_path, graph.original_ids, labels)
        record.outputs.append(str(label_path))
    record.metrics = {"nodes": graph.node_count, "edges": graph.edge_count}
    return _finish(record, out, started)


def _lookup(graph: Graph, ids, what: str) -> np.ndarray:
    known = set(graph.original_ids)
    missing = [i for i in ids if str(i) not in known]
    if missing:
        raise ValueError(f"{what}: {len(missing)} node IDs not in the analysed "
                         f"component, e.g. {missing[:5]}")
    return np.array([graph.index_of(i) for i in ids], dtype=np.int64)


def parse_refs_spec(spec: str, graph: Graph, seed: int) -> ReferenceSet:
    """``all`` | ``uniform:<m>`` | ``betweenness:<pairs>,<m>`` | ``file:<path>``."""
    kind, _, arg = spec.partition(":")
    if kind == "all":
        return ReferenceSet(np.arange(graph.node_count), "all")
    if kind == "file":
        return ReferenceSet(_lookup(graph, read_node_list(arg), "refs file"), "file")
    try:
        nums = [int(x) for x in arg.split(",")]
    except ValueError:
        nums = []
    if kind == "uniform" and len(nums) == 1:
        return uniform_references(graph, nums[0], seed)
    if kind == "betweenness" and len(nums) == 2:
        return betweenness_references(graph, nums[0], nums[1], seed)
    raise ValueError(f"invalid refs spec {spec!r}; expected all, uniform:<m>, "
                     "betweenness:<pairs>,<m> or file:<path>")


def parse_targets_spec(spec: str, graph: Graph, seed: int) -> np.ndarray:
    """``all`` | ``sample:<n>`` | ``file:<path>``; returns sorted or file order."""
    kind, _, arg = spec.partition(":")
    if kind == "all":
        return np.arange(graph.node_count)
    if kind == "sample":
        try:
            size = int(arg)
        except ValueError:
            raise ValueError(f"invalid targets spec {spec!r}") from None
        if not 1 <= size <= graph.node_count:
            raise ValueError(f"sample size must be in [1, {graph.node_count}]")
        rng = np.random.default_rng(seed)
        return np.sort(rng.choice(graph.node_count, size=size, replace=False))
    if kind == "file":
        return _lookup(graph, read_node_list(arg), "targets file")
    raise ValueError(f"invalid targets spec {spec!r}; expected all, "
                     "sample:<n> or file:<path>")


def _truth_vector(graph: Graph, truth: dict) -> np.ndarray:
    z = np.full(graph.node_count, -1, dtype=np.int64)
    for i, node in enumerate(graph.original_ids):
        if node in truth:
            z[i] = truth[node]
    return z


def cmd_decompose(graph_path, out_dir, *, k: int | None = 2,
                  k_max: int | None = None, refs: str = "all",
                  targets: str = "all", config: RDConfig | None = None,
                  seed: int = 0, directed: bool = False, expand: bool = False,
                  classify_rest: bool = True, tau: float = 0.02,
                  truth_path=None, n_jobs: int | None = None) -> RunRecord:
    """Fit a regular decomposition on the giant component of a graph file.

    Writes ``labels.csv``, ``model.json``, ``references.csv`` /
    ``references.json`` and, with ``k_max``, ``cost_curve.csv``.
    """
    started = time.perf_counter()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config = config or RDConfig()
    params = {"graph": str(graph_path), "k": k, "k_max": k_max, "refs": refs,
              "targets": targets, "config": config.to_dict(), "directed": directed,
              "expand": expand, "classify_rest": classify_rest, "tau": tau}
    record = RunRecord("decompose", params, seed)

    graph = read_edge_list(graph_path, directed=directed)
    comp, kept = giant_component(graph, "strong" if directed else "weak")
    logger.info("giant component: %d of %d nodes", comp.node_count, graph.node_count)
    ref_set = parse_refs_spec(refs, comp, child_seed(seed, 1))
    target_idx = parse_targets_spec(targets, comp, child_seed(seed, 2))
    columns = None if classify_rest else target_idx
    dist = distance_matrix(comp, ref_set.nodes, columns).entries
    D = dist[:, target_idx] if classify_rest else dist

    rd_seed = child_seed(seed, 3)
    if k_max is not None:
        knee = select_k(D, k_max, config, rd_seed, tau=tau, n_jobs=n_jobs)
        model = knee.models[knee.k_star - 1]
        curve_path = out / "cost_curve.csv"
        write_cost_curve_csv(curve_path, knee.costs)
        record.outputs.append(str(curve_path))
        record.metrics.update(k_star=knee.k_star, monotone=knee.monotone)
    else:
        if k is None:
            raise ValueError("give either k or k_max")
        model = regular_decomposition(D, replace(config, k=k),
                                      rd_seed, n_jobs=n_jobs)

    comp_labels = np.full(comp.node_count, -1, dtype=np.int64)
    comp_labels[target_idx] = model.labels
    if classify_rest:
        rest = np.flatnonzero(comp_labels < 0)
        if rest.size:
            comp_labels[rest] = classify_many(dist[:, rest].T, model.means)
    labels = np.full(graph.node_count, -1, dtype=np.int64)
    labels[kept] = comp_labels
    if expand:
        labels = expand_partition(graph, labels)

    ids = graph.original_ids
    labeled = np.flatnonzero(labels >= 0)
    label_path = out / "labels.csv"
    write_labels_csv(label_path, [ids[i] for i in labeled], labels[labeled])
    comp_ids = comp.original_ids
    model_path = out / "model.json"
    write_json(model_path, {**model_record(model, [comp_ids[i] for i in ref_set.nodes],
                                           [comp_ids[i] for i in target_idx]),
                            "directed": directed})
    ref_csv, ref_json = out / "references.csv", out / "references.json"
    ref_set.save(ref_csv, comp, ref_json)
    record.outputs += [str(label_path), str(model_path), str(ref_csv), str(ref_json)]
    record.metrics.update(k=model.k, cost=model.cost, labeled_nodes=int(labeled.size),
                          component_nodes=comp.node_count, references=len(ref_set),
                          targets=int(len(target_idx)))
    if truth_path is not None:
        truth = _truth_vector(graph, read_labels_csv(truth_path))
        tgt = kept[target_idx]
        ok = truth[tgt] >= 0
        record.metrics["misclassification_targets"] = misclassification_rate(
            labels[tgt][ok], truth[tgt][ok])
        both = (labels >= 0) & (truth >= 0)
        record.metrics["misclassification_all"] = misclassification_rate(
            labels[both], truth[both])
    return _finish(record, out, started)


def cmd_sweep_refs(graph_path, labels_path, out_dir, *, m_list, target_sizes,
                   trials: int = 5, seed: int = 0, k: int | None = None,
                   config: RDConfig | None = None, directed: bool = False,
                   n_jobs: int | None = None) -> RunRecord:
    """Misclassification vs. number of uniform references and targets.

    For each ``(n_targets, trial)`` one target sample is shared by every
    ``m``; references are drawn per ``(n_targets, trial, m)``. Writes the
    long-format ``sweep.csv`` with columns ``m,n_targets,trial,error``.
    """
    started = time.perf_counter()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config = config or RDConfig()
    params = {"graph": str(graph_path), "labels": str(labels_path),
              "m_list": list(m_list), "target_sizes": list(target_sizes),
              "trials": trials, "k": k, "config": config.to_dict(),
              "directed": directed}
    record = RunRecord("sweep-refs", params, seed)
    graph = read_edge_list(graph_path, directed=directed)
    comp, _ = giant_component(graph, "strong" if directed else "weak")
    truth = _truth_vector(comp, read_labels_csv(labels_path))
    if (truth < 0).any():
        raise ValueError(f"{int((truth < 0).sum())} component nodes lack a label")
    k = k or len(np.unique(truth))
    rd_config = replace(config, k=k)
    N = comp.node_count
    rows = []
    for nt in target_sizes:
        for trial in range(trials):
            tg = np.random.default_rng([seed, nt, trial]).choice(N, nt, replace=False)
            for m in m_list:
                refs = np.random.default_rng([seed, nt, trial, m]).choice(
                    N, m, replace=False)
                D = distance_matrix(comp, refs, tg).entries
                model = regular_decomposition(D, rd_config,
                                              child_seed(seed, nt, trial, m), n_jobs)
                rows.append((m, nt, trial, misclassification_rate(model.labels,
                                                                  truth[tg])))
    path = out / "sweep.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["m", "n_targets", "trial", "error"])
        for m, nt, trial, err in rows:
            w.writerow([m, nt, trial, repr(float(err))])
    record.outputs.append(str(path))
    errors = np.array([r[3] for r in rows])
    record.metrics = {"rows": len(rows), "mean_error": float(errors.mean())}
    return _finish(record, out, started)


def block_summary(graph: Graph, labels: dict) -> BlockSummary:
    """Group sizes, link densities and intra-group edge counts over labeled nodes.

    Densities divide edge counts by the number of possible (ordered if
    directed) pairs; a singleton group has diagonal density 0.
    """
    id_set = set(graph.original_ids)
    unknown = sorted(n for n in labels if n not in id_set)
    if unknown:
        raise ValueError(f"labels name {len(unknown)} unknown node IDs: {unknown[:20]}")
    groups = sorted(set(labels.values()))
    slot = {g: i for i, g in enumerate(groups)}
    z = np.full(graph.node_count, -1, dtype=np.int64)
    for node, g in labels.items():
        z[graph.index_of(node)] = slot[g]
    K = len(groups)
    sizes = np.bincount(z[z >= 0], minlength=K).astype(np.int64)
    e = graph.edges()
    e = e[(z[e[:, 0]] >= 0) & (z[e[:, 1]] >= 0)]
    counts = np.zeros((K, K), dtype=np.int64)
    np.add.at(counts, (z[e[:, 0]], z[e[:, 1]]), 1)
    if graph.directed:
        pairs = np.outer(sizes, sizes) - np.diag(sizes)
    else:
        counts = counts + counts.T - np.diag(np.diag(counts))
        pairs = np.outer(sizes, sizes)
        np.fill_diagonal(pairs, sizes * (sizes - 1) // 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        density = np.where(pairs > 0, counts / np.maximum(pairs, 1), 0.0)
    return BlockSummary(groups, sizes.tolist(), density.tolist(),
                        np.diag(counts).tolist(), graph.directed)


def cmd_summarize(graph_path, labels_path, out_dir, *,
                  directed: bool = False) -> tuple[BlockSummary, RunRecord]:
    started = time.perf_counter()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    record = RunRecord("summarize", {"graph": str(graph_path),
                                     "labels": str(labels_path),
                                     "directed": directed}, None)
    graph = read_edge_list(graph_path, directed=directed)
    summary = block_summary(graph, read_labels_csv(labels_path))
    path = out / "summary.json"
    write_json(path, summary.to_dict())
    record.outputs.append(str(path))
    record.metrics = {"groups": len(summary.groups)}
    return summary, _finish(record, out, started)


def cmd_theory(a: float, b: float, n: float) -> dict:
    """Every closed-form and numeric prediction that applies to ``(a, b, n)``.

    Quantities outside their domain are reported as ``None`` with the
    reason under ``notes``.
    """
    result: dict = {"a": a, "b": b, "n": n,
                    "above_ks_threshold": theory.above_ks_threshold(a, b),
                    "lambda1": (a + b) / 2, "lambda2": (a - b) / 2, "notes": {}}
    try:
        q = theory.spectral_quantities(a, b, n)
        result.update(q.to_dict())
        result["d1_asymptotic"], result["d2_asymptotic"] = theory.asymptotic_distances(a, b, n)
        result["cost_gap"] = theory.cost_gap(a, b, n)
    except ValueError as exc:
        result["notes"]["spectral"] = str(exc)
        for key in ("alpha", "beta", "c", "d", "delta", "d1_asymptotic",
                    "d2_asymptotic", "cost_gap"):
            result[key] = None
    try:
        result["d1_numeric"], result["d2_numeric"] = theory.solve_distances(a, b, n)
    except ValueError as exc:
        result["notes"]["distances"] = str(exc)
        result["d1_numeric"] = result["d2_numeric"] = None
    if not result["notes"]:
        del result["notes"]
    for key, val in result.items():
        if isinstance(val, float) and not math.isfinite(val):
            result[key] = None
    return result
