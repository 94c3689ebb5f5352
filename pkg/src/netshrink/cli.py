"""Command-line pipeline: synth, rescale, metrics, simulate, compare.

Every run resolves its parameters from (in increasing precedence) built-in
defaults, a key=value config file given with --config, and command-line
flags, then writes the resolved values to a manifest. A manifest is itself a
valid config file, so any run can be reproduced exactly with
``netshrink <cmd> --config <manifest>``. Relative output paths resolve under
$NETSHRINK_OUTDIR when it is set.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, analysis, metrics, plotting
from .rescaler import RescaleSpec, rescale
from .rewirer import RewireConfig, rewire_to_target
from .scenario import FlowSchedule, TrafficConfig, apply_alpha_transform, assign_scenario, build_traffic
from .simulator import SimConfig, SimResults, run as run_sim
from .synth import power_law_graph
from .topology import giant_component, load_edge_list, save_edge_list, save_node_map

# parameter tables: name -> (converter tag, default)
_SPECS = {
    "synth": {
        "n": ("int", 1000),
        "gamma": ("float", 2.1),
        "k_min": ("int", 2),
        "scenario": ("optint", None),
        "seed": ("int", 0),
        "out": ("str", "network.txt"),
    },
    "rescale": {
        "in_path": ("str", None),
        "n_target": ("int", None),
        "scenario": ("optint", None),
        "seed": ("int", 0),
        "smoothing": ("optfloat", None),
        "link_sampling": ("str", "without_replacement_if_possible"),
        "rewire": ("bool", False),
        "rewire_steps": ("optint", None),
        "rewire_tolerance": ("float", 0.05),
        "out": ("str", "replica.txt"),
    },
    "metrics": {
        "in_path": ("str", None),
        "sources": ("optint", None),
        "seed": ("int", 0),
        "figures": ("bool", True),
        "outdir": ("str", "metrics_out"),
    },
    "simulate": {
        "in_path": ("str", None),
        "flows": ("optstr", None),
        "alpha": ("float", 1.0),
        "horizon": ("float", None),
        "model": ("str", "tcp_lite"),
        "rate": ("float", 0.1),
        "sd_fraction": ("float", 0.1),
        "buffer": ("int", 300),
        "packet_size": ("int", 1000),
        "udp_rate": ("float", 6.0),
        "stretch_arrivals": ("bool", False),
        "seed": ("int", 0),
        "figures": ("bool", True),
        "outdir": ("str", "sim_out"),
    },
    "compare": {
        "a": ("str", None),
        "b": ("str", None),
        "threshold": ("float", 0.05),
        "trim_top": ("float", 0.001),
        "figures": ("bool", True),
        "outdir": ("str", "compare_out"),
    },
}

_REQUIRED = {
    "synth": (),
    "rescale": ("in_path", "n_target"),
    "metrics": ("in_path",),
    "simulate": ("in_path", "horizon"),
    "compare": ("a", "b"),
}


def _convert(tag: str, raw: str):
    if raw is None:
        return None
    if tag in ("optint", "optfloat", "optstr") and str(raw).lower() in ("none", "gcv", ""):
        return None
    if tag in ("int", "optint"):
        return int(raw)
    if tag in ("float", "optfloat"):
        return float(raw)
    if tag == "bool":
        return str(raw).lower() in ("1", "true", "yes", "on")
    return str(raw)


def _read_config(path: str) -> dict:
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, _, val = line.partition("=")
        out[key.strip()] = val.strip()
    return out


def _resolve(cmd: str, args: argparse.Namespace) -> dict:
    spec = _SPECS[cmd]
    resolved = {k: default for k, (_, default) in spec.items()}
    if args.config:
        fileconf = _read_config(args.config)
        wanted = fileconf.pop("subcommand", cmd)
        fileconf.pop("version", None)
        if wanted != cmd:
            raise ValueError(f"config file is for subcommand {wanted!r}, not {cmd!r}")
        for key, raw in fileconf.items():
            if key not in spec:
                raise ValueError(f"unknown config key {key!r} for {cmd}")
            resolved[key] = _convert(spec[key][0], raw)
    for key in spec:
        val = getattr(args, key, None)
        if val is not None:
            resolved[key] = _convert(spec[key][0], val)
    for key in _REQUIRED[cmd]:
        if resolved[key] is None:
            flag = "--" + key.replace("_", "-").replace("in-path", "in")
            raise ValueError(f"missing required parameter {flag}")
    return resolved


def _outpath(p: str | Path) -> Path:
    p = Path(p)
    base = os.environ.get("NETSHRINK_OUTDIR")
    if base and not p.is_absolute():
        p = Path(base) / p
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _outdir(p: str | Path) -> Path:
    p = Path(p)
    base = os.environ.get("NETSHRINK_OUTDIR")
    if base and not p.is_absolute():
        p = Path(base) / p
    p.mkdir(parents=True, exist_ok=True)
    return p


def _write_manifest(path: Path, cmd: str, params: dict) -> None:
    lines = [f"subcommand = {cmd}", f"version = {__version__}"]
    for key in sorted(params):
        val = params[key]
        if val is None:
            val = "none"
        elif isinstance(val, bool):
            val = int(val)
        elif isinstance(val, float):
            val = repr(val)
        lines.append(f"{key} = {val}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _derived_seeds(seed: int, n: int) -> list:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(n)]


# -- commands ---------------------------------------------------------------


def cmd_synth(params: dict) -> None:
    t = power_law_graph(params["n"], params["gamma"], k_min=params["k_min"],
                        seed=params["seed"])
    if params["scenario"] is not None:
        t = assign_scenario(t, params["scenario"], seed=_derived_seeds(params["seed"], 2)[1])
    out = _outpath(params["out"])
    save_edge_list(t, out)
    _write_manifest(out.with_suffix(out.suffix + ".manifest"), "synth", params)
    print(f"synth: wrote {out} ({t.n_nodes} nodes, {t.n_links} links)")


def cmd_rescale(params: dict) -> None:
    t = load_edge_list(params["in_path"])
    seeds = _derived_seeds(params["seed"], 3)
    if params["scenario"] is not None:
        t = assign_scenario(t, params["scenario"], seed=seeds[0])
    if not t.weighted:
        raise ValueError("input topology is unweighted; pass --scenario to assign "
                         "capacities and delays first")
    t, input_retention = giant_component(t)
    spec = RescaleSpec(
        n_target=params["n_target"],
        rng_seed=seeds[1],
        smoothing=params["smoothing"],
        link_sampling=params["link_sampling"],
    )
    replica = rescale(t, spec)
    rewire_line = "rewire = off"
    if params["rewire"]:
        target = metrics.clustering_per_degree(t)
        cfg = RewireConfig(target, max_steps=params["rewire_steps"],
                           tolerance=params["rewire_tolerance"], seed=seeds[2])
        replica, report = rewire_to_target(replica, cfg)
        rewire_line = (f"rewire_objective = {report.initial_objective!r} -> "
                       f"{report.final_objective!r} ({report.accepted} swaps)")
    out = _outpath(params["out"])
    save_edge_list(replica, out)
    save_node_map(t, out.with_suffix(out.suffix + ".nodemap"))
    meta = [
        f"alpha = {replica.meta['size_alpha']!r}",
        f"seed = {params['seed']}",
        f"n_nodes = {replica.n_nodes}",
        f"n_links = {replica.n_links}",
        f"dropped_links = {replica.meta['dropped_links']}",
        f"gcc_retention = {replica.meta['gcc_retention']!r}",
        f"input_gcc_retention = {input_retention!r}",
        rewire_line,
    ]
    out.with_suffix(out.suffix + ".meta").write_text("\n".join(meta) + "\n", encoding="utf-8")
    _write_manifest(out.with_suffix(out.suffix + ".manifest"), "rescale", params)
    print(f"rescale: wrote {out} ({replica.n_nodes} nodes, {replica.n_links} links, "
          f"alpha={replica.meta['size_alpha']:.4g})")


def cmd_metrics(params: dict) -> None:
    t = load_edge_list(params["in_path"])
    outdir = _outdir(params["outdir"])
    src = params["sources"]
    seed = params["seed"]

    ccdf = metrics.degree_distribution(t)
    lines = ["# degree ccdf"]
    lines += [f"{int(x)} {c!r}" for x, c in zip(ccdf.xs, ccdf.ccdf)]
    (outdir / "degree_ccdf.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    load_curve = metrics.betweenness_load(t, sample_sources=src, seed=seed)
    load_curve.save(outdir / "load.txt", label="mean_load")
    load_curve.normalized().save(outdir / "load_norm.txt", label="normalized_load")

    dist = metrics.distance_distribution(t, sample_sources=src, seed=seed)
    dist.save(outdir / "distance.txt")

    cbar = metrics.clustering_by_degree(t)
    cbar.save(outdir / "clustering.txt", label="mean_clustering")
    metrics.save_clustering_target(metrics.clustering_per_degree(t),
                                   outdir / "clustering_target.txt")

    summary = [
        f"n_nodes = {t.n_nodes}",
        f"n_links = {t.n_links}",
        f"mean_degree = {2 * t.n_links / t.n_nodes!r}",
        f"assortativity = {metrics.assortativity(t)!r}",
        f"mean_clustering = {metrics.mean_clustering(t)!r}",
        f"mean_distance = {dist.mean!r}",
        f"std_distance = {dist.std!r}",
    ]
    curves = {}
    if t.weighted:
        for weight, stem in (("capacity", "knn_capacity"), ("prop_delay", "knn_delay")):
            curve = metrics.weighted_neighbor_degree(t, weight)
            curve.save(outdir / f"{stem}.txt", label=f"{weight}_weighted_neighbor_degree")
            curve.normalized().save(outdir / f"{stem}_norm.txt", label="normalized")
            curves[stem] = curve
    else:
        summary.append("weighted = 0")
    try:
        summary.append(f"load_slope = {metrics.curve_slope(load_curve)!r}")
    except ValueError:
        summary.append("load_slope = none  # not enough populated bins")
    (outdir / "summary.txt").write_text("\n".join(summary) + "\n", encoding="utf-8")

    if params["figures"]:
        plotting.plot_degree_curves({"load": load_curve.normalized()},
                                    "normalized load", outdir / "load.png")
        plotting.plot_distance_distributions({"network": dist}, outdir / "distance.png")
        if curves:
            plotting.plot_degree_curves(
                {k: c.normalized() for k, c in curves.items()},
                "normalized weighted neighbor degree", outdir / "knn.png")
        if len(cbar.x):
            plotting.plot_degree_curves({"clustering": cbar}, "mean clustering",
                                        outdir / "clustering.png")
    _write_manifest(outdir / "metrics.manifest", "metrics", params)
    print(f"metrics: wrote {outdir}")


def cmd_simulate(params: dict) -> None:
    t = load_edge_list(params["in_path"])
    if not t.weighted:
        raise ValueError("simulation needs a weighted topology")
    t = apply_alpha_transform(t, params["alpha"])
    outdir = _outdir(params["outdir"])
    if params["flows"]:
        schedule = FlowSchedule.load(params["flows"])
    else:
        tcfg = TrafficConfig(
            flow_rate=params["rate"],
            horizon=params["horizon"],
            seed=_derived_seeds(params["seed"], 2)[0],
            sd_fraction=params["sd_fraction"],
            flow_model=params["model"],
            udp_rate=params["udp_rate"],
            packet_size=params["packet_size"],
            buffer=params["buffer"],
        )
        schedule = build_traffic(t, tcfg)
        schedule.save(outdir / "trace.txt")
    cfg = SimConfig(
        horizon=params["horizon"],
        alpha=params["alpha"],
        flow_model=params["model"],
        buffer=params["buffer"],
        packet_size=params["packet_size"],
        udp_rate=params["udp_rate"],
        stretch_arrivals=params["stretch_arrivals"],
        seed=params["seed"],
    )
    results = run_sim(t, schedule, cfg)
    results.save(outdir)
    if params["figures"]:
        fct, delay = analysis.normalize(results)
        sets = {}
        if fct.samples.size:
            sets["normalized fct"] = fct
        if sets:
            plotting.plot_ccdf_comparison(sets, "normalized completion time (s)",
                                          outdir / "fct_ccdf.png")
        if delay.samples.size:
            plotting.plot_ccdf_comparison({"normalized delay": delay},
                                          "normalized packet delay (s)",
                                          outdir / "delay_ccdf.png")
    _write_manifest(outdir / "simulate.manifest", "simulate", params)
    print(f"simulate: {results.completed_flows}/{results.total_flows} flows completed, "
          f"{results.dropped} drops, wrote {outdir}")


def cmd_compare(params: dict) -> None:
    ra = SimResults.load(params["a"])
    rb = SimResults.load(params["b"])
    fct_a, delay_a = analysis.normalize(ra)
    fct_b, delay_b = analysis.normalize(rb)
    report, ok = analysis.compare_report(
        fct_a, delay_a, fct_b, delay_b,
        threshold=params["threshold"], trim_top_fraction=params["trim_top"],
        label_a=params["a"], label_b=params["b"])
    outdir = _outdir(params["outdir"])
    (outdir / "report.txt").write_text(report, encoding="utf-8")
    if params["figures"]:
        if fct_a.samples.size and fct_b.samples.size:
            plotting.plot_ccdf_comparison({params["a"]: fct_a, params["b"]: fct_b},
                                          "normalized completion time (s)",
                                          outdir / "fct_compare.png")
        if delay_a.samples.size and delay_b.samples.size:
            plotting.plot_ccdf_comparison({params["a"]: delay_a, params["b"]: delay_b},
                                          "normalized packet delay (s)",
                                          outdir / "delay_compare.png")
    _write_manifest(outdir / "compare.manifest", "compare", params)
    sys.stdout.write(report)


# -- argument parsing ---------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netshrink",
        description="Downscale weighted networks and check performance preservation.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    def add(cmd, help_text, flags):
        p = sub.add_parser(cmd, help=help_text)
        p.add_argument("--config", help="key=value config file (e.g. a manifest)")
        for flag, dest, meta in flags:
            p.add_argument(flag, dest=dest, metavar=meta)
        return p

    add("synth", "generate a synthetic scale-free network", [
        ("--n", "n", "N"), ("--gamma", "gamma", "G"), ("--k-min", "k_min", "K"),
        ("--scenario", "scenario", "1|2"), ("--seed", "seed", "S"),
        ("--out", "out", "FILE")])
    add("rescale", "build a downscaled replica", [
        ("--in", "in_path", "FILE"), ("--n-target", "n_target", "N"),
        ("--scenario", "scenario", "1|2"), ("--seed", "seed", "S"),
        ("--smoothing", "smoothing", "LAM|gcv"),
        ("--link-sampling", "link_sampling", "MODE"),
        ("--rewire", "rewire", "0|1"), ("--rewire-steps", "rewire_steps", "N"),
        ("--rewire-tolerance", "rewire_tolerance", "T"), ("--out", "out", "FILE")])
    add("metrics", "compute validation metrics", [
        ("--in", "in_path", "FILE"), ("--sources", "sources", "N"),
        ("--seed", "seed", "S"), ("--figures", "figures", "0|1"),
        ("--outdir", "outdir", "DIR")])
    add("simulate", "run the packet simulator", [
        ("--in", "in_path", "FILE"), ("--flows", "flows", "TRACE"),
        ("--alpha", "alpha", "A"), ("--horizon", "horizon", "SECONDS"),
        ("--model", "model", "tcp_lite|udp_cbr"), ("--rate", "rate", "FLOWS/S"),
        ("--sd-fraction", "sd_fraction", "P"), ("--buffer", "buffer", "PKTS"),
        ("--packet-size", "packet_size", "BYTES"), ("--udp-rate", "udp_rate", "PKTS/S"),
        ("--stretch-arrivals", "stretch_arrivals", "0|1"), ("--seed", "seed", "S"),
        ("--figures", "figures", "0|1"), ("--outdir", "outdir", "DIR")])
    add("compare", "compare two simulation output directories", [
        ("--a", "a", "DIR"), ("--b", "b", "DIR"),
        ("--threshold", "threshold", "KS"), ("--trim-top", "trim_top", "FRAC"),
        ("--figures", "figures", "0|1"), ("--outdir", "outdir", "DIR")])
    return parser


_COMMANDS = {
    "synth": cmd_synth,
    "rescale": cmd_rescale,
    "metrics": cmd_metrics,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        params = _resolve(args.cmd, args)
        _COMMANDS[args.cmd](params)
    except (ValueError, OSError) as exc:
        print(f"netshrink {args.cmd}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
