"""Command-line surface: map, explain, suggest, eval, and snapshot tools.

Exit codes: 0 success, 1 no mapping found, 2 input/config error, 3 source
failure in live mode.  Every number printed in text or DOT output is
recomputable from the JSON output.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .evaluation import evaluate, load_problems
from .model import Entity, InvalidEntityError, Mapping, normalize_entity
from .scoring import explain_quadruple
from .search import SearchConfig, solve
from .similarity import Stoplist, provider_from_env
from .sources import (ConfigurationError, RelationIndex, Snapshot,
                      SnapshotOnlySource, SourceUnavailableError,
                      TripleStoreSource)
from .suggest import suggest as run_suggest

EXIT_OK = 0
EXIT_NO_MAPPING = 1
EXIT_INPUT_ERROR = 2
EXIT_SOURCE_FAILURE = 3


class CliError(click.ClickException):
    def __init__(self, message, exit_code=EXIT_INPUT_ERROR):
        super().__init__(message)
        self.exit_code = exit_code


def _entities(raw: str) -> list[Entity]:
    try:
        out = [normalize_entity(part) for part in raw.split(",") if part.strip()]
    except InvalidEntityError as exc:
        raise CliError(str(exc))
    if len(out) < 2:
        raise CliError(f"need at least 2 entities, got {raw!r}")
    names = [e.name for e in out]
    if len(set(names)) != len(names):
        raise CliError(f"duplicate entity names in {raw!r}")
    return out


def _load_snapshot(path: str) -> Snapshot:
    try:
        return Snapshot.load(path)
    except ConfigurationError as exc:
        raise CliError(str(exc))


def _apply_config_file(ctx, param, value):
    """--config JSON file: its keys override the corresponding flags."""
    if value is None:
        return None
    overrides = json.loads(Path(value).read_text(encoding="utf-8"))
    ctx.default_map = ctx.default_map or {}
    ctx.default_map.update(overrides)
    return value


def _search_config(beam, top_k, sim_threshold, cluster_threshold):
    return SearchConfig(beam_width=beam, top_k_clusters=top_k,
                        sim_threshold=sim_threshold,
                        cluster_threshold=cluster_threshold)


def _stoplist(path: str | None) -> Stoplist:
    if path is None:
        return Stoplist.default()
    try:
        return Stoplist.from_file(path)
    except OSError as exc:
        raise CliError(f"cannot read stoplist: {exc}")


common_options = [
    click.option("--snapshot", "snapshot_path", required=True,
                 help="Relation snapshot file (JSONL)."),
    click.option("--sources", "enabled_sources", default=None,
                 help="Comma-separated source ids to enable (default all)."),
    click.option("--live", is_flag=True,
                 help="Allow live source queries on snapshot misses."),
    click.option("--beam", default=20, show_default=True),
    click.option("--top-k", default=3, show_default=True),
    click.option("--sim-threshold", default=0.2, show_default=True),
    click.option("--cluster-threshold", default=0.5, show_default=True),
    click.option("--stoplist", "stoplist_path", default=None,
                 help="Stoplist file (default: shipped 500-entry list)."),
    click.option("--config", callback=_apply_config_file, expose_value=False,
                 is_eager=True, default=None,
                 help="JSON config file whose keys override flags."),
]


def with_common(fn):
    for opt in reversed(common_options):
        fn = opt(fn)
    return fn


def _sources_for(snapshot: Snapshot, enabled: str | None):
    sources = [SnapshotOnlySource(sid) for sid in snapshot.source_ids()]
    if enabled:
        wanted = {s.strip() for s in enabled.split(",")}
        sources = [s for s in sources if s.id in wanted]
    return sources


def _mapping_to_dict(mapping: Mapping) -> dict:
    return {"pairs": sorted([b.name, t.name] for b, t in mapping.pairs),
            "unmapped_base": sorted(e.name for e in mapping.unmapped_base),
            "unmapped_target": sorted(e.name for e in mapping.unmapped_target),
            "total_score": mapping.total_score}


def _edge_evidence(mapping: Mapping, table):
    """Evidence per mapped-pair edge: quadruple score plus up to two
    relations per direction (the DOT label convention)."""
    edges = []
    pairs = sorted(mapping.pairs, key=lambda bt: bt[0].name)
    for i in range(len(pairs)):
        for j in range(i + 1, len(pairs)):
            (b1, t1), (b2, t2) = pairs[i], pairs[j]
            sim = table.lookup(b1.name, b2.name, t1.name, t2.name)
            if sim is None or sim.score <= 0:
                continue
            relations = {"forward": [], "backward": []}
            for ev in sim.evidence:
                if len(relations[ev.direction]) < 2:
                    relations[ev.direction].append(
                        {"base": ev.base_label, "target": ev.target_label,
                         "weight": ev.weight})
            edges.append({"from": [b1.name, t1.name], "to": [b2.name, t2.name],
                          "score": sim.score, "relations": relations})
    return edges


def _emit_dot(mapping: Mapping, table) -> str:
    lines = ["digraph mapping {", '  rankdir="LR";',
             '  node [shape=box, style=rounded];']
    node_ids = {}
    for i, (b, t) in enumerate(mapping.pairs):
        node_ids[(b.name, t.name)] = f"n{i}"
        lines.append(f'  n{i} [label="{b.name} → {t.name}"];')
    edges = _edge_evidence(mapping, table)
    max_score = max((e["score"] for e in edges), default=1.0)
    for e in edges:
        src = node_ids[tuple(e["from"])]
        dst = node_ids[tuple(e["to"])]
        labels = [f'{r["base"]} ~ {r["target"]} ({r["weight"]:.2f})'
                  for d in ("forward", "backward") for r in e["relations"][d]]
        label = "\\n".join(labels[:2] + [f'score {e["score"]:.2f}'])
        penwidth = 1.0 + 3.0 * e["score"] / max_score
        lines.append(f'  {src} -> {dst} [label="{label}", '
                     f'penwidth={penwidth:.2f}];')
    lines.append("}")
    return "\n".join(lines)


@click.group()
def cli():
    """Relational analogy mapping between two entity sets."""


@cli.command("map")
@click.option("--base", "base_raw", required=True,
              help='Comma-separated base entities, e.g. "sun,earth".')
@click.option("--target", "target_raw", required=True,
              help="Comma-separated target entities.")
@click.option("--format", "fmt", default="text",
              type=click.Choice(["text", "json", "dot"]), show_default=True)
@with_common
def cmd_map(base_raw, target_raw, fmt, snapshot_path, enabled_sources, live,
            beam, top_k, sim_threshold, cluster_threshold, stoplist_path):
    """Find the best partial mappings between two entity sets."""
    base = _entities(base_raw)
    target = _entities(target_raw)
    snapshot = _load_snapshot(snapshot_path)
    sources = _sources_for(snapshot, enabled_sources)
    config = _search_config(beam, top_k, sim_threshold, cluster_threshold)
    provider = provider_from_env()
    stoplist = _stoplist(stoplist_path)
    try:
        index = RelationIndex.build(base, target, sources, snapshot, live=live)
    except SourceUnavailableError as exc:
        raise CliError(str(exc), exit_code=EXIT_SOURCE_FAILURE)
    ranked, table = solve(base, target, index, provider, stoplist, config)

    if fmt == "json":
        click.echo(json.dumps({
            "base": [e.name for e in base],
            "target": [e.name for e in target],
            "mappings": [dict(_mapping_to_dict(m),
                              evidence=_edge_evidence(m, table))
                         for m in ranked]}, indent=2))
    elif fmt == "dot":
        click.echo(_emit_dot(ranked[0], table))
    else:
        for rank, m in enumerate(ranked, 1):
            click.echo(f"#{rank}  score={m.total_score:.4f}")
            for b, t in m.pairs:
                click.echo(f"    {b.name} -> {t.name}")
            if m.unmapped_base:
                click.echo("    unmapped base: "
                           + ", ".join(e.name for e in m.unmapped_base))
            if m.unmapped_target:
                click.echo("    unmapped target: "
                           + ", ".join(e.name for e in m.unmapped_target))
    if len(ranked[0]) == 0:
        sys.exit(EXIT_NO_MAPPING)


@cli.command("explain")
@click.option("--base-pair", required=True, help='e.g. "earth,sun"')
@click.option("--target-pair", required=True, help='e.g. "electrons,nucleus"')
@with_common
def cmd_explain(base_pair, target_pair, snapshot_path, enabled_sources, live,
                beam, top_k, sim_threshold, cluster_threshold, stoplist_path):
    """Dump clusters, edges, and the matching for one candidate quadruple."""
    b = _entities(base_pair)
    t = _entities(target_pair)
    if len(b) != 2 or len(t) != 2:
        raise CliError("explain expects exactly 2 entities per pair")
    snapshot = _load_snapshot(snapshot_path)
    sources = _sources_for(snapshot, enabled_sources)
    config = _search_config(beam, top_k, sim_threshold, cluster_threshold)
    index = RelationIndex.build(b, t, sources, snapshot, live=live)
    dump = explain_quadruple(b[0], b[1], t[0], t[1], index,
                             provider_from_env(), _stoplist(stoplist_path),
                             config.scoring)
    click.echo(json.dumps(dump, indent=2))


@cli.command("suggest")
@click.option("--base", "base_raw", required=True)
@click.option("--target", "target_raw", required=True)
@click.option("--entity", "entity_raw", default=None,
              help="Unmapped base entity to suggest for (default: all).")
@click.option("--suggestion-store", "store_paths", multiple=True,
              help="Triple store file(s) to harvest candidates from.")
@with_common
def cmd_suggest(base_raw, target_raw, entity_raw, store_paths, snapshot_path,
                enabled_sources, live, beam, top_k, sim_threshold,
                cluster_threshold, stoplist_path):
    """Propose target-side entities for unmapped base entities."""
    base = _entities(base_raw)
    target = _entities(target_raw)
    snapshot = _load_snapshot(snapshot_path)
    sources = _sources_for(snapshot, enabled_sources)
    config = _search_config(beam, top_k, sim_threshold, cluster_threshold)
    provider = provider_from_env()
    stoplist = _stoplist(stoplist_path)
    try:
        stores = [TripleStoreSource(f"store-{i}", p)
                  for i, p in enumerate(store_paths)]
    except ConfigurationError as exc:
        raise CliError(str(exc))
    index = RelationIndex.build(base, target, sources, snapshot, live=live)
    ranked, _ = solve(base, target, index, provider, stoplist, config)
    mapping = ranked[0]
    targets = ([normalize_entity(entity_raw)] if entity_raw
               else list(mapping.unmapped_base))
    output = []
    for b_unmapped in targets:
        candidates = run_suggest(b_unmapped, mapping, index, base, target,
                                 sources, stores, snapshot, provider,
                                 stoplist, config, live=live)
        output.append({
            "entity": b_unmapped.name,
            "status": "ok" if candidates else "no suggestions",
            "suggestions": [
                {"representative": c.representative,
                 "best_entity": c.best_entity,
                 "members": list(c.cluster_members),
                 "score": c.score,
                 "mapping": _mapping_to_dict(c.best_mapping)}
                for c in candidates]})
    click.echo(json.dumps(output, indent=2))


@cli.command("eval")
@click.option("--problems", "problems_path", required=True,
              help="Problem file (JSON or YAML).")
@click.option("--ablate", default=None,
              help="Source id to disable for an ablation run.")
@click.option("--format", "fmt", default="text",
              type=click.Choice(["text", "json"]), show_default=True)
@with_common
def cmd_eval(problems_path, ablate, fmt, snapshot_path, enabled_sources, live,
             beam, top_k, sim_threshold, cluster_threshold, stoplist_path):
    """Evaluate the engine on a problem set; optionally ablate one source."""
    try:
        problems = load_problems(problems_path)
    except (OSError, ValueError, KeyError) as exc:
        raise CliError(f"cannot load problems: {exc}")
    snapshot = _load_snapshot(snapshot_path)
    config = _search_config(beam, top_k, sim_threshold, cluster_threshold)
    provider = provider_from_env()
    stoplist = _stoplist(stoplist_path)
    enabled = None
    if enabled_sources:
        enabled = [s.strip() for s in enabled_sources.split(",")]
    if ablate:
        enabled = [s for s in (enabled or snapshot.source_ids())
                   if s != ablate]
    report = evaluate(problems, config, snapshot, provider, stoplist,
                      enabled_sources=enabled, live=live)
    if fmt == "json":
        click.echo(json.dumps(report.to_dict(), indent=2))
    else:
        click.echo(report.to_text())


@cli.group("snapshot")
def cmd_snapshot():
    """Snapshot inspection and maintenance."""


@cmd_snapshot.command("info")
@click.argument("path")
def cmd_snapshot_info(path):
    """Print entry counts per source for a snapshot file."""
    snapshot = _load_snapshot(path)
    counts: dict[str, int] = {}
    nonempty: dict[str, int] = {}
    for (source, _, _), phrases in snapshot.entries.items():
        counts[source] = counts.get(source, 0) + 1
        if phrases:
            nonempty[source] = nonempty.get(source, 0) + 1
    click.echo(json.dumps({
        "created_at": snapshot.created_at,
        "version": snapshot.version,
        "entries": len(snapshot),
        "per_source": {s: {"entries": counts[s],
                           "nonempty": nonempty.get(s, 0)}
                       for s in sorted(counts)}}, indent=2))


@cmd_snapshot.command("merge")
@click.argument("inputs", nargs=-1, required=True)
@click.argument("output", nargs=1)
def cmd_snapshot_merge(inputs, output):
    """Merge snapshot files; later inputs win on conflicting keys."""
    merged = Snapshot()
    for path in inputs:
        snap = _load_snapshot(path)
        merged.entries.update(snap.entries)
    merged.save(output)
    click.echo(f"wrote {len(merged)} entries to {output}")


def main():
    try:
        cli(standalone_mode=False)
    except CliError as exc:
        click.echo(f"error: {exc.message}", err=True)
        sys.exit(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        sys.exit(EXIT_INPUT_ERROR)
    except click.exceptions.Abort:
        sys.exit(EXIT_INPUT_ERROR)


if __name__ == "__main__":
    main()
