"""Deterministic report serialization: canonical JSON (sorted keys, exact
rationals as strings, no timestamps), DOT and CSV exports.  Identical runs
must produce byte-identical artifacts."""

from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from . import __version__, kernels


def _canon(obj):
    if isinstance(obj, dict):
        return {str(k): _canon(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, frozenset):
        return sorted(_canon(v) for v in obj)
    return obj


def canonical_json(payload):
    return json.dumps(_canon(payload), indent=2, sort_keys=True) + "\n"


def envelope(subcommand, config, payload):
    return {
        "tool": "hhslab",
        "version": __version__,
        "kernel_backend": kernels.BACKEND,
        "subcommand": subcommand,
        "config": config,
        "report": payload,
    }


def write_report(out_dir, name, payload):
    path = out_dir / f"{name}.json"
    path.write_text(canonical_json(payload), encoding="utf-8")
    return path


def coned_graph_dot(space):
    """DOT export with cone vertices styled distinctly; deterministic order."""
    ball = space.ball
    lines = ["graph coned {"]
    for i, g in enumerate(ball.elements):
        lines.append(f'  v{i} [label="{g}"];')
    for c, (mask, rep) in enumerate(space.cone_labels):
        names = ",".join(ball.graph.subset_names(mask))
        lines.append(
            f'  c{c} [label="cone {{{names}}}@{rep}", shape=diamond, style=dashed];'
        )
    n_base = space.n_base
    seen = set()
    for v in range(space.n):
        start, stop = space.indptr[v], space.indptr[v + 1]
        for w in space.indices[start:stop]:
            w = int(w)
            if (min(v, w), max(v, w)) in seen or v == w:
                continue
            seen.add((min(v, w), max(v, w)))
            a = f"v{v}" if v < n_base else f"c{v - n_base}"
            b = f"v{w}" if w < n_base else f"c{w - n_base}"
            lines.append(f"  {a} -- {b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def contact_graph_dot(cg):
    """DOT export of a contact graph with wall labels v@minrep."""
    graph = cg.ball.graph
    lines = ["graph contact {"]
    for i, wall in enumerate(cg.walls):
        label = f"{graph.names[wall.label]}@{wall.key.base}"
        lines.append(f'  w{i} [label="{label}"];')
    seen = set()
    for v in range(cg.n):
        for w in cg.indices[cg.indptr[v] : cg.indptr[v + 1]]:
            w = int(w)
            key = (min(v, w), max(v, w))
            if key in seen or v == w:
                continue
            seen.add(key)
            style = ' [style=bold]' if key in cg.crossing else ""
            lines.append(f"  w{key[0]} -- w{key[1]}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def wall_table_json(wall_list, ball):
    graph = ball.graph
    return [
        {
            "label": graph.names[w.label],
            "key": str(w.key.base),
            "carrier_type": list(graph.subset_names(w.key.mask)),
            "dual_edges": len(w.dual_edges),
        }
        for w in wall_list
    ]


def acylindricity_csv(table):
    lines = ["R,N"]
    for r, n in sorted(table.items()):
        lines.append(f"{r},{n}")
    return "\n".join(lines) + "\n"


def scatter_csv(pairs):
    lines = ["distance,projection_sum"]
    for d, s in pairs:
        lines.append(f"{d},{s}")
    return "\n".join(lines) + "\n"
