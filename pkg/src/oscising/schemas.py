"""JSON schemas for ``--format json`` output, one per command."""

from __future__ import annotations

_NUM = {"type": "number"}
_INT = {"type": "integer", "minimum": 0}
_OPT_NUM = {"type": ["number", "null"]}

_GRAPH = {
    "type": "object",
    "required": ["n", "m"],
    "properties": {"n": {"type": "integer", "minimum": 1}, "m": _INT},
}

_SETS = {
    "type": "array", "minItems": 2, "maxItems": 2,
    "items": {"type": "array", "items": {"type": "integer", "minimum": 1}},
}

CUT_SOLUTION = {
    "type": "object",
    "required": ["bitstring", "sets", "cut_value", "ising_energy", "optimal"],
    "properties": {
        "bitstring": {"type": "string", "pattern": "^[01]*$"},
        "sets": _SETS,
        "cut_value": _NUM,
        "ising_energy": _NUM,
        "optimal": {"type": "boolean"},
    },
}

STATS = {
    "type": "object",
    "required": ["trials", "optimum", "success_rate", "cut_histogram", "bitstring_histogram",
                 "mean_settle_time", "unresolved_rate", "mean_approx_ratio"],
    "properties": {
        "trials": {"type": "integer", "minimum": 1},
        "optimum": _NUM,
        "success_rate": {"type": "number", "minimum": 0, "maximum": 1},
        "cut_histogram": {"type": "object", "additionalProperties": _INT},
        "bitstring_histogram": {"type": "object", "additionalProperties": _INT},
        "mean_settle_time": _OPT_NUM,
        "unresolved_rate": {"type": "number", "minimum": 0, "maximum": 1},
        "mean_approx_ratio": _NUM,
    },
}

_RESULTS = {
    "solve": {
        "type": "object",
        "required": ["graph", "oracle", "stats"],
        "properties": {"graph": _GRAPH, "oracle": CUT_SOLUTION, "stats": STATS},
    },
    "oracle": {
        "type": "object",
        "required": ["graph", "solution"],
        "properties": {"graph": _GRAPH, "solution": CUT_SOLUTION},
    },
    "sweep": {
        "type": "object",
        "required": ["graph", "rows"],
        "properties": {
            "graph": _GRAPH,
            "rows": {
                "type": "array", "minItems": 1,
                "items": {"type": "object", "required": ["c", "stats"],
                          "properties": {"c": {"type": "number", "exclusiveMinimum": 0},
                                         "stats": STATS}},
            },
        },
    },
    "ablate": {
        "type": "object",
        "required": ["graph", "with_shil", "without_shil"],
        "properties": {"graph": _GRAPH, "with_shil": STATS, "without_shil": STATS},
    },
    "isomorphs": {
        "type": "object",
        "required": ["graph", "isomorphs", "optima_consistent"],
        "properties": {
            "graph": _GRAPH,
            "optima_consistent": {"type": "boolean"},
            "isomorphs": {
                "type": "array", "minItems": 1,
                "items": {"type": "object", "required": ["permutation", "optimum", "stats"],
                          "properties": {"permutation": {"type": "array", "items": _INT},
                                         "optimum": _NUM, "stats": STATS}},
            },
        },
    },
    "trace": {
        "type": "object",
        "required": ["graph", "seed", "samples", "final_phases", "readout", "final_r"],
        "properties": {
            "graph": _GRAPH,
            "seed": _INT,
            "samples": {"type": "integer", "minimum": 2},
            "final_phases": {"type": "array", "items": {"type": "number", "minimum": 0}},
            "final_r": {"type": "number", "minimum": 0},
            "readout": {
                "type": "object",
                "required": ["spins", "bitstring", "unresolved", "reference_index", "mode"],
                "properties": {
                    "spins": {"type": "array", "items": {"enum": [-1, 0, 1]}},
                    "bitstring": {"type": "string", "pattern": "^[01+0-]*$"},
                    "unresolved": {"type": "array", "items": _INT},
                    "mode": {"enum": ["binary", "ternary"]},
                },
            },
        },
    },
}


def schema_for(command: str) -> dict:
    """Full envelope schema for one command's JSON output."""
    if command not in _RESULTS:
        raise KeyError(command)
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": f"oscising {command} output",
        "type": "object",
        "required": ["generated_at", "command", "version", "backend", "config", "result"],
        "properties": {
            "generated_at": {"type": "string"},
            "command": {"const": command},
            "version": {"type": "string"},
            "backend": {"enum": ["numba", "numpy"]},
            "config": {"type": "object", "required": ["seed", "graph", "c", "shil", "dt", "t_end"]},
            "result": _RESULTS[command],
        },
    }


SCHEMAS = {cmd: schema_for(cmd) for cmd in _RESULTS}
