"""JSON Schemas for the documents the CLI reads and writes."""

NUMBER = {"type": "number"}

SERIES = {
    "type": "object",
    "properties": {
        "mu": {"type": "string", "pattern": r"^\s*\d+(\s*/\s*\d+)?\s*$"},
        "sign": {"enum": ["plus", "minus"]},
        "coeffs": {
            "type": "object",
            "patternProperties": {r"^\d+$": {"type": "number", "minimum": 0}},
            "additionalProperties": False,
        },
        "truncation": {"type": "integer", "minimum": 2},
    },
    "additionalProperties": False,
}

KERNEL = {
    "type": "object",
    "properties": {
        "family": {"enum": ["all_ones", "koebe", "koebe2", "custom"]},
        "custom": {
            "type": "object",
            "patternProperties": {r"^\d+$": {"type": "number", "minimum": 0}},
            "additionalProperties": False,
        },
    },
    "required": ["family"],
    "additionalProperties": False,
}

PARAMS = {
    "type": "object",
    "properties": {
        "phi": KERNEL,
        "psi": KERNEL,
        "A": NUMBER,
        "B": NUMBER,
        "gamma": NUMBER,
        "k": {"type": "integer", "minimum": 0},
        "m": {"type": "integer", "minimum": 0},
        "mu": {"type": ["string", "number"]},
        "variant": {"enum": ["lambda", "theta"]},
    },
    "required": ["phi", "psi"],
    "additionalProperties": False,
}

BOUND_REPORT = {
    "type": "object",
    "properties": {
        "kind": {"type": "string"},
        "closed_form": NUMBER,
        "oracle": NUMBER,
        "margin": NUMBER,
        "witness": {
            "oneOf": [
                {"type": "null"},
                {
                    "type": "object",
                    "properties": {"r": NUMBER, "theta": NUMBER},
                    "required": ["r", "theta"],
                },
            ]
        },
        "holds": {"type": "boolean"},
    },
    "required": ["kind", "closed_form", "oracle", "margin", "witness"],
}

JOB = {
    "type": "object",
    "properties": {
        "command": {
            "enum": ["member", "radius", "distort", "fracop", "means", "extremal", "verify", "sweep"]
        },
        "params": PARAMS,
        "series": SERIES,
        "options": {"type": "object"},
    },
    "required": ["command"],
    "additionalProperties": False,
}

TERMS = {
    "type": "array",
    "items": {
        "type": "object",
        "properties": {"exponent": NUMBER, "coefficient": NUMBER},
        "required": ["exponent", "coefficient"],
        "additionalProperties": False,
    },
}

RESULTS = {
    "member": {
        "type": "object",
        "properties": {
            "verdict": {"enum": ["member_certified", "not_member", "inconclusive"]},
            "margin": NUMBER,
        },
        "required": ["verdict", "margin"],
    },
    "radius": {
        "type": "object",
        "properties": {
            "radius": NUMBER,
            "minimizer_n": {"type": "integer", "minimum": 2},
            "oracle": NUMBER,
        },
        "required": ["radius", "minimizer_n", "oracle"],
    },
    "fracop": {
        "type": "object",
        "properties": {"terms": TERMS},
        "required": ["terms"],
    },
    "distort": {
        "type": "object",
        "properties": {
            "lower": NUMBER,
            "upper": NUMBER,
            "reports": {"type": "array", "items": BOUND_REPORT},
        },
        "required": ["lower", "upper"],
    },
    "means": {
        "type": "object",
        "properties": {"report": BOUND_REPORT},
        "required": ["report"],
    },
    "extremal": {
        "type": "object",
        "properties": {"series": SERIES, "coefficient_bound": NUMBER, "margin": NUMBER},
        "required": ["series", "coefficient_bound", "margin"],
    },
    "verify": {
        "type": "object",
        "properties": {
            "verdict": {"enum": ["member_certified", "not_member", "inconclusive"]},
            "margin": NUMBER,
            "residual": NUMBER,
            "checks": {"type": "array", "items": BOUND_REPORT},
            "violations": {"type": "array", "items": {"type": "string"}},
        },
        "required": ["verdict", "margin", "residual", "checks", "violations"],
    },
}

ERROR = {
    "type": "object",
    "properties": {"error": {"type": "string"}, "message": {"type": "string"}},
    "required": ["error", "message"],
}
