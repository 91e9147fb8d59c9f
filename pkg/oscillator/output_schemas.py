"""
JSON schemas of the qosc command outputs
Every document is validated against its schema before it is written
"""

NUMBER = {"type": "number"}
OPTIONAL_NUMBER = {"type": ["number", "null"]}
REGIME = {"type": "string", "enum": ["general", "alpha_zero", "beta_zero", "equal", "undeformed"]}

LEVEL_ROW = {
    "type": "object",
    "required": ["index", "g_i", "s_i", "t_i", "eps_i", "a_i", "b_i", "c_i", "mass_ratio", "freq_ratio"],
    "properties": {
        "index": {"type": "integer", "minimum": 0},
        "g_i": NUMBER,
        "s_i": NUMBER,
        "u_i": OPTIONAL_NUMBER,
        "v_i": OPTIONAL_NUMBER,
        "t_i": NUMBER,
        "eps_i": NUMBER,
        "a_i": NUMBER,
        "b_i": NUMBER,
        "c_i": NUMBER,
        "mass_ratio": NUMBER,
        "freq_ratio": NUMBER,
    },
    "additionalProperties": False,
}

LOG_LEVEL_ROW = {
    "type": "object",
    "required": [
        "index", "t_i", "log_g_i", "log_s_i", "log_eps_i", "log_a_i", "log_b_i", "log_c_i",
        "log_mass_ratio", "log_freq_ratio",
    ],
    "properties": {
        "index": {"type": "integer", "minimum": 0},
        "t_i": NUMBER,
        "log_g_i": NUMBER,
        "log_s_i": NUMBER,
        "log_eps_i": NUMBER,
        "log_a_i": NUMBER,
        "log_b_i": NUMBER,
        "log_c_i": OPTIONAL_NUMBER,
        "log_mass_ratio": NUMBER,
        "log_freq_ratio": NUMBER,
    },
    "additionalProperties": False,
}

# float rows, or log rows when --log-domain is set or q^i would overflow
LEVELS = {"type": "array", "items": {"oneOf": [LEVEL_ROW, LOG_LEVEL_ROW]}}

_HEADER = {
    "command": {"type": "string"},
    "alpha": NUMBER,
    "beta": NUMBER,
    "regime": REGIME,
}

PARAMS_SCHEMA = {
    "type": "object",
    "required": ["command", "alpha", "beta", "regime", "k", "gamma", "g", "s", "q", "u", "v", "t", "d", "K", "eps0", "levels"],
    "properties": {
        **_HEADER,
        "k": NUMBER,
        "gamma": OPTIONAL_NUMBER,
        "g": NUMBER,
        "s": NUMBER,
        "q": NUMBER,
        "log_q": NUMBER,
        "u": OPTIONAL_NUMBER,
        "v": OPTIONAL_NUMBER,
        "t": NUMBER,
        "one_minus_t2": NUMBER,
        "d": OPTIONAL_NUMBER,
        "K": OPTIONAL_NUMBER,
        "eps0": NUMBER,
        "hyperbola": OPTIONAL_NUMBER,
        "partner_h1": {
            "type": "object",
            "required": ["p2", "x2", "constant"],
            "properties": {"p2": NUMBER, "x2": NUMBER, "constant": NUMBER},
        },
        "log_domain": {"type": "boolean"},
        "levels": LEVELS,
    },
}

SPECTRUM_SCHEMA = {
    "type": "object",
    "required": ["command", "alpha", "beta", "regime", "log_domain", "rows"],
    "properties": {
        **_HEADER,
        "log_domain": {"type": "boolean"},
        "rows": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["n"],
                "properties": {
                    "n": {"type": "integer", "minimum": 0},
                    "e_n": NUMBER,
                    "excitation": NUMBER,
                    "log_e_n": NUMBER,
                    "log_excitation": OPTIONAL_NUMBER,
                },
                "additionalProperties": False,
            },
        },
    },
}

EIGVEC_SCHEMA = {
    "type": "object",
    "required": ["command", "alpha", "beta", "regime", "n", "parity", "sigma_max", "tail_bound", "norm_squared", "coefficients"],
    "properties": {
        **_HEADER,
        "n": {"type": "integer", "minimum": 0},
        "parity": {"type": "string", "enum": ["even", "odd"]},
        "sigma_max": {"type": "integer", "minimum": 1},
        "tail_bound": {"type": "number", "minimum": 0},
        "norm_squared": NUMBER,
        "closed_form_norm": NUMBER,
        "coefficients": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["index", "value"],
                "properties": {"index": {"type": "integer", "minimum": 0}, "value": NUMBER},
                "additionalProperties": False,
            },
        },
    },
}

HIERARCHY_SCHEMA = {
    "type": "object",
    "required": ["command", "alpha", "beta", "regime", "levels"],
    "properties": {**_HEADER, "log_domain": {"type": "boolean"}, "levels": {**LEVELS, "minItems": 1}},
}

VERIFY_SCHEMA = {
    "type": "object",
    "required": ["command", "alpha", "beta", "regime", "passed", "checks"],
    "properties": {
        **_HEADER,
        "passed": {"type": "boolean"},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "status"],
                "properties": {
                    "name": {"type": "string"},
                    "status": {"type": "string", "enum": ["pass", "fail", "skipped", "error"]},
                    "residual": OPTIONAL_NUMBER,
                    "tolerance": OPTIONAL_NUMBER,
                    "detail": {"type": "string"},
                },
                "additionalProperties": False,
            },
        },
    },
}

SCHEMAS = {
    "params": PARAMS_SCHEMA,
    "spectrum": SPECTRUM_SCHEMA,
    "eigvec": EIGVEC_SCHEMA,
    "hierarchy": HIERARCHY_SCHEMA,
    "verify": VERIFY_SCHEMA,
}
