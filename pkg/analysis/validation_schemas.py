from typing import Any, Dict, List

from jsonschema import Draft7Validator

_NULLABLE_NUMBER = {"type": ["number", "null"]}


class ValidationSchemas:
    """JSON schemas for run configuration files and emitted reports."""

    WEIGHT_SCHEMA = {
        "type": "object",
        "properties": {
            "kind": {
                "type": "string",
                "enum": ["power", "affine", "exp", "constant"],
                "description": "Weight family"
            },
            "alpha": {"type": "number", "minimum": 0, "description": "Power weight exponent"},
            "beta": {"type": "number", "exclusiveMinimum": 0, "description": "Affine / exponential slope"},
            "c": {"type": "number", "exclusiveMinimum": 0, "description": "Constant weight value"}
        },
        "additionalProperties": False
    }

    NONLIN_SCHEMA = {
        "type": "object",
        "properties": {
            "kind": {"type": "string", "enum": ["power"]},
            "q": {"type": "number", "exclusiveMinimum": 0, "description": "Exponent of f(s) = s^q"}
        },
        "additionalProperties": False
    }

    OVERRIDE_PROPERTIES = {
        "dim": {"type": "integer", "minimum": 1},
        "p": {"type": "number"},
        "weight": WEIGHT_SCHEMA,
        "nonlin": NONLIN_SCHEMA,
        "nonlinearity": NONLIN_SCHEMA,
        "mode": {"type": "string", "enum": ["eigen", "fixed", "shoot", "verify"]},
        "grid_n": {"type": "integer", "minimum": 3},
        "n": {"type": "integer", "minimum": 3},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "max_iter": {"type": "integer", "minimum": 1},
        "allow_constant_weight": {"type": "boolean"},
        "lambda": {"type": "number", "exclusiveMinimum": 0},
        "shoot_bracket": {
            "type": "array",
            "items": {"type": "number", "exclusiveMinimum": 0},
            "minItems": 2,
            "maxItems": 2
        },
    }

    CONFIG_SCHEMA = {
        "type": "object",
        "properties": {
            **OVERRIDE_PROPERTIES,
            "output_path": {"type": "string", "minLength": 1},
            "output": {"type": "string", "minLength": 1},
            "emit_profile": {"type": "boolean"},
            "profile_path": {"type": ["string", "null"]},
            "sweep": {
                "type": ["array", "null"],
                "items": {
                    "type": "object",
                    "properties": OVERRIDE_PROPERTIES,
                    "additionalProperties": False
                },
                "description": "Parameter overrides, one run per entry"
            }
        },
        "additionalProperties": False
    }

    REPORT_SCHEMA = {
        "type": "object",
        "properties": {
            "mode": {"type": "string", "enum": ["eigen", "fixed", "shoot", "verify"]},
            "p": {"type": "number", "exclusiveMinimum": 1},
            "dim": {"type": "integer", "minimum": 3},
            "n": {"type": "integer", "minimum": 3},
            "objective": _NULLABLE_NUMBER,
            "lambda": _NULLABLE_NUMBER,
            "c0": _NULLABLE_NUMBER,
            "iterations": {"type": "integer", "minimum": 0},
            "converged": {"type": "boolean"},
            "weak_residual_max": _NULLABLE_NUMBER,
            "min_value": _NULLABLE_NUMBER,
            "min_interior_slope": _NULLABLE_NUMBER,
            "nehari_residual": _NULLABLE_NUMBER,
            "wall_time_ms": {"type": "number", "minimum": 0},
            "initial_height": _NULLABLE_NUMBER,
            "terminal_flux": _NULLABLE_NUMBER,
            "error": {"type": "string"}
        },
        "required": [
            "mode", "p", "dim", "n", "objective", "lambda", "c0", "iterations", "converged",
            "weak_residual_max", "min_value", "min_interior_slope", "nehari_residual", "wall_time_ms"
        ],
        "additionalProperties": True
    }

    @classmethod
    def validate_structure(cls, data: Any, schema: Dict[str, Any]) -> tuple[bool, List[str]]:
        """
        Validate data against schema.

        Returns:
            Tuple of (is_valid, list_of_errors)
        """
        try:
            validator = Draft7Validator(schema)
            errors = list(validator.iter_errors(data))

            if not errors:
                return True, []

            error_messages = []
            for error in errors:
                path = ".".join(str(p) for p in error.path) if error.path else "root"
                error_messages.append(f"{path}: {error.message}")

            return False, error_messages

        except Exception as e:
            return False, [f"Schema validation error: {str(e)}"]

    @classmethod
    def validate_config(cls, data: Any) -> tuple[bool, List[str]]:
        return cls.validate_structure(data, cls.CONFIG_SCHEMA)

    @classmethod
    def validate_report(cls, data: Any) -> tuple[bool, List[str]]:
        return cls.validate_structure(data, cls.REPORT_SCHEMA)
