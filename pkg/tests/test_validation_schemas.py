from analysis.validation_schemas import ValidationSchemas


def _report(**overrides):
    report = {
        "mode": "eigen", "p": 2.0, "dim": 3, "n": 64, "objective": 0.1, "lambda": 3.0, "c0": None,
        "iterations": 12, "converged": True, "weak_residual_max": 1e-6, "min_value": 0.4,
        "min_interior_slope": 0.01, "nehari_residual": None, "wall_time_ms": 5.0,
    }
    report.update(overrides)
    return report


def test_valid_report():
    assert ValidationSchemas.validate_report(_report()) == (True, [])


def test_report_errors_name_the_field():
    is_valid, errors = ValidationSchemas.validate_report(_report(mode="mountain_pass", iterations=-1))
    assert not is_valid
    assert any(error.startswith("mode:") for error in errors)
    assert any(error.startswith("iterations:") for error in errors)


def test_missing_report_field():
    report = _report()
    del report["wall_time_ms"]
    is_valid, errors = ValidationSchemas.validate_report(report)
    assert not is_valid and errors[0].startswith("root:")


def test_config_schema():
    good = {"mode": "fixed", "p": 3.0, "weight": {"kind": "power", "alpha": 2.0}, "nonlin": {"q": 3.0},
            "sweep": [{"grid_n": 257}, {"p": 2.5}]}
    assert ValidationSchemas.validate_config(good) == (True, [])

    is_valid, errors = ValidationSchemas.validate_config({"weight": {"kind": "gaussian"}, "shoot_bracket": [1.0]})
    assert not is_valid
    assert any(error.startswith("weight.kind:") for error in errors)
    assert any(error.startswith("shoot_bracket:") for error in errors)
