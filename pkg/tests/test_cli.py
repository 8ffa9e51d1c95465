"""Configuration handling, CLI verbs, output files, determinism."""
import math
from pathlib import Path

import pytest

from fewbody.cli import (
    AssertionResult,
    ExperimentConfig,
    RunReport,
    apply_overrides,
    main,
    parse_config,
    run_verify,
    serialize_config,
)

LOW_RES = ["--set", "nx=64", "--set", "ny=64"]


def test_config_round_trip_is_exact() -> None:
    config = ExperimentConfig(
        name="probe",
        geometry="rectangle",
        a=2.0,
        b=2.2,
        particles=4,
        c1_magnitude=0.1,
        c1_phase=math.pi / 8,
        c2_magnitude=1.0,
        c2_phase=-math.pi / 8,
        nx=96,
        ny=128,
        conditioning_points=((1.0, -1.1), (0.3, 0.7)),
        theta=0.7853981634,
    )
    assert parse_config(serialize_config(config)) == config


def test_parse_config_skips_comments_and_blanks() -> None:
    text = "# comment\n\nname = demo\n  a = 1.5\n"
    config = parse_config(text)
    assert config.name == "demo"
    assert config.a == 1.5


def test_parse_config_rejects_unknown_keys_and_bad_lines() -> None:
    with pytest.raises(ValueError):
        parse_config("unknown_key = 1\n")
    with pytest.raises(ValueError):
        parse_config("just words\n")


def test_apply_overrides_coerces_types() -> None:
    config = apply_overrides(
        ExperimentConfig(),
        ["nx=128", "a=3.25", "conditioning_points=0.5,1.5; -1,0"],
    )
    assert config.nx == 128
    assert config.a == 3.25
    assert config.conditioning_points == ((0.5, 1.5), (-1.0, 0.0))
    with pytest.raises(ValueError):
        apply_overrides(ExperimentConfig(), ["bogus=1"])
    with pytest.raises(ValueError):
        apply_overrides(ExperimentConfig(), ["no_equals"])


def test_run_report_rendering() -> None:
    report = RunReport(
        name="demo",
        inputs=(("key", "value"),),
        assertions=(
            AssertionResult("good", True, "fine"),
            AssertionResult("bad", False, "broken"),
        ),
    )
    text = report.render()
    assert "[PASS] good  (fine)" in text
    assert "[FAIL] bad  (broken)" in text
    assert text.endswith("RESULT: FAIL")
    assert not report.passed


HOM_CASES = [
    ("boson", "optical", "HH"),
    ("boson", "optical", "VV"),
    ("boson", "optical", "HV-sym"),
    ("boson", "optical", "HV-antisym"),
    ("fermion", "optical", "HH"),
    ("fermion", "optical", "triplet0"),
    ("fermion", "optical", "singlet"),
    ("boson", "atomic", "aa"),
    ("boson", "atomic", "ab-sym"),
    ("boson", "atomic", "ab-antisym"),
]


@pytest.mark.parametrize("statistics,convention,name", HOM_CASES)
def test_hom_verb_reproduces_reference_outcomes(
    statistics: str, convention: str, name: str, capsys
) -> None:
    code = main(
        [
            "hom",
            "--statistics",
            statistics,
            "--convention",
            convention,
            "--input",
            name,
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "RESULT: PASS" in out
    assert "[FAIL]" not in out


def test_hom_accepts_truncated_balanced_angle(capsys) -> None:
    code = main(
        [
            "hom",
            "--statistics",
            "fermion",
            "--input",
            "singlet",
            "--theta",
            "0.7853981634",
        ]
    )
    assert code == 0
    assert "RESULT: PASS" in capsys.readouterr().out


def test_hom_eigenstate_input_passes_at_any_angle(capsys) -> None:
    code = main(
        ["hom", "--statistics", "fermion", "--input", "HH", "--theta", "0.9"]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "RESULT: PASS" in out


def test_verify_verb_all_green(capsys) -> None:
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 12
    assert "[FAIL]" not in out


def test_verify_reports_exact_prefactors() -> None:
    report = run_verify()
    labels = {a.label: a for a in report.assertions}
    for n in (3, 4):
        entry = labels[f"spin-trace prefactors (n={n})"]
        assert entry.passed
        assert "1.500000" in entry.detail
        assert "-0.866025" in entry.detail


def density_args(out_dir: Path, extra: list[str] | None = None) -> list[str]:
    return [
        "density",
        "--geometry",
        "triangle",
        "--name",
        "fig",
        "--output-dir",
        str(out_dir),
        *LOW_RES,
        *(extra or []),
    ]


def test_density_verb_triangle(tmp_path: Path, capsys) -> None:
    code = main(density_args(tmp_path))
    out = capsys.readouterr().out
    assert code == 0
    assert "RESULT: PASS" in out
    for stem in ("fig_single.csv", "fig_single.pgm"):
        assert (tmp_path / stem).exists()
    for idx in (1, 2, 3):  # one conditional map per site center
        assert (tmp_path / f"fig_conditional_{idx}.csv").exists()
        assert (tmp_path / f"fig_conditional_{idx}.ppm").exists()
    header = (tmp_path / "fig_single.csv").read_text().splitlines()[0]
    assert header == "# -6.0 6.0 -6.0 6.0 64 64"
    assert (tmp_path / "fig_single.pgm").read_bytes()[:2] == b"P5"
    assert (tmp_path / "fig_conditional_1.ppm").read_bytes()[:2] == b"P6"


def test_density_verb_is_deterministic(tmp_path: Path, capsys) -> None:
    dir_a = tmp_path / "a"
    dir_b = tmp_path / "b"
    assert main(density_args(dir_a)) == 0
    assert main(density_args(dir_b)) == 0
    capsys.readouterr()
    for name in ("fig_single.csv", "fig_single.pgm", "fig_conditional_2.csv"):
        assert (dir_a / name).read_bytes() == (dir_b / name).read_bytes()


def test_density_rectangle_defaults_to_four_particles(tmp_path: Path, capsys) -> None:
    code = main(
        [
            "density",
            "--geometry",
            "rectangle",
            "--name",
            "rect",
            "--output-dir",
            str(tmp_path),
            *LOW_RES,
        ]
    )
    assert code == 0
    assert "RESULT: PASS" in capsys.readouterr().out
    assert (tmp_path / "rect_conditional_4.csv").exists()


def test_density_square_writes_opposed_flux_fields(tmp_path: Path, capsys) -> None:
    code = main(
        [
            "density",
            "--geometry",
            "rectangle",
            "--a",
            "2.0",
            "--b",
            "2.0",
            "--name",
            "sq",
            "--output-dir",
            str(tmp_path),
            *LOW_RES,
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "RESULT: PASS" in out
    assert (tmp_path / "sq_flux_plus.csv").exists()
    assert (tmp_path / "sq_flux_minus.csv").exists()
    header = (tmp_path / "sq_flux_plus.csv").read_text().splitlines()[0]
    assert header == "# -6.0 6.0 -6.0 6.0 64 64"


def test_density_balance_assertion(tmp_path: Path, capsys) -> None:
    code = main(
        [
            "density",
            "--geometry",
            "rectangle",
            "--name",
            "bal",
            "--output-dir",
            str(tmp_path),
            *LOW_RES,
            "--set",
            "c2_magnitude=1.0",
            "--set",
            "c1_phase=0.392699",
            "--set",
            "c2_phase=-0.392699",
        ]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "densities agree at balance" in out
    assert "RESULT: PASS" in out


def test_density_rejects_mismatched_particle_count(tmp_path: Path) -> None:
    with pytest.raises(ValueError):
        main(
            [
                "density",
                "--geometry",
                "triangle",
                "--particles",
                "4",
                "--output-dir",
                str(tmp_path),
            ]
        )


def test_environment_variable_overrides_output_dir(
    tmp_path: Path, capsys, monkeypatch
) -> None:
    env_dir = tmp_path / "from_env"
    monkeypatch.setenv("FEWBODY_OUTPUT_DIR", str(env_dir))
    code = main(["density", "--geometry", "triangle", "--name", "env", *LOW_RES])
    capsys.readouterr()
    assert code == 0
    assert (env_dir / "env_single.csv").exists()


def test_explicit_output_dir_beats_environment(
    tmp_path: Path, capsys, monkeypatch
) -> None:
    monkeypatch.setenv("FEWBODY_OUTPUT_DIR", str(tmp_path / "ignored"))
    explicit = tmp_path / "explicit"
    code = main(density_args(explicit))
    capsys.readouterr()
    assert code == 0
    assert (explicit / "fig_single.csv").exists()
    assert not (tmp_path / "ignored").exists()


def test_config_file_feeds_the_run(tmp_path: Path, capsys) -> None:
    config = ExperimentConfig(
        name="filed", geometry="triangle", nx=64, ny=64, output_dir=str(tmp_path)
    )
    path = tmp_path / "run.cfg"
    path.write_text(serialize_config(config))
    code = main(["density", "--config", str(path)])
    capsys.readouterr()
    assert code == 0
    assert (tmp_path / "filed_single.csv").exists()
