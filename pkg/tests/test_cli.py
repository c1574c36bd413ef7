import json

from photondistill import cli


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_ztl_m2_passes(capsys):
    code, out, _ = run_cli(capsys, "ztl", "--m", "2")
    assert code == 0
    assert "suppressed" in out
    assert "suppression holds: True" in out


def test_ztl_out_of_range_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "ztl", "--m", "7")
    assert code == 2
    assert "error" in err


def test_unknown_command_is_usage_error(capsys):
    assert run_cli(capsys, "frobnicate")[0] == 2


def test_ztl_records_are_json_lines(capsys):
    code, out, _ = run_cli(capsys, "ztl", "--m", "3", "--output-format", "records")
    assert code == 0
    lines = [json.loads(line) for line in out.strip().splitlines()]
    assert all(rec["schema"].startswith("photondistill.records/") for rec in lines)
    outcome_recs = [rec for rec in lines if rec["kind"] == "ztl-outcome"]
    assert len(outcome_recs) == 10


def test_distill_hom_eps0(capsys):
    code, out, _ = run_cli(capsys, "distill", "--protocol", "hom", "--eps", "0")
    assert code == 0
    assert "0.25" in out  # ideal success probability


def test_distill_hom_default_grid_slope(capsys):
    code, out, _ = run_cli(capsys, "distill", "--protocol", "hom")
    assert code == 0
    slope = float(out.strip().splitlines()[-1].split("=")[-1])
    assert abs(slope - 0.5) <= 0.02


def test_distill_fourier_slope_records(capsys):
    code, out, _ = run_cli(
        capsys, "distill", "--protocol", "fourier", "--m", "4",
        "--eps-grid", "0.001,0.01,0.1", "--output-format", "records",
    )
    assert code == 0
    recs = [json.loads(line) for line in out.strip().splitlines()]
    slope_rec = next(r for r in recs if r["kind"] == "distillation-slope")
    assert abs(slope_rec["slope"] - 0.25) <= 0.02


def test_distill_fourier_m8_capped(capsys):
    code, _, err = run_cli(capsys, "distill", "--protocol", "fourier", "--m", "8")
    assert code == 2
    assert "m <= 4" in err


def test_distill_tree(capsys):
    code, out, _ = run_cli(capsys, "distill", "--protocol", "tree", "--eps", "0.2")
    assert code == 0
    assert "V(final)" in out


def test_decompose_roundtrip_and_file(tmp_path, capsys):
    path = tmp_path / "c.circuit"
    code, out, _ = run_cli(
        capsys, "decompose", "--source", "random", "--m", "4", "--seed", "7",
        "--method", "reck", "--output-path", str(path),
    )
    assert code == 0
    assert "pairs=6" in out
    assert path.exists()
    from photondistill import circuits

    parsed = circuits.parse_circuit(path.read_text())
    assert parsed.mode_count == 4


def test_decompose_qfft_counts(tmp_path, capsys):
    path = tmp_path / "q.circuit"
    code, out, _ = run_cli(
        capsys, "decompose", "--source", "qft", "--m", "8", "--method", "qfft",
        "--output-path", str(path),
    )
    assert code == 0
    assert "pairs=12" in out


def test_decompose_qfft_rejects_non_power_of_two(capsys):
    code, _, err = run_cli(
        capsys, "decompose", "--source", "qft", "--m", "6", "--method", "qfft"
    )
    assert code == 2
    assert "power-of-two" in err


def test_compare_table(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "compare", "--m", "4")
    assert code == 0
    assert "qfft" in out and "clements" in out and "reck" in out


def test_compare_circuit_file(tmp_path, capsys):
    from photondistill import circuits, distillation

    path = tmp_path / "hom.circuit"
    path.write_text(circuits.serialize_circuit(distillation.protocol_cascaded_hom().circuit))
    code, out, _ = run_cli(capsys, "compare", "--circuit-file", str(path))
    assert code == 0
    assert "feed-forward" in out and "recirculating" in out


def test_mesh_render(capsys):
    code, out, _ = run_cli(capsys, "mesh-render", "--rows", "2", "--cols", "2")
    assert code == 0
    assert "[..]" in out


def test_output_is_deterministic(capsys):
    _, first, _ = run_cli(capsys, "ztl", "--m", "4", "--output-format", "records")
    _, second, _ = run_cli(capsys, "ztl", "--m", "4", "--output-format", "records")
    assert first == second
    _, t1, _ = run_cli(capsys, "compare", "--m", "4")
    _, t2, _ = run_cli(capsys, "compare", "--m", "4")
    assert t1 == t2


def test_verify_all_passes(capsys):
    code, out, _ = run_cli(capsys, "verify-all")
    assert code == 0
    assert "10/10 criteria passed" in out
