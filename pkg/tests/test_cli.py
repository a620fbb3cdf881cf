import json
import pathlib
import subprocess
import sys

import numpy as np
import pytest

FIXTURES = pathlib.Path(__file__).resolve().parents[1] / "fixtures"


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "qact", *args],
        capture_output=True, text=True, timeout=300,
    )


def test_fixture_corpus_exists():
    assert (FIXTURES / "backends" / "s3.json").exists(), (
        "regenerate with: python -m qact.fixtures fixtures"
    )


@pytest.mark.parametrize("args", [
    ("validate", "--backend", "backends/s3.json",
     "--input", "functors/spectral_s3_translation.json"),
    ("validate-graded", "--input", "bundles/clock_shift_z3.json"),
    ("validate-graded", "--input", "bundles/zero_odd.json"),
    ("build", "--backend", "backends/z2.json",
     "--input", "functors/spectral_swap_c2.json"),
    ("spectral", "--backend", "backends/s3.json",
     "--input", "actions/s3_translation.json"),
    ("spectral", "--backend", "backends/dual_s3.json",
     "--input", "actions/s3_group_algebra.json"),
    ("roundtrip", "--backend", "backends/z2.json", "--input", "actions/swap_c2.json"),
    ("roundtrip", "--backend", "backends/dual_z3.json",
     "--input", "actions/m3_clock_shift.json"),
    ("module-functor", "--backend", "backends/z2.json",
     "--input", "actions/inner_m2.json"),
    ("fullness", "--backend", "backends/z2.json", "--input", "actions/swap_c2.json"),
    ("cocycle-check", "--backend", "backends/dual_z2z2.json",
     "--input", "cocycles/bicharacter_z2z2.json"),
    ("cocycle-check", "--backend", "backends/z2z2.json",
     "--input", "cocycles/group_bicharacter_z2z2.json"),
    ("deform", "--backend", "backends/dual_z2z2.json",
     "--input", "actions/z2z2_group_algebra.json",
     "--input", "cocycles/bicharacter_z2z2.json", "--cross-test"),
])
def test_verbs_pass_on_fixtures(args, tmp_path):
    full = []
    for a in args:
        if a.endswith(".json"):
            full.append(str(FIXTURES / a))
        else:
            full.append(a)
    report = tmp_path / "report.json"
    proc = run_cli(*full, "--report", str(report))
    assert proc.returncode == 0, proc.stdout + proc.stderr
    data = json.loads(report.read_text())
    assert data["schema"] == "report.v1"


def test_missing_file_is_input_error(tmp_path):
    proc = run_cli("roundtrip", "--backend", str(FIXTURES / "backends/z2.json"),
                   "--input", str(tmp_path / "nope.json"))
    assert proc.returncode == 2
    assert "error" in json.loads(proc.stdout)


def test_bad_json_is_input_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    proc = run_cli("validate-graded", "--input", str(bad))
    assert proc.returncode == 2


def test_validation_failure_is_exit_one(tmp_path):
    # perturb one stored tensor of a good functor file
    src = json.loads((FIXTURES / "functors/spectral_s3_translation.json").read_text())
    entry = next(e for e in src["phi"]
                 if (e["alpha"], e["beta"], e["gamma"]) == ("std", "std", "std"))
    entry["tensor"][0][0][0][0] += 1e-3
    bad = tmp_path / "broken.json"
    bad.write_text(json.dumps(src))
    proc = run_cli("validate", "--backend", str(FIXTURES / "backends/s3.json"),
                   "--input", str(bad))
    assert proc.returncode == 1
    data = json.loads(proc.stdout)
    assert not data["validation"]["passed"]


def test_wrong_inputs_count(tmp_path):
    proc = run_cli("deform", "--backend", str(FIXTURES / "backends/dual_z2z2.json"),
                   "--input", str(FIXTURES / "actions/z2z2_group_algebra.json"))
    assert proc.returncode == 2


def test_reports_are_byte_identical(tmp_path):
    # fresh interpreter per run: any hash-order dependence would show up here
    args = ("roundtrip", "--backend", str(FIXTURES / "backends/s3.json"),
            "--input", str(FIXTURES / "actions/s3_translation.json"),
            "--seed", "0")
    r1 = tmp_path / "r1.json"
    r2 = tmp_path / "r2.json"
    assert run_cli(*args, "--report", str(r1)).returncode == 0
    assert run_cli(*args, "--report", str(r2)).returncode == 0
    assert r1.read_bytes() == r2.read_bytes()


def test_backend_files_roundtrip_exactly():
    # serialization is exact at double precision
    from qact import serialize
    from qact.fixtures import standard_backends

    for name, backend in standard_backends().items():
        data = serialize.backend_to_json(backend)
        again = serialize.backend_to_json(serialize.backend_from_json(data))
        assert json.dumps(data, sort_keys=True) == json.dumps(again, sort_keys=True)


def test_functor_file_roundtrip(tmp_path):
    from qact import serialize
    from qact.fixtures import standard_backends, action_corpus
    from qact.actions import spectral_functor

    backends = standard_backends()
    bk, act = action_corpus()["swap_c2"]
    functor = spectral_functor(backends[bk], act).functor
    data = serialize.functor_to_json(functor)
    loaded = serialize.functor_from_json(data, backends[bk])
    for label in backends[bk].labels:
        np.testing.assert_array_equal(
            loaded.module(label).inner_tensor, functor.module(label).inner_tensor
        )
    for key in functor.phi:
        for t1, t2 in zip(functor.phi[key], loaded.phi[key]):
            np.testing.assert_array_equal(t1, t2)


def test_deform_group_backend_cli(tmp_path):
    report = tmp_path / "r.json"
    proc = run_cli(
        "deform",
        "--backend", str(FIXTURES / "backends/z2z2.json"),
        "--input", str(FIXTURES / "actions/z2z2_translation.json"),
        "--input", str(FIXTURES / "cocycles/group_bicharacter_z2z2.json"),
        "--cross-test", "--report", str(report),
    )
    assert proc.returncode == 0, proc.stdout + proc.stderr
    data = json.loads(report.read_text())
    assert data["cross_test"]["passed"]
    assert data["center_dimension"] == 1


def test_failing_cocycle_exits_one(tmp_path):
    import numpy as np

    from qact import serialize
    from qact.cocycles import Cocycle
    from qact.groups import cyclic_group, direct_product

    group = direct_product(cyclic_group(2), cyclic_group(2))
    rng = np.random.default_rng(1)
    vals = np.exp(2j * np.pi * rng.random((4, 4)))
    vals = vals / vals[group.identity, group.identity]
    bad = Cocycle("dual", group, vals, vals)
    path = tmp_path / "bad_cocycle.json"
    serialize.dump_json(serialize.cocycle_to_json(bad), path)
    proc = run_cli("cocycle-check",
                   "--backend", str(FIXTURES / "backends/dual_z2z2.json"),
                   "--input", str(path))
    assert proc.returncode == 1
    data = json.loads(proc.stdout)
    assert not data["cocycle"]["passed"]
    assert data["cocycle"]["worst_triple"] is not None


def test_project_word_unknown_label_is_error():
    import numpy as np
    import pytest as _pytest

    from qact.fixtures import standard_backends, action_corpus
    from qact.actions import spectral_functor
    from qact.reconstruction import build_algebra
    from qact.repcat import BackendError

    backends = standard_backends()
    bk, act = action_corpus()["swap_c2"]
    alg = build_algebra(spectral_functor(backends[bk], act).functor, validate=False)
    with _pytest.raises(BackendError):
        alg.project_word((("nope", False),), np.zeros((1, 1)))


def test_kind_mismatch_is_input_error():
    proc = run_cli("deform",
                   "--backend", str(FIXTURES / "backends/dual_z2z2.json"),
                   "--input", str(FIXTURES / "actions/z2z2_group_algebra.json"),
                   "--input", str(FIXTURES / "cocycles/group_bicharacter_z2z2.json"))
    assert proc.returncode == 2
    assert "error" in json.loads(proc.stdout)


def test_tolerance_override_changes_verdict(tmp_path):
    src = json.loads((FIXTURES / "functors/spectral_s3_translation.json").read_text())
    entry = next(e for e in src["phi"]
                 if (e["alpha"], e["beta"], e["gamma"]) == ("std", "std", "std"))
    entry["tensor"][0][0][0][0] += 1e-3
    path = tmp_path / "near.json"
    path.write_text(json.dumps(src))
    tight = run_cli("validate", "--backend", str(FIXTURES / "backends/s3.json"),
                    "--input", str(path), "--tolerance", "1e-9")
    loose = run_cli("validate", "--backend", str(FIXTURES / "backends/s3.json"),
                    "--input", str(path), "--tolerance", "1.0")
    assert tight.returncode == 1
    assert loose.returncode == 0
