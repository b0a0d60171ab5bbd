import json
import os
import shlex

from unipotent_lab.cli import build_parser, main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def lines_to_dict(out):
    d = {}
    for line in out.strip().splitlines():
        key, _, value = line.partition(": ")
        d[key] = value
    return d


def test_filtration_refuted_with_witness(capsys):
    code, out = run(["filtration", "--word", "[x1,x2]", "--kind", "zassenhaus",
                     "--p", "2", "--n", "3"], capsys)
    assert code == 1
    rep = lines_to_dict(out)
    assert rep["verdict"] == "not-a-member"
    assert rep["witness.index"] == "(1,2)"
    assert rep["witness.matrix"] == "1,0,1;0,1,0;0,0,1"


def test_filtration_member(capsys):
    code, out = run(["filtration", "--word", "[x1,x2]", "--kind", "zassenhaus",
                     "--p", "2", "--n", "2"], capsys)
    assert code == 0
    assert lines_to_dict(out)["verdict"] == "member"


def test_witness_verb(capsys):
    code, out = run(["witness", "--word", "x1^3", "--kind", "p-central",
                     "--p", "3", "--n", "3"], capsys)
    assert code == 0
    rep = lines_to_dict(out)
    assert rep["witness.ring"] == "Zmod:3^2"
    assert rep["witness.corner"] == "3"
    code, _ = run(["witness", "--word", "e", "--kind", "zassenhaus",
                   "--p", "2", "--n", "3"], capsys)
    assert code == 1


def test_magnus(capsys):
    code, out = run(["magnus", "--word", "x1*x2", "--ring", "Z",
                     "--cutoff", "2"], capsys)
    assert code == 0
    assert lines_to_dict(out)["series"] == "1 + 1*X1 + 1*X2 + 1*X1X2"


def test_massey_example(capsys):
    code, out = run(["massey", "--group", "cyclic:3", "--p", "3", "--n", "3",
                     "--alphas", "id,id,id"], capsys)
    assert code == 0
    assert lines_to_dict(out)["verdict"] == "defined-not-vanishing"
    code, out = run(["massey", "--group", "cyclic:2", "--p", "2", "--n", "4",
                     "--alphas", "id,id,id,id"], capsys)
    assert code == 1
    assert lines_to_dict(out)["verdict"] == "undefined"


def test_appendix_verify(capsys):
    code, out = run(["appendix", "verify", "--p", "2", "--N", "9",
                     "--target", "u3f2"], capsys)
    assert code == 0
    rep = lines_to_dict(out)
    assert rep["verdict"] == "kernel 3-unipotent property FAILS"
    assert rep["witness"] == "x1^-1*x2^-1*x1*x2"

    code, out = run(["appendix", "verify", "--p", "2", "--N", "4",
                     "--target", "u3f2"], capsys)
    assert code == 1
    assert lines_to_dict(out)["verdict"] == "inconclusive"


def test_series_and_figures(tmp_path, capsys):
    figdir = str(tmp_path / "figs")
    code, out = run(["series", "--group", "u3f2", "--kind", "p-central",
                     "--p", "2", "--figures", figdir], capsys)
    assert code == 0
    rep = lines_to_dict(out)
    assert rep["levels"] == "8,2,1"
    assert os.path.exists(rep["figure"]) and rep["figure"].endswith(".png")
    assert os.path.getsize(rep["figure"]) > 0
    with open(rep["table"], encoding="utf-8") as fh:
        assert fh.read() == "level,order\n1,8\n2,2\n3,1\n"


def test_compare_with_figures(tmp_path, capsys):
    figdir = str(tmp_path / "figs")
    code, out = run(["compare", "--group", "mpks:p=3,k=1,s=1", "--p", "3",
                     "--max-level", "4", "--figures", figdir], capsys)
    assert code == 0
    rep = lines_to_dict(out)
    assert rep["verdict"] == "inclusions-hold"
    assert os.path.exists(rep["figure"])
    assert os.path.exists(rep["table"])


def test_homs_with_presentation_file(tmp_path, capsys):
    path = tmp_path / "pres.txt"
    path.write_text("rank 1\nx1^2\n")
    code, out = run(["homs", "--presentation", str(path),
                     "--target", "cyclic:4"], capsys)
    assert code == 0
    rep = lines_to_dict(out)
    assert rep["count"] == "2"
    assert rep["hom.0"] == "0" and rep["hom.1"] == "2"


def test_conjugator(capsys):
    code, out = run(["conjugator", "--target", "power", "--p", "3", "--s", "1",
                     "--k", "1"], capsys)
    assert code == 0
    rep = lines_to_dict(out)
    assert rep["relation-verified"] == "true"
    assert rep["order-A"] == "3"


def test_family_and_separate(capsys):
    code, out = run(["family", "--desc", "mpks:p=3,k=1,s=1"], capsys)
    assert code == 0
    rep = lines_to_dict(out)
    assert rep["order"] == "27" and rep["exponent"] == "9"

    code, out = run(["separate", "--family", "rigid:p=3,s=1,k=1,m=1,variant=split",
                     "--element", "1;0"], capsys)
    assert code == 0
    rep = lines_to_dict(out)
    assert rep["case"] == "2"
    assert rep["hom-verified"] == "true"

    code, _ = run(["separate", "--family", "rigid:p=3,s=1,k=1,m=1,variant=split",
                   "--element", "0;0"], capsys)
    assert code == 1


def test_kernel_verify(capsys):
    code, out = run(["kernel-verify", "--family",
                     "demushkin:type=3,p=2,s=1", "--n", "3"], capsys)
    assert code == 0
    assert lines_to_dict(out)["verdict"] == "kernel-property-holds"


def test_cross_check(capsys):
    code, out = run(["cross-check", "--group", "cyclic:3", "--p", "3",
                     "--n", "3", "--alphas", "id,id,id"], capsys)
    assert code == 0
    assert lines_to_dict(out)["verdict"] == "agree"


def test_multi_generator_characters(capsys):
    # The cup square of the projection character classifies Z/4, so the
    # triple product on Z/2 x Z/2 is undefined: exit 1.
    code, out = run(["massey", "--group", "abelian:2,2", "--p", "2", "--n", "3",
                     "--alphas", "1:0,1:0,1:0"], capsys)
    assert code == 1
    rep = lines_to_dict(out)
    assert rep["verdict"] == "undefined"
    # Non-additive generator values are rejected as usage errors.
    assert main(["massey", "--group", "cyclic:2", "--p", "3", "--n", "3",
                 "--alphas", "1,1,1"]) == 2
    capsys.readouterr()


def test_embed(capsys):
    code, out = run(["embed", "--p", "3", "--group", "mp3"], capsys)
    assert code == 0
    rep = lines_to_dict(out)
    assert rep["verdict"] == "minimal-embedding"
    assert rep["exponent-below"] == "3"


def test_exit_codes_for_errors(capsys):
    # Usage errors: 2.
    assert main(["filtration", "--word", "x1"]) == 2  # missing args
    assert main(["magnus", "--word", "x1*", "--cutoff", "2"]) == 2
    assert main(["massey", "--group", "cyclic:3", "--p", "3", "--n", "3",
                 "--alphas", "id,id"]) == 2
    capsys.readouterr()


def test_budget_exit_code(tmp_path, capsys):
    cfg = tmp_path / "caps.json"
    cfg.write_text(json.dumps({"max_group_size": 10}))
    code = main(["series", "--group", "u4f3", "--kind", "zassenhaus",
                 "--p", "3", "--config", str(cfg)])
    assert code == 3
    capsys.readouterr()


def test_config_env_var(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "caps.json"
    cfg.write_text(json.dumps({"max_group_size": 10}))
    monkeypatch.setenv("UNIPOTENT_LAB_CONFIG", str(cfg))
    code = main(["series", "--group", "u4f3", "--kind", "zassenhaus", "--p", "3"])
    assert code == 3
    capsys.readouterr()


def test_reports_byte_stable(capsys):
    commands = [
        ["filtration", "--word", "[x1,x2]", "--kind", "zassenhaus",
         "--p", "2", "--n", "3"],
        ["massey", "--group", "cyclic:3", "--p", "3", "--n", "3",
         "--alphas", "id,id,id"],
        ["appendix", "verify", "--p", "2", "--N", "9", "--target", "u3f2"],
        ["conjugator", "--target", "power", "--p", "3", "--s", "1", "--k", "1"],
        ["magnus", "--word", "x1*x2", "--ring", "Fp:2", "--cutoff", "2",
         "--format", "json"],
    ]
    for argv in commands:
        _, first = run(argv, capsys)
        _, second = run(argv, capsys)
        assert first == second
        assert "elapsed-ms" not in first


def test_timings_flag(capsys):
    argv = ["magnus", "--word", "x1", "--cutoff", "1", "--timings"]
    _, out = run(argv, capsys)
    assert "elapsed-ms: " in out


def test_json_format(capsys):
    code, out = run(["magnus", "--word", "x1*x2", "--ring", "Fp:2",
                     "--cutoff", "2", "--format", "json"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == 1
    assert data["series"] == "1 + 1*X1 + 1*X2 + 1*X1X2"


def test_command_echo_round_trip(capsys):
    parser = build_parser()
    argvs = [
        ["filtration", "--word", "[x1,x2]", "--kind", "zassenhaus", "--p", "2",
         "--n", "3"],
        ["massey", "--group", "cyclic:3", "--p", "3", "--n", "3",
         "--alphas", "id,id,id"],
        ["series", "--group", "u3f2", "--kind", "p-central", "--p", "2"],
    ]
    for argv in argvs:
        _, out = run(argv, capsys)
        echoed = lines_to_dict(out)["command"]
        assert vars(parser.parse_args(shlex.split(echoed))) == \
            vars(parser.parse_args(argv))


def test_threads_flag_validated(capsys):
    assert main(["magnus", "--word", "x1", "--cutoff", "1", "--threads", "0"]) == 2
    assert main(["magnus", "--word", "x1", "--cutoff", "1", "--threads", "4"]) == 0
    capsys.readouterr()
