"""CLI behavior: exit codes, JSON output, store selection via environment."""

import json

import pytest

from worldgen.cli import main
from worldgen.seeddb import build_default_bundle


@pytest.fixture(scope="module")
def bundle_path(tmp_path_factory):
    return build_default_bundle(tmp_path_factory.mktemp("cli-bundle") / "models.amb")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestGenerate:
    def test_prompt_generate(self, tmp_path, bundle_path, capsys):
        code, out, _ = run(capsys, "generate",
                           "--prompt", "2 worlds, difficulty levels 1 to 2",
                           "--seed", "3", "--store", str(tmp_path),
                           "--bundle", str(bundle_path))
        assert code == 0
        doc = json.loads(out)
        assert len(doc["worldIds"]) == 2
        for wid in doc["worldIds"]:
            assert (tmp_path / wid / "world.svg").is_file()

    def test_graph_generate(self, tmp_path, bundle_path, capsys):
        graph = {
            "version": "1",
            "rooms": [{"id": "a", "category": "room", "assets": []},
                      {"id": "b", "category": "room", "assets": []}],
            "edges": [["a", "b"]],
            "external_doorways": ["a"],
            "context": "generic",
            "difficulty": 1,
        }
        gpath = tmp_path / "graph.json"
        gpath.write_text(json.dumps(graph))
        code, out, _ = run(capsys, "generate", "--graph", str(gpath),
                           "--store", str(tmp_path / "store"),
                           "--bundle", str(bundle_path))
        assert code == 0
        assert len(json.loads(out)["worldIds"]) == 1

    def test_missing_input_exits_1(self, tmp_path, bundle_path, capsys):
        code, _, err = run(capsys, "generate", "--store", str(tmp_path),
                           "--bundle", str(bundle_path))
        assert code == 1
        assert "prompt" in err

    def test_store_from_environment(self, tmp_path, bundle_path, capsys,
                                    monkeypatch):
        monkeypatch.setenv("WORLDGEN_STORE", str(tmp_path / "envstore"))
        monkeypatch.chdir(tmp_path)
        code, out, _ = run(capsys, "generate", "--prompt", "1 world",
                           "--bundle", str(bundle_path))
        assert code == 0
        wid = json.loads(out)["worldIds"][0]
        assert (tmp_path / "envstore" / wid).is_dir()

    def test_engine_error_exits_2(self, tmp_path, bundle_path, capsys):
        gpath = tmp_path / "bad.json"
        gpath.write_text(json.dumps({"version": "1", "rooms": [], "edges": [],
                                     "external_doorways": [], "context": "generic",
                                     "difficulty": 1}))
        code, _, err = run(capsys, "generate", "--graph", str(gpath),
                           "--store", str(tmp_path), "--bundle", str(bundle_path))
        assert code == 2
        assert "error" in err


class TestDb:
    def test_query(self, bundle_path, capsys):
        code, out, _ = run(capsys, "db", "query", "red chair",
                           "--bundle", str(bundle_path), "--k", "3")
        assert code == 0
        lines = [l for l in out.splitlines() if l.strip()]
        assert len(lines) == 3
        assert "chair" in lines[0]

    def test_build_from_manifests(self, tmp_path, capsys):
        from worldgen.seeddb import generate_seed_manifests

        src = generate_seed_manifests(tmp_path / "m")
        code, out, _ = run(capsys, "db", "build", "--manifest", str(src),
                           "--out", str(tmp_path / "out.amb"))
        assert code == 0
        assert (tmp_path / "out.amb").is_file()

    def test_unknown_subcommand_exits_1(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["db", "frobnicate"])
        assert exc.value.code == 1


class TestExtractEvalValidate:
    def test_extract_round_trip(self, tmp_path, capsys):
        annotation = {
            "rooms": [{"id": "a", "category": "room",
                       "polygon": [[0, 0], [4, 0], [4, 3], [0, 3]]}],
            "assets": [],
            "doorways": [{"a": [1.0, 0], "b": [1.9, 0]}],
            "context": "generic",
        }
        apath = tmp_path / "ann.json"
        apath.write_text(json.dumps(annotation))
        code, out, _ = run(capsys, "extract", str(apath))
        assert code == 0
        doc = json.loads(out)
        assert doc["rooms"][0]["id"] == "a"
        assert doc["external_doorways"] == ["a"]

    def test_extract_invalid_exits_2(self, tmp_path, capsys):
        apath = tmp_path / "ann.json"
        apath.write_text(json.dumps({"rooms": [], "assets": [], "doorways": []}))
        code, _, err = run(capsys, "extract", str(apath))
        assert code == 2

    def test_eval_and_validate(self, tmp_path, bundle_path, capsys):
        code, out, _ = run(capsys, "generate", "--prompt", "1 world",
                           "--seed", "9", "--store", str(tmp_path),
                           "--bundle", str(bundle_path))
        assert code == 0
        wid = json.loads(out)["worldIds"][0]

        code, out, _ = run(capsys, "eval", "--store", str(tmp_path))
        assert code == 0
        assert out.startswith("world_id,level")

        code, out, _ = run(capsys, "validate", str(tmp_path / wid))
        assert code == 0
        assert out.strip() == "ok"

    def test_validate_reports_violations(self, tmp_path, bundle_path, capsys):
        code, out, _ = run(capsys, "generate", "--prompt", "1 world",
                           "--seed", "10", "--store", str(tmp_path),
                           "--bundle", str(bundle_path))
        wid = json.loads(out)["worldIds"][0]
        # corrupt a placement so two hulls overlap
        ppath = tmp_path / wid / "placements.json"
        docs = json.loads(ppath.read_text())
        if len(docs) >= 2:
            docs[1]["world_hull"] = docs[0]["world_hull"]
            ppath.write_text(json.dumps(docs))
            code, out, _ = run(capsys, "validate", str(tmp_path / wid))
            assert code == 2
            assert "VIOLATION" in out

    def test_eval_empty_store_exits_1(self, tmp_path, capsys):
        code, _, err = run(capsys, "eval", "--store", str(tmp_path))
        assert code == 1
