import json
import subprocess
import sys
import pytest

import oracles
from laxrel.cli import format_matrix, main
from laxrel.functor import Pow
from laxrel.laxext import Hausdorff
from laxrel.quantale import boolean, godel
from laxrel.serialize import relation_from_json
from laxrel.vrel import FinSet, VRel

GODEL_WS = {
    "quantale": {"kind": "godel-grid", "n": 2},
    "sets": {"X": ["a", "b"], "Y": ["c"], "A": ["lo"], "C": ["lo", "hi"]},
    "relations": {"r": {"src": "X", "tgt": "Y", "entries": [["1/2"], ["1"]]},
                  "chain": {"src": "C", "tgt": "C", "entries": [["1", "1"], ["0", "1"]]},
                  "sub": {"src": "A", "tgt": "A", "entries": [["1"]]}},
    "extensions": {"h": {"op": "hausdorff"}, "em": "egli-milner", "id": {"op": "identity"}},
    "vcats": {"chain": {"obj": "C", "a": "chain"}, "sub": {"obj": "A", "a": "sub"}},
    "maps": {"inc": {"src": "A", "tgt": "C", "assignment": ["lo"]}},
    "functionals": {"phi": ["1/2"]},
}

BOOL_WS = {
    "quantale": {"kind": "boolean"},
    "sets": {"X": ["a", "b"], "S": ["p", "q", "r"], "K": ["k"]},
    "relations": {"r": {"src": "X", "tgt": "X", "entries": [["1", "0"], ["1", "1"]]},
                  "bad": {"src": "S", "tgt": "S",
                          "entries": [["1", "1", "0"], ["0", "1", "1"], ["0", "0", "1"]]},
                  "k1": {"src": "K", "tgt": "X", "entries": [["1", "0"]]},
                  "xk": {"src": "X", "tgt": "K", "entries": [["1"], ["0"]]}},
    "extensions": {"h": {"op": "hausdorff"}, "em": "egli-milner"},
    "liftings": {"dia": "diamond"},
    "vcats": {"bad": {"obj": "S", "a": "bad"}},
    "coalgebras": {"lts": {"carrier": "S", "next": {"p": ["q", "r"], "q": [], "r": ["r"]}}},
}


@pytest.fixture
def ws(tmp_path):
    def write(data, name="ws.json"):
        p = tmp_path / name
        p.write_text(json.dumps(data))
        return str(p)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_quantale_laws(capsys, ws):
    code, out, _ = run(capsys, "laws", "-w", ws(GODEL_WS), "--quantale")
    assert code == 0
    assert "adjunction" in out


def test_extension_laws_json(capsys, ws):
    code, out, _ = run(capsys, "laws", "-w", ws(GODEL_WS), "--extension", "h", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["ok"] and len(data["reports"]) == 2


def test_extension_from_term_file(capsys, ws, tmp_path):
    term = tmp_path / "egli-milner.json"
    term.write_text(json.dumps("egli-milner"))
    code, out, _ = run(capsys, "laws", "--extension", str(term))
    assert code == 0
    full = ws(dict(BOOL_WS, extension={"op": "dual", "arg": {"op": "hausdorff"}}), "full.json")
    assert run(capsys, "laws", "--extension", full, "--skip-enrichment")[0] == 0


def test_failing_vcat_reports_witness(capsys, ws):
    code, out, _ = run(capsys, "laws", "-w", ws(BOOL_WS), "--vcat", "bad", "--json")
    assert code == 1
    data = json.loads(out)
    trans = [law for rep in data["reports"] for law in rep["laws"] if law["name"] == "transitive"]
    assert trans and not trans[0]["passed"] and trans[0]["witness"]


def test_lifting_laws(capsys, ws):
    assert run(capsys, "laws", "-w", ws(BOOL_WS), "--lifting", "dia")[0] == 0


def test_extend_hausdorff_matrix(capsys, ws):
    path = ws(GODEL_WS)
    code, out, _ = run(capsys, "extend", "-w", path, "--extension", "h", "--relation", "r")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split("|")[1].split() == ["[]", '["c"]']
    rows = {ln.split("|")[0].strip(): ln.split("|")[1].split() for ln in lines[2:]}
    assert rows['["a","b"]'] == ["1", "1"]
    assert rows['["a"]'] == ["1", "1/2"]
    assert rows["[]"] == ["1", "0"]

    code, out, _ = run(capsys, "extend", "-w", path, "--extension", "h", "--relation", "r", "--json")
    data = json.loads(out)
    q = godel(2)
    X, Y = FinSet("X", ["a", "b"]), FinSet("Y", ["c"])
    r = VRel(q, X, Y, [[q.parse("1/2")], [q.top]])
    want = Hausdorff(q)(r)
    sets = {want.src.name: want.src, want.tgt.name: want.tgt}
    assert relation_from_json(data, q, sets) == want
    assert data["tgt_elements"] == ["[]", '["c"]']


def test_extend_identity_echoes(capsys, ws):
    code, out, _ = run(capsys, "extend", "-w", ws(GODEL_WS), "--extension", "id",
                       "--relation", "r", "--json")
    assert code == 0
    assert json.loads(out)["entries"] == [["1/2"], ["1"]]


def test_extend_egli_milner_boolean(capsys, ws):
    code, out, _ = run(capsys, "extend", "-w", ws(BOOL_WS), "--extension", "em",
                       "--relation", "r", "--json")
    data = json.loads(out)
    rel = {("a", "a"): 1, ("a", "b"): 0, ("b", "a"): 1, ("b", "b"): 1}
    subsets = [frozenset(s) for s in ([], ["a"], ["b"], ["a", "b"])]
    assert len(data["entries"]) == 4 and len(data["entries"][0]) == 4
    for i, A in enumerate(subsets):
        for j, C in enumerate(subsets):
            want = oracles.egli_milner(A, C, lambda x, y: rel[x, y] == 1)
            assert (data["entries"][i][j] == "1") == want


def test_kantorovich_matches_extend(capsys, ws):
    path = ws(GODEL_WS)
    _, a, _ = run(capsys, "extend", "-w", path, "--extension", "h", "--relation", "r")
    _, b, _ = run(capsys, "kantorovich", "-w", path, "--liftings", "diamond", "--relation", "r")
    _, c, _ = run(capsys, "kantorovich", "-w", path, "--liftings", "diamond", "--relation", "r",
                  "--threads", "3")
    assert a == b == c


@pytest.mark.parametrize("ext,kappa,count", [("h", 1, 2), ("h", 0, 1), ("h", 2, 4),
                                             ("identity", 1, 1)])
def test_moss_counts(capsys, ws, ext, kappa, count):
    code, out, _ = run(capsys, "moss", "-w", ws(BOOL_WS), "--extension", ext,
                       "--kappa", str(kappa), "--json")
    assert code == 0
    data = json.loads(out)
    assert len(data["liftings"]) == count


def test_moss_identity_gives_identity_table(capsys, ws):
    _, out, _ = run(capsys, "moss", "-w", ws(BOOL_WS), "--extension", "identity", "--json")
    (mu,) = json.loads(out)["liftings"]
    assert sorted(mu["yoneda"].values()) == ["0", "1"]


def test_represent(capsys, ws):
    path = ws(BOOL_WS)
    code, out, _ = run(capsys, "represent", "-w", path, "--extension", "h", "--relation", "r")
    assert code == 0 and out.strip().endswith("True")
    code, out, _ = run(capsys, "represent", "-w", path, "--extension", "h", "--relation", "xk",
                       "--drop", "1")
    assert code == 1
    assert "meet:" in out
    code, out, _ = run(capsys, "represent", "-w", ws(GODEL_WS), "--extension", "em",
                       "--relation", "r", "--json")
    assert code == 0 and json.loads(out)["equal"]


def test_distance_matches_simulation_oracle(capsys, ws):
    code, out, _ = run(capsys, "distance", "-w", ws(BOOL_WS), "--extension", "h",
                       "--coalgebra", "lts", "--json")
    assert code == 0
    ent = json.loads(out)["entries"]
    succ = BOOL_WS["coalgebras"]["lts"]["next"]
    states = ["p", "q", "r"]
    want = oracles.simulation_preorder(states, succ)
    for i, x in enumerate(states):
        for j, y in enumerate(states):
            # x simulates y
            assert (ent[i][j] == "1") == ((y, x) in want)


def test_distance_steps_and_bound(capsys, ws):
    path = ws(BOOL_WS)
    code, out, _ = run(capsys, "distance", "-w", path, "--extension", "h", "--coalgebra", "lts",
                       "--steps")
    assert code == 0 and "step 0:" in out and "fixpoint after" in out
    code, _, err = run(capsys, "distance", "-w", path, "--extension", "h", "--coalgebra", "lts",
                       "--max-iter", "0")
    assert code == 1 and "no fixpoint" in err


def test_closure_and_extend_functor(capsys, ws):
    path = ws(GODEL_WS)
    code, out, _ = run(capsys, "closure", "-w", path, "--vcat", "chain", "--subset", "lo,hi",
                       "--json")
    assert code == 0 and json.loads(out) == {"closure": ["lo", "hi"], "dense": True}
    code, out, _ = run(capsys, "closure", "-w", path, "--vcat", "chain", "--subset", "hi")
    assert "dense: False" in out
    code, out, _ = run(capsys, "extend-functor", "-w", path, "--embedding", "inc", "--dom", "sub",
                       "--cod", "chain", "--phi", "phi", "--json")
    assert code == 0
    psi = json.loads(out)["psi"]
    assert psi["lo"] == "1/2"


def test_lift_vcat(capsys, ws):
    code, out, _ = run(capsys, "lift", "-w", ws(GODEL_WS), "--extension", "h", "--vcat", "chain",
                       "--json")
    assert code == 0
    assert len(json.loads(out)["entries"]) == 4


def test_error_codes(capsys, ws, tmp_path):
    path = ws(GODEL_WS)
    assert run(capsys, "extend", "-w", path, "--extension", "h", "--relation", "nope")[0] == 2
    assert run(capsys, "extend", "-w", str(tmp_path / "missing.json"), "--extension", "h",
               "--relation", "r")[0] == 2
    assert run(capsys, "extend", "-w", path, "--extension", "h", "--relation", "r",
               "--cap", "2")[0] == 3
    assert run(capsys, "closure", "-w", path, "--vcat", "chain", "--subset", "zz")[0] == 2
    bad = ws({"quantale": {"kind": "heyting"}}, "bad.json")
    assert run(capsys, "laws", "-w", bad)[0] == 2


def test_output_is_deterministic(capsys, ws):
    path = ws(GODEL_WS)
    outs = {run(capsys, "moss", "-w", path, "--extension", "h", "--kappa", "2")[1] for _ in range(3)}
    assert len(outs) == 1


def test_json_output_round_trips(capsys, ws):
    _, out, _ = run(capsys, "laws", "-w", ws(GODEL_WS), "--extension", "h", "--json")
    data = json.loads(out)
    assert json.loads(json.dumps(data, sort_keys=True, separators=(",", ":"))) == data


def test_format_matrix_labels():
    q = boolean()
    X = FinSet("X", ["a", "bb"])
    text = format_matrix(VRel(q, X, X, [[1, 0], [0, 1]]))
    assert text.splitlines()[2].startswith("a  |")


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "laxrel.cli", "laws", "--quantale"],
                          capture_output=True, text=True)
    assert proc.returncode == 0


def test_functor_term_in_workspace(capsys, ws):
    data = dict(GODEL_WS, functors={"P": {"op": "pow"}})
    code, out, _ = run(capsys, "kantorovich", "-w", ws(data), "--functor", "P",
                       "--liftings", "diamond,box", "--relation", "r", "--json")
    assert code == 0
    assert len(json.loads(out)["entries"]) == len(Pow().obj(FinSet("X", ["a", "b"])))
