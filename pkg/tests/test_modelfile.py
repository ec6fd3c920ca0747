import copy
import json

import pytest

from comodsys.errors import ModelFileError
from comodsys.modelfile import (
    FORMAT,
    SCHEMA_VERSION,
    QuantumSystem,
    dumps,
    export_model,
    from_dict,
    import_model,
    loads,
    to_dict,
)
from comodsys.models.catalog import ClassicalBundle, build_model, list_models, verify_bundle

NAMES = [m["name"] for m in list_models()]


@pytest.fixture(scope="module")
def docs():
    return {n: to_dict(build_model(n)) for n in NAMES}


@pytest.mark.parametrize("name", NAMES)
def test_round_trip_is_byte_identical(name):
    text = dumps(build_model(name))
    assert dumps(loads(text)) == text


@pytest.mark.parametrize("name", ["so22-calogero", "schrodinger-tau", "q-oscillator-classical"])
def test_imported_classical_model_verifies(name):
    b = loads(dumps(build_model(name)))
    assert isinstance(b, ClassicalBundle) and b.declared
    rep = verify_bundle(b, trials=30)
    assert rep.passed, rep.render()
    names = {c.name for c in rep.checks}
    assert {"declared hamiltonian matches its derivation", "declared H matches its derivation"} <= names


@pytest.mark.parametrize("name", ["q-oscillator-quantum", "re-algebra"])
def test_imported_quantum_model_verifies(name):
    b = loads(dumps(build_model(name)))
    assert isinstance(b.model, QuantumSystem)
    rep = verify_bundle(b)
    assert rep.passed, rep.render()


def test_file_helpers(tmp_path):
    path = tmp_path / "m.json"
    export_model(build_model("schrodinger-sigma"), path)
    assert json.loads(path.read_text())["format"] == FORMAT
    assert import_model(path).name == "schrodinger-sigma"


def test_tampered_derived_expression_fails_verification(docs):
    doc = copy.deepcopy(docs["so22-calogero"])
    doc["derived"]["realized_hamiltonian"] += " + q1"
    rep = verify_bundle(from_dict(doc), trials=20)
    assert [c.name for c in rep.failures] == ["declared hamiltonian matches its derivation"]


def test_tampered_integral_fails_verification(docs):
    doc = copy.deepcopy(docs["schrodinger-tau"])
    doc["derived"]["realized_integrals"]["C(2)"] = "q1*p2"
    rep = verify_bundle(from_dict(doc), trials=20)
    assert [c.name for c in rep.failures] == ["declared C(2) matches its derivation"]


def test_tampered_bracket_fails_verification(docs):
    doc = copy.deepcopy(docs["so22-calogero"])
    so21 = next(a for a in doc["algebras"] if a["name"] == "so(2,1)")
    so21["brackets"] = [b if b[:2] != ["Yp", "Ym"] else ["Yp", "Ym", "2*Y3"] for b in so21["brackets"]]
    assert not verify_bundle(from_dict(doc), trials=20).passed


def _mutate(doc, path, value):
    d = copy.deepcopy(doc)
    target = d
    for k in path[:-1]:
        target = target[k]
    if value is KeyError:
        del target[path[-1]]
    else:
        target[path[-1]] = value
    return d


@pytest.mark.parametrize("path, value", [
    (("format",), "other"),
    (("schema_version",), SCHEMA_VERSION + 1),
    (("kind",), "hybrid"),
    (("coaction",), KeyError),
    (("hamiltonian",), "Jp_1 + Zq_2"),
    (("hamiltonian",), "Jp_9"),
    (("hamiltonian",), "Jp_1 +"),
    (("cascade", "casimir"), "C7"),
    (("cascade", "legs"), 1),
    (("legs",), [{"realization": 0, "offset": 0}]),
    (("coproduct", "algebra"), "so(3)"),
    (("integrals", "H"), "abs(Jp_1)"),
])
def test_malformed_classical_documents(docs, path, value):
    with pytest.raises(ModelFileError):
        from_dict(_mutate(docs["so22-calogero"], path, value))


def test_colliding_legs_are_rejected(docs):
    doc = copy.deepcopy(docs["so22-calogero"])
    doc["legs"][1]["offset"] = 1
    with pytest.raises(ModelFileError):
        from_dict(doc)


def test_malformed_quantum_documents(docs):
    doc = copy.deepcopy(docs["q-oscillator-quantum"])
    del doc["integrals"]["H"]
    with pytest.raises(ModelFileError):
        from_dict(doc)
    doc = copy.deepcopy(docs["q-oscillator-quantum"])
    doc["algebras"][0]["legs"] = {"1": "nonexistent"}
    with pytest.raises(ModelFileError):
        from_dict(doc)


@pytest.mark.parametrize("text", ["", "[1, 2]", "{not json", '"string"'])
def test_not_a_model(text):
    with pytest.raises(ModelFileError):
        loads(text)
