import numpy as np
import pytest

from lindri.config import Config, ConfigError, build_model, parse_overrides, parse_text
from lindri.model import LOWERING, X, build_heisenberg, lowering_sum


def test_parse_text():
    text = """
    # comment line
    system.type = heisenberg   # trailing comment
    system.b = "0.25"
    interaction[0].pauli_sum = 0.8*X + 0.4*Z
    """
    assert parse_text(text) == {"system.type": "heisenberg", "system.b": "0.25",
                                "interaction[0].pauli_sum": "0.8*X + 0.4*Z"}
    for bad in ("no equals sign", " = 3"):
        with pytest.raises(ConfigError):
            parse_text(bad)


def test_parse_overrides():
    assert parse_overrides(["a=1", " b = x=y "]) == {"a": "1", "b": "x=y"}
    assert parse_overrides(None) == {}
    with pytest.raises(ConfigError):
        parse_overrides(["novalue"])


def test_typed_accessors_record_defaults():
    cfg = Config({"n": "4", "x": "0.5", "flag": "yes", "ks": "1, 2,"})
    assert cfg.int("n") == 4 and cfg.float("x") == 0.5 and cfg.bool("flag")
    assert cfg.ints("ks") == [1, 2]
    assert cfg.float("missing", 0.1) == 0.1
    assert cfg.values["missing"] == "0.1"
    with pytest.raises(ConfigError):
        cfg.get("absent")
    for key, fn in (("x", cfg.int), ("flag", cfg.float), ("x", cfg.bool), ("flag", cfg.floats)):
        with pytest.raises(ConfigError):
            fn(key)


def test_defaults_lose_to_values(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("a = 1\n")
    cfg = Config.load(p, {"b": "2"}, {"a": "0", "c": "3"})
    assert cfg.values == {"a": "1", "b": "2", "c": "3"}


def test_default_model_is_heisenberg_chain():
    h0, baths = build_model(Config({}))
    ref = build_heisenberg(4, 0.5)
    assert np.allclose(h0.dense(), ref.dense())
    assert len(baths) == 4
    for k, (anc, inter) in enumerate(baths):
        assert anc.beta == 1.0 and anc.omega == 0.1
        assert np.allclose(inter.ancilla_lowering, LOWERING)
        assert np.allclose(inter.v_dense(), lowering_sum(4, k).dense())


def test_pauli_sum_model_and_overrides():
    cfg = Config({"system.type": "pauli_sum", "system.terms": "0.7*X + 0.3*Z",
                  "interaction[0].pauli_sum": "X", "interaction[0].ancilla": "x",
                  "bath.beta": "2", "bath[0].omega": "0.5"})
    h0, [(anc, inter)] = build_model(cfg)
    assert h0.dim == 2
    assert anc.beta == 2.0 and anc.omega == 0.5
    assert np.allclose(inter.ancilla_lowering, X / 2)


@pytest.mark.parametrize("values", [
    {"system.type": "ising"},
    {"system.type": "pauli_sum", "system.terms": "X"},
    {"interaction[1].site": "0"},
    {"interaction[0].site": "7"},
    {"interaction[0].ancilla": "y"},
    {"interaction[0].pauli_sum": "XX"},
])
def test_model_errors(values):
    with pytest.raises(ConfigError):
        build_model(Config(values))
