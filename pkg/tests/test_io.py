import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from finslerium.errors import ConfigurationError
from finslerium.io import (
    SCHEMA,
    RunManifest,
    digest,
    dumps,
    parallel_map,
    parse_complex,
    parse_complex_list,
    parse_params,
    parse_region,
    thread_count,
    write_artifact,
)


@pytest.mark.parametrize("text,value", [
    ("0", 0), ("-0.5", -0.5), ("0.3-0.4i", 0.3 - 0.4j), ("2i", 2j), ("-i", -1j),
    ("1+i", 1 + 1j), ("1e-3+2.5e1j", 1e-3 + 25j), ("+.5-i", 0.5 - 1j),
])
def test_complex_literals(text, value):
    assert parse_complex(text) == value


@pytest.mark.parametrize("text", ["abc", "1+", "", "1+2", "i2", "1..2"])
def test_bad_complex_literals(text):
    with pytest.raises(ConfigurationError):
        parse_complex(text)


@given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
def test_complex_round_trip(a, b):
    text = f"{a!r}{'+' if b >= 0 else '-'}{abs(b)!r}i"
    assert parse_complex(text) == complex(a, b)


def test_lists_params_regions():
    assert np.allclose(parse_complex_list("0.1,-2i,3"), [0.1, -2j, 3])
    assert parse_params(["a=1", "b=-0.3"]) == {"a": 1.0, "b": -0.3}
    with pytest.raises(ConfigurationError):
        parse_params(["a"])
    with pytest.raises(ConfigurationError):
        parse_params(["a=x"])
    assert parse_region("disk:0.9") == 0.9 and parse_region("ball:2") == 2.0
    for bad in ("disk", "cube:1", "disk:-1", "disk:x"):
        with pytest.raises(ConfigurationError):
            parse_region(bad)


def test_dumps_is_canonical():
    a = dumps({"b": np.float64(1.5), "a": [1 + 2j, np.int64(3)], "c": np.bool_(True)})
    b = dumps({"c": True, "a": [complex(1, 2), 3], "b": 1.5})
    assert a == b and a.endswith("\n")
    d = json.loads(a)
    assert d["schema"] == SCHEMA and d["a"] == [[1.0, 2.0], 3]


def test_manifest_and_artifacts(tmp_path):
    man = RunManifest(["finslerium", "x"], 7)
    write_artifact(tmp_path / "o", "r.json", "{}\n", man)
    man.write(tmp_path / "o")
    d = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert d["outputs"] == [{"path": "r.json", "digest": digest("{}\n")}]
    assert d["seed"] == 7 and d["schema"] == SCHEMA


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("FINSLERIUM_THREADS", "3")
    assert thread_count() == 3
    assert parallel_map(lambda x: x * x, range(10)) == [x * x for x in range(10)]
    monkeypatch.setenv("FINSLERIUM_THREADS", "junk")
    assert thread_count() == 1
