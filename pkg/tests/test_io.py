import json

import pytest

from cdloops import io
from cdloops.corpus import loops_with_involution, symmetric_group
from cdloops.doubling import build_Qn
from cdloops.loop import LoopError


@pytest.mark.parametrize("name,L,inv", loops_with_involution(), ids=lambda v: v if isinstance(v, str) else "")
def test_round_trip(name, L, inv):
    L2, inv2 = io.loads(io.dumps(L, inv))
    assert L2 == L and list(L2.names) == list(L.names)
    assert inv2 == inv


def test_without_involution():
    G = symmetric_group(3)
    text = io.dumps(G)
    assert "involution" not in json.loads(text)
    L, inv = io.loads(text)
    assert L == G and inv is None


def test_one_row_per_line():
    D = build_Qn(2)[-1]
    text = io.dumps(D.M, D.star)
    assert sum(line.strip().startswith("[") for line in text.splitlines()) == 8


def test_file_round_trip(tmp_path):
    D = build_Qn(3)[-1]
    p = tmp_path / "q3.json"
    io.write(p, D.M, D.star)
    L, inv = io.read(p)
    assert L == D.M and inv == D.star


@pytest.mark.parametrize("text", [
    "not json",
    "[1, 2]",
    '{"order": 2}',
    '{"table": [[0, 1], [1, 1]]}',
    '{"order": 3, "table": [[0, 1], [1, 0]]}',
    '{"table": [[0, 1], [1, 0]], "involution": [1, 0]}',
])
def test_rejects_bad_documents(text):
    with pytest.raises(LoopError):
        io.loads(text)
