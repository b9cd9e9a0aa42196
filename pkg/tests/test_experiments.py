import numpy as np
import pytest

from ctrlscore.experiments import (
    REFERENCE,
    Cell,
    compare,
    fig5_summary,
    ordering_facts,
    write_cells,
    write_fig5,
)

SCORE_COLUMNS = [k for k in REFERENCE if k[1].split("/")[1] not in ("VCE", "ACE", "AC")]


@pytest.mark.parametrize("key", sorted(REFERENCE))
def test_reference_columns_have_ten_nodes(key):
    assert len(REFERENCE[key]) == 10


@pytest.mark.parametrize("key", SCORE_COLUMNS)
def test_reference_score_columns_sum_to_one(key):
    # published to three decimals, so rounding leaves at most 10 * 0.0005
    total = sum(REFERENCE[key])
    if key in {("IV", "net7/VCS"), ("III", "net2/GAECS(d)")}:
        # these two published columns cannot be probability vectors
        assert abs(total - 1.0) > 0.005
    else:
        assert total == pytest.approx(1.0, abs=0.005)


def test_duplicated_columns_agree():
    for kind in ("VCS", "AECS"):
        assert REFERENCE[("II", f"net1/{kind}")] == REFERENCE[("IV", f"net1/{kind}")]


def test_compare_and_tolerances():
    cells = compare("II", {"net1/VCS": np.array(REFERENCE[("II", "net1/VCS")]) + 0.004,
                           "net1/AC": np.array(REFERENCE[("II", "net1/AC")]) + 0.02})
    assert len(cells) == 20
    assert all(c.ok for c in cells if c.column == "net1/VCS")
    assert not any(c.ok for c in cells if c.column == "net1/AC")
    assert {c.tol for c in cells} == {0.005, 0.01}


def test_compare_unknown_column():
    with pytest.raises(KeyError):
        compare("II", {"net9/VCS": np.zeros(10)})


def test_ordering_facts_on_reference_values():
    cells = []
    for (table, col), ref in REFERENCE.items():
        if table == "IV":
            cells += [Cell(table, col, i + 1, r, r, 0.0, 0.005) for i, r in enumerate(ref)]
    assert all(ordering_facts(cells).values())


def test_write_cells(tmp_path):
    path = tmp_path / "c.csv"
    write_cells([Cell("II", "net1/VCS", 7, 0.3412, 0.341, 0.0002, 0.005)], path)
    lines = path.read_text().splitlines()
    assert lines[0] == "table,column,node,computed,reference,diff,tol,ok"
    assert lines[1].startswith("II,net1/VCS,7,0.3412,0.341,") and lines[1].endswith(",1")


def test_write_fig5_and_summary(tmp_path):
    errors = {8: np.array([3.0, 1.0, 2.0]), 7: np.array([0.5, 0.25, 1.0])}
    path = tmp_path / "f.dat"
    write_fig5(errors, path)
    rows = [line.split() for line in path.read_text().splitlines()]
    assert rows[0] == ["N7", "N8"] and len(rows) == 4
    assert [float(x) for x in rows[1]] == [0.5, 3.0]
    assert fig5_summary(errors) == {7: 0.5, 8: 2.0}
