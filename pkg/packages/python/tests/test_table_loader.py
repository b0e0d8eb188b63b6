from dataclasses import dataclass

import pytest
import yaml
from entanglement_atlas.errors import TableError
from entanglement_atlas.loaders.table_loader import load_records, load_table
from entanglement_atlas.miscellaneous.yaml_tags.include_yaml import yaml_path_loader


@dataclass
class GeneratingSetRow:
    n: int
    families: list


def test_load_table_is_cached():
    assert load_table("generating_sets") is load_table("generating_sets")


def test_merged_parts_keep_order():
    records = load_table("qubits4")["records"]
    assert len(records) == 83
    assert [record["label"] for record in records[:2]] == ["C0", "C1"]
    assert records[-1]["label"] == "C82"


def test_load_records():
    rows = load_records("generating_sets", GeneratingSetRow)
    assert [row.n for row in rows] == [2, 3, 4]
    assert len(rows[2].families) == 19


def test_missing_table():
    with pytest.raises(TableError):
        load_table("no_such_table")


def test_records_must_match_the_row_type():
    with pytest.raises(TableError):
        load_records("operators_222", GeneratingSetRow)
    with pytest.raises(TableError):
        load_records("qubits4", GeneratingSetRow)


def test_include_pattern_and_merge(tmp_path):
    (tmp_path / "part-1.yaml").write_text("- 1\n- 2\n")
    (tmp_path / "part-2.yaml").write_text("- 3\n")
    main = tmp_path / "main.yaml"
    main.write_text("values: !merge\n  - !include part-1.yaml\n  - !include part-2.yaml\n  - 4\nall: !include_pattern part-*.yaml\n")
    data = yaml.load(main.read_text(), yaml_path_loader(str(main)))
    assert data["values"] == [1, 2, 3, 4]
    assert data["all"] == [[1, 2], [3]]


def test_include_without_params_keeps_templates(tmp_path):
    (tmp_path / "row.yaml").write_text('representative: "{{ c | signed }}*[1,1]"\n')
    main = tmp_path / "main.yaml"
    main.write_text("row: !include row.yaml\n")
    data = yaml.load(main.read_text(), yaml_path_loader(str(main)))
    assert data["row"]["representative"] == "{{ c | signed }}*[1,1]"
