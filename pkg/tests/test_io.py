import json

import numpy as np
import pytest

from bilasym.config import sequential_scheme
from bilasym.io import LandmarkFile, LandmarkFileError, Subject, dumps, from_dict, read_csv_configs, read_landmarks


def doc(**over):
    d = {
        "dimension": 2,
        "scheme": {"pairs": [[1, 3]], "solos": [2, 4]},
        "registration": "basis",
        "subjects": [
            {"id": "a", "group": "g1", "coords": [[-1, 0], [0, 1], [1, 0], [0, -1]]},
            {"id": "b", "group": "g2", "coords": [[-0.95, 0.36], [-0.28, 2.11], [0.99, 0.54], [-0.31, -1.37]]},
        ],
    }
    d.update(over)
    return d


def test_roundtrip_is_exact(tmp_path):
    lf = from_dict(doc(frame="rest", groups=["g1", "g2"]))
    lf.subjects[1].coords[0, 0] = 0.1 + 0.2
    path = tmp_path / "x.json"
    path.write_text(dumps(lf))
    back = read_landmarks(path)
    np.testing.assert_array_equal(back.configs, lf.configs)
    assert back.frame == "rest" and back.groups == ["g1", "g2"]
    assert dumps(back) == dumps(lf)


def test_scheme_is_one_based_in_files():
    lf = from_dict(doc())
    assert lf.scheme.pairs == ((0, 2),)
    assert lf.scheme.solos == (1, 3)


@pytest.mark.parametrize(
    "over, fragment",
    [
        ({"dimension": "x"}, "dimension"),
        ({"subjects": []}, "subjects"),
        ({"scheme": {"pairs": [[1, 3]], "solos": [2]}}, "landmark 4"),
        ({"scheme": {"pairs": [[1, 3, 4]], "solos": [2]}}, "exactly two"),
        ({"registration": "mirrored"}, "registration"),
    ],
)
def test_malformed_documents(over, fragment):
    with pytest.raises(LandmarkFileError, match=fragment):
        from_dict(doc(**over))


def test_subject_shape_errors_name_the_subject():
    d = doc()
    d["subjects"][1]["coords"] = d["subjects"][1]["coords"][:3]
    with pytest.raises(LandmarkFileError, match="'b'"):
        from_dict(d)


def test_invalid_json_reports_location(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{\n  'x': 1}")
    with pytest.raises(LandmarkFileError, match="line 2"):
        read_landmarks(p)


def test_group_order_and_split():
    lf = from_dict(doc(groups=["g2", "g1"]))
    i1, i2, order = lf.split()
    assert order == ["g2", "g1"] and i1 == [1] and i2 == [0]
    with pytest.raises(LandmarkFileError):
        from_dict(doc(groups=["g1"])).group_order()


def test_non_finite_rejected():
    with pytest.raises(LandmarkFileError, match="non-finite"):
        LandmarkFile(2, sequential_scheme(1, 0), "raw", [Subject("a", "g", np.array([[np.nan, 0], [1, 0]]))])


def test_csv_import(tmp_path):
    csv_path = tmp_path / "lm.csv"
    csv_path.write_text(
        "id,group,landmark,x1,x2\n"
        "a,g1,1,-1,0\na,g1,2,0,1\na,g1,3,1,0\na,g1,4,0,-1\n"
        "b,g2,1,-1,0.1\nb,g2,2,0,1\nb,g2,3,1,0\nb,g2,4,0,-1\n"
    )
    scheme_path = tmp_path / "scheme.json"
    scheme_path.write_text(json.dumps({"pairs": [[1, 3]], "solos": [2, 4]}))
    lf = read_csv_configs(csv_path, scheme_path)
    assert lf.registration == "raw" and lf.dimension == 2
    assert lf.subjects[1].coords[0, 1] == 0.1
