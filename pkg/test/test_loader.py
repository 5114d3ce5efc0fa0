import numpy as np
import pytest

from openergodic.utils.errors import DomainError
from openergodic.utils.loader import load_system, parse_system


def test_spec_strings():
    system, observable = parse_system("cyclic:6:2")
    assert system.mapping.tolist() == [2, 3, 4, 5, 0, 1] and observable is None
    assert parse_system("identity:3")[0].mapping.tolist() == [0, 1, 2]
    a, _ = parse_system("random:12:9")
    b, _ = parse_system("random:12", seed=9)
    assert np.array_equal(a.mapping, b.mapping)


@pytest.mark.parametrize("text", ["cyclic", "cyclic:x", "torus:4", "csv:", "identity:0"])
def test_bad_spec_strings(text):
    with pytest.raises(DomainError):
        parse_system(text)


def test_csv_system(tmp_path):
    path = tmp_path / "system.csv"
    path.write_text("point,map,f_re,f_im\n1,2,0.5,1\n0,1,1.5,0\n2,0,-1,0\n")
    system, observable = parse_system(f"csv:{path}")
    assert system.mapping.tolist() == [1, 2, 0]
    assert observable.values.tolist() == [1.5, 0.5 + 1j, -1]


def test_csv_without_observable(tmp_path):
    path = tmp_path / "system.csv"
    path.write_text("point,map\n0,1\n1,0\n")
    system, observable = load_system(str(path))
    assert system.size == 2 and observable is None


@pytest.mark.parametrize("content", ["point,f_re\n0,1\n", "point,map\n0,1\n2,0\n", "point,map\n0,0\n1,0\n"])
def test_bad_csv(tmp_path, content):
    path = tmp_path / "system.csv"
    path.write_text(content)
    with pytest.raises(DomainError):
        load_system(str(path))
