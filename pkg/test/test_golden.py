import pytest

from openergodic.utils.errors import GoldenMissingError
from openergodic.utils.golden import GoldenStore


def test_write_then_check(tmp_path):
    path = str(tmp_path / "nested" / "goldens.yaml")
    writer = GoldenStore(path, "write")
    assert writer.apply("sup", 3.0731) is None
    writer.save()

    checker = GoldenStore(path, "check")
    assert checker.apply("sup", 3.0731).passed
    assert checker.apply("sup", 3.0731 * (1 + 1e-12)).passed
    assert not checker.apply("sup", 3.08).passed
    assert checker.apply("sup", 2.0, comparison='upper').passed
    assert not checker.apply("sup", 3.1, comparison='upper').passed


def test_check_without_values(tmp_path):
    checker = GoldenStore(str(tmp_path / "goldens.yaml"), "check")
    with pytest.raises(GoldenMissingError):
        checker.apply("sup", 1.0)


def test_missing_key(tmp_path):
    path = str(tmp_path / "goldens.yaml")
    writer = GoldenStore(path, "write")
    writer.apply("a", 1.0)
    writer.save()
    with pytest.raises(GoldenMissingError):
        GoldenStore(path, "check").apply("b", 1.0)


def test_off_mode_ignores_everything(tmp_path):
    store = GoldenStore(str(tmp_path / "goldens.yaml"))
    assert store.apply("a", 1.0) is None
    store.save()
    assert not (tmp_path / "goldens.yaml").exists()
    with pytest.raises(ValueError):
        store.apply("a", 1.0, comparison='lower')
