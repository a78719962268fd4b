import pytest

from gpentropy import cache


@pytest.fixture
def cdir(tmp_path, monkeypatch):
    monkeypatch.setenv(cache.CACHE_ENV, str(tmp_path))
    return tmp_path


class TestCache:
    def test_roundtrip(self, cdir):
        assert cache.store("k", {"a": [1, 2]})
        assert cache.load("k") == {"a": [1, 2]}

    def test_miss(self, cdir):
        assert cache.load("absent") is None

    def test_checksum_failure(self, cdir):
        cache.store("k", [1])
        p = next(cdir.iterdir())
        blob = bytearray(p.read_bytes())
        blob[-1] ^= 0xFF
        p.write_bytes(bytes(blob))
        assert cache.load("k") is None

    def test_version_mismatch(self):
        blob = bytearray(cache.encode_blob([1]))
        blob[11] += 1
        assert cache.decode_blob(bytes(blob)) is None
        assert cache.decode_blob(b"short") is None

    def test_memo_recomputes(self, cdir):
        calls = []

        def compute():
            calls.append(1)
            return ["x"]

        assert cache.memo("m", compute) == ["x"]
        assert cache.memo("m", compute) == ["x"]
        assert len(calls) == 1
        assert cache.memo("m", compute, valid=lambda v: False) == ["x"]
        assert len(calls) == 2

    def test_disabled(self, monkeypatch):
        monkeypatch.setenv(cache.CACHE_ENV, "")
        assert cache.cache_dir() is None
        assert not cache.store("k", 1)
        assert cache.load("k") is None
