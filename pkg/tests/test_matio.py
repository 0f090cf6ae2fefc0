import numpy as np
import pytest
import scipy.sparse as sp

from omx import matio, rng
from omx.elm import ElmConfig, elm_init
from omx.errors import FormatError, IntegrityError
from omx.esn import EsnConfig, esn_init
from omx.forest import ForestConfig, forest_fit
from omx.preprocess import projector_fit


class TestMatrixFiles:
    def test_dense_read(self, tmp_path):
        p = tmp_path / "m.csv"
        p.write_text("1,2\n3,4\n")
        M = matio.read_matrix(p)
        assert np.array_equal(M, [[1.0, 2.0], [3.0, 4.0]])

    def test_dense_header(self, tmp_path):
        p = tmp_path / "m.csv"
        p.write_text("a,b\n1,2\n")
        M = matio.read_matrix(p, has_header=True)
        assert np.array_equal(M, [[1.0, 2.0]])

    def test_sparse_read(self, tmp_path):
        p = tmp_path / "m.txt"
        p.write_text("%sparse\n2 2 1\n0 1 5.0\n")
        M = matio.read_matrix(p)
        assert sp.issparse(M)
        assert M.shape == (2, 2)
        assert M.tocsr()[0, 1] == 5.0
        assert M.nnz == 1

    def test_dense_roundtrip_bitwise(self, tmp_path):
        gen = rng.stream(0)
        M = gen.standard_normal((7, 5))
        p = tmp_path / "m.csv"
        matio.write_matrix(p, M)
        assert np.array_equal(matio.read_matrix(p), M)

    def test_sparse_roundtrip_bitwise(self, tmp_path):
        gen = rng.stream(1)
        M = gen.standard_normal((10, 6))
        M[np.abs(M) < 1.0] = 0.0
        p = tmp_path / "m.txt"
        matio.write_matrix(p, sp.coo_matrix(M))
        back = matio.read_matrix(p)
        assert np.array_equal(np.asarray(back.todense()), M)

    def test_malformed_line_reports_lineno(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("1,2\n3,oops\n")
        with pytest.raises(FormatError, match=":2:"):
            matio.read_matrix(p)

    def test_ragged_row_rejected(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("1,2\n3\n")
        with pytest.raises(FormatError, match=":2:"):
            matio.read_matrix(p)

    def test_nnz_mismatch(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("%sparse\n2 2 2\n0 1 5.0\n")
        with pytest.raises(IntegrityError, match="nnz"):
            matio.read_matrix(p)

    def test_out_of_range_index(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("%sparse\n2 2 1\n0 5 1.0\n")
        with pytest.raises(IntegrityError):
            matio.read_matrix(p)


def fitted_models():
    gen = rng.stream(2)
    X = gen.standard_normal((60, 6))
    Y = gen.standard_normal((60, 3))
    esn = esn_init(EsnConfig(reservoir_size=24, seed=1), 6).fit(X, Y)
    elm = elm_init(ElmConfig(hidden_size=32, seed=2), 6).fit(X, Y)
    forest = forest_fit(X, Y, ForestConfig(n_trees=4, max_leaf_nodes=8, seed=3))
    return X, [esn, elm, forest]


class TestModelPersistence:
    def test_save_load_predict_bitwise(self, tmp_path):
        X, models = fitted_models()
        for model in models:
            p = tmp_path / f"{model.kind}.omx"
            matio.save_model(model, p)
            back = matio.load_model(p)
            assert np.array_equal(back.predict(X), model.predict(X)), model.kind

    def test_projector_roundtrip(self, tmp_path):
        gen = rng.stream(3)
        X = gen.standard_normal((50, 10))
        proj = projector_fit(X, 4, rng.stream(4))
        p = tmp_path / "proj.omx"
        matio.save_model(proj, p)
        back = matio.load_model(p)
        assert np.array_equal(back.apply(X), proj.apply(X))

    def test_bad_magic(self, tmp_path):
        p = tmp_path / "bad.omx"
        p.write_bytes(b"NOPE" + b"\x00" * 40)
        with pytest.raises(FormatError, match="magic"):
            matio.load_model(p)

    def test_wrong_version(self, tmp_path):
        X, models = fitted_models()
        p = tmp_path / "m.omx"
        matio.save_model(models[0], p)
        raw = bytearray(p.read_bytes())
        raw[4] = 99
        p.write_bytes(bytes(raw))
        with pytest.raises(FormatError, match="version"):
            matio.load_model(p)

    def test_truncated_file(self, tmp_path):
        X, models = fitted_models()
        p = tmp_path / "m.omx"
        matio.save_model(models[1], p)
        raw = p.read_bytes()
        p.write_bytes(raw[: len(raw) // 2])
        with pytest.raises(IntegrityError, match="truncated"):
            matio.load_model(p)

    def test_trailing_garbage(self, tmp_path):
        X, models = fitted_models()
        p = tmp_path / "m.omx"
        matio.save_model(models[1], p)
        p.write_bytes(p.read_bytes() + b"junk")
        with pytest.raises(IntegrityError, match="trailing"):
            matio.load_model(p)

    def test_atomic_write_never_leaves_partial(self, tmp_path):
        # a failing writer must not leave the target or temp files behind
        target = tmp_path / "out.csv"

        def boom(fh):
            fh.write("partial")
            raise RuntimeError("disk on fire")

        with pytest.raises(RuntimeError):
            matio._atomic_write(target, boom)
        assert not target.exists()
        assert list(tmp_path.iterdir()) == []
