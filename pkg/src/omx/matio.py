"""Matrix file formats and binary model persistence.

Matrices travel as plain text: dense CSV (optional header row) or a
sparse triplet format ("%sparse" marker line, then "rows cols nnz",
then one "row col value" line per entry, 0-based). Models persist in a
self-describing little-endian binary container (magic "OMXM") whose
load reproduces predictions bitwise. All writes are atomic: a temp
file in the target directory is renamed into place.
"""

import os
import struct
import tempfile

import numpy as np
import scipy.sparse as sp

from .elm import ElmConfig, ElmModel
from .errors import FormatError, IntegrityError
from .esn import EsnConfig, EsnModel
from .forest import ForestConfig, ForestModel, RegressionTree
from .preprocess import Projector

MAGIC = b"OMXM"
FORMAT_VERSION = 1

_DTYPE_TAGS = {0: np.float64, 1: np.int64, 2: np.bool_}
_TAG_OF_DTYPE = {np.dtype(np.float64): 0, np.dtype(np.int64): 1, np.dtype(np.bool_): 2}


def _atomic_write(path, write_fn, mode="w"):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".omx-tmp-")
    try:
        with os.fdopen(fd, mode) as fh:
            write_fn(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x):
    return format(float(x), ".17g")


def write_matrix(path, M, header=None):
    """Write dense CSV or sparse triplet text, atomically.

    Sparse input selects triplet mode; `header` (list of column names)
    applies to dense CSV only.
    """
    if sp.issparse(M):
        coo = M.tocoo()

        def write(fh):
            fh.write("%sparse\n")
            fh.write(f"{coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
            for r, c, v in zip(coo.row, coo.col, coo.data):
                fh.write(f"{r} {c} {_fmt(v)}\n")

    else:
        M = np.asarray(M, dtype=np.float64)

        def write(fh):
            if header is not None:
                fh.write(",".join(header) + "\n")
            for row in M:
                fh.write(",".join(_fmt(v) for v in row) + "\n")

    _atomic_write(path, write)


def read_matrix(path, has_header=False):
    """Read a matrix file; "%sparse" on line 1 selects triplet mode."""
    with open(path) as fh:
        first = fh.readline()
        if first.strip() == "%sparse":
            return _read_sparse(fh, path)
        return _read_dense(first, fh, path, has_header)


def _parse_error(path, lineno, msg):
    return FormatError(f"{path}:{lineno}: {msg}")


def _read_sparse(fh, path):
    line = fh.readline()
    parts = line.split()
    if len(parts) != 3:
        raise _parse_error(path, 2, f"expected 'rows cols nnz', got {line.strip()!r}")
    try:
        rows, cols, nnz = (int(p) for p in parts)
    except ValueError:
        raise _parse_error(path, 2, f"non-integer shape line {line.strip()!r}")
    r = np.empty(nnz, dtype=np.int64)
    c = np.empty(nnz, dtype=np.int64)
    v = np.empty(nnz, dtype=np.float64)
    count = 0
    for lineno, line in enumerate(fh, start=3):
        if not line.strip():
            continue
        if count >= nnz:
            raise IntegrityError(f"{path}: more than the declared {nnz} triplets")
        parts = line.split()
        if len(parts) != 3:
            raise _parse_error(path, lineno, f"expected 'row col value', got {line.strip()!r}")
        try:
            r[count] = int(parts[0])
            c[count] = int(parts[1])
            v[count] = float(parts[2])
        except ValueError:
            raise _parse_error(path, lineno, f"malformed triplet {line.strip()!r}")
        if not (0 <= r[count] < rows and 0 <= c[count] < cols):
            raise IntegrityError(
                f"{path}:{lineno}: index ({r[count]}, {c[count]}) outside {rows}x{cols}"
            )
        count += 1
    if count != nnz:
        raise IntegrityError(f"{path}: declared nnz={nnz} but found {count} triplets")
    return sp.coo_matrix((v, (r, c)), shape=(rows, cols))


def _read_dense(first, fh, path, has_header):
    rows = []
    start = 2 if has_header else 1
    lines = [] if has_header else [first]
    lines.extend(fh)
    width = None
    for lineno, line in enumerate(lines, start=start):
        if not line.strip():
            continue
        parts = line.strip().split(",")
        try:
            row = [float(p) for p in parts]
        except ValueError:
            raise _parse_error(path, lineno, f"malformed CSV row {line.strip()!r}")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise _parse_error(
                path, lineno, f"row has {len(row)} fields, expected {width}"
            )
        rows.append(row)
    if not rows:
        raise FormatError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64)


# --- binary model container ---------------------------------------------


def _pack_str(s):
    b = s.encode("utf-8")
    return struct.pack("<H", len(b)) + b


def _pack_array(name, arr):
    arr = np.ascontiguousarray(arr)
    tag = _TAG_OF_DTYPE[arr.dtype]
    head = _pack_str(name) + struct.pack("<BB", tag, arr.ndim)
    head += struct.pack(f"<{arr.ndim}q", *arr.shape)
    payload = arr.astype(arr.dtype.newbyteorder("<"), copy=False).tobytes()
    return head + struct.pack("<q", len(payload)) + payload


class _Reader:
    def __init__(self, data, path):
        self.data = data
        self.pos = 0
        self.path = path

    def take(self, n):
        if self.pos + n > len(self.data):
            raise IntegrityError(f"{self.path}: truncated file")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def read_str(self):
        (n,) = struct.unpack("<H", self.take(2))
        return self.take(n).decode("utf-8")

    def read_array(self):
        name = self.read_str()
        tag, ndim = struct.unpack("<BB", self.take(2))
        if tag not in _DTYPE_TAGS:
            raise FormatError(f"{self.path}: unknown dtype tag {tag}")
        shape = struct.unpack(f"<{ndim}q", self.take(8 * ndim))
        (nbytes,) = struct.unpack("<q", self.take(8))
        dtype = np.dtype(_DTYPE_TAGS[tag]).newbyteorder("<")
        arr = np.frombuffer(self.take(nbytes), dtype=dtype).reshape(shape)
        return name, arr.astype(_DTYPE_TAGS[tag])


def _model_payload(model):
    if isinstance(model, EsnModel):
        cfg = model.config
        meta = {
            "reservoir_size": cfg.reservoir_size,
            "spectral_radius": cfg.spectral_radius,
            "input_scale": cfg.input_scale,
            "reservoir_density": cfg.reservoir_density,
            "state_iters": cfg.state_iters,
            "state_tol": cfg.state_tol,
            "ridge_lambda": cfg.ridge_lambda,
            "seed": cfg.seed,
        }
        arrays = [("W_in", model.W_in), ("W", model.W)]
        if model.W_out is not None:
            arrays.append(("W_out", model.W_out))
        return "esn", meta, arrays
    if isinstance(model, ElmModel):
        cfg = model.config
        meta = {
            "hidden_size": cfg.hidden_size,
            "activation": cfg.activation,
            "seed": cfg.seed,
        }
        arrays = [("W_in", model.W_in), ("b", model.b)]
        if model.W_out is not None:
            arrays.append(("W_out", model.W_out))
        return "elm", meta, arrays
    if isinstance(model, ForestModel):
        cfg = model.config
        meta = {
            "n_trees": cfg.n_trees,
            "max_leaf_nodes": cfg.max_leaf_nodes,
            "min_samples_leaf": cfg.min_samples_leaf,
            "feature_fraction": cfg.feature_fraction,
            "bootstrap": int(cfg.bootstrap),
            "seed": cfg.seed,
            "input_dim": model.input_dim,
            "output_dim": model.output_dim,
        }
        arrays = []
        for i, tree in enumerate(model.trees or []):
            arrays += [
                (f"t{i}.feature", tree.feature),
                (f"t{i}.threshold", tree.threshold),
                (f"t{i}.left", tree.left),
                (f"t{i}.right", tree.right),
                (f"t{i}.leaf_id", tree.leaf_id),
                (f"t{i}.leaf_values", tree.leaf_values),
                (f"t{i}.leaf_counts", tree.leaf_counts),
            ]
        return "forest", meta, arrays
    if isinstance(model, Projector):
        arrays = [
            ("kept_columns", model.kept_columns),
            ("components", model.components),
            ("singular_values", model.singular_values),
            ("mean", model.mean),
            ("std", model.std),
        ]
        return "projector", {}, arrays
    raise FormatError(f"cannot serialize object of type {type(model).__name__}")


def save_model(model, path):
    """Persist a fitted model (or Projector) to the binary container."""
    kind, meta, arrays = _model_payload(model)
    meta_text = "\n".join(f"{k}={v}" for k, v in meta.items())

    def write(fh):
        fh.write(MAGIC)
        fh.write(struct.pack("<I", FORMAT_VERSION))
        fh.write(_pack_str(kind))
        fh.write(_pack_str(meta_text))
        fh.write(struct.pack("<I", len(arrays)))
        for name, arr in arrays:
            fh.write(_pack_array(name, arr))

    _atomic_write(path, write, mode="wb")


def load_model(path):
    """Load a model saved by save_model; predictions match bitwise."""
    with open(path, "rb") as fh:
        data = fh.read()
    rd = _Reader(data, path)
    if rd.take(4) != MAGIC:
        raise FormatError(f"{path}: bad magic, not an omx model file")
    (version,) = struct.unpack("<I", rd.take(4))
    if version != FORMAT_VERSION:
        raise FormatError(
            f"{path}: unsupported format version {version} (expected {FORMAT_VERSION})"
        )
    kind = rd.read_str()
    meta_text = rd.read_str()
    meta = dict(line.split("=", 1) for line in meta_text.splitlines() if line)
    (n_arrays,) = struct.unpack("<I", rd.take(4))
    arrays = dict(rd.read_array() for _ in range(n_arrays))
    if rd.pos != len(data):
        raise IntegrityError(f"{path}: {len(data) - rd.pos} trailing bytes")
    return _rebuild(kind, meta, arrays, path)


def _rebuild(kind, meta, arrays, path):
    try:
        if kind == "esn":
            cfg = EsnConfig(
                reservoir_size=int(meta["reservoir_size"]),
                spectral_radius=float(meta["spectral_radius"]),
                input_scale=float(meta["input_scale"]),
                reservoir_density=float(meta["reservoir_density"]),
                state_iters=int(meta["state_iters"]),
                state_tol=float(meta["state_tol"]),
                ridge_lambda=float(meta["ridge_lambda"]),
                seed=int(meta["seed"]),
            )
            return EsnModel(cfg, arrays["W_in"], arrays["W"], arrays.get("W_out"))
        if kind == "elm":
            cfg = ElmConfig(
                hidden_size=int(meta["hidden_size"]),
                activation=meta["activation"],
                seed=int(meta["seed"]),
            )
            return ElmModel(cfg, arrays["W_in"], arrays["b"], arrays.get("W_out"))
        if kind == "forest":
            cfg = ForestConfig(
                n_trees=int(meta["n_trees"]),
                max_leaf_nodes=int(meta["max_leaf_nodes"]),
                min_samples_leaf=int(meta["min_samples_leaf"]),
                feature_fraction=float(meta["feature_fraction"]),
                bootstrap=bool(int(meta["bootstrap"])),
                seed=int(meta["seed"]),
            )
            trees = []
            for i in range(cfg.n_trees):
                trees.append(
                    RegressionTree(
                        arrays[f"t{i}.feature"],
                        arrays[f"t{i}.threshold"],
                        arrays[f"t{i}.left"],
                        arrays[f"t{i}.right"],
                        arrays[f"t{i}.leaf_id"],
                        arrays[f"t{i}.leaf_values"],
                        arrays[f"t{i}.leaf_counts"],
                    )
                )
            return ForestModel(
                cfg, trees, int(meta["input_dim"]), int(meta["output_dim"])
            )
        if kind == "projector":
            return Projector(
                arrays["kept_columns"],
                arrays["components"],
                arrays["singular_values"],
                arrays["mean"],
                arrays["std"],
            )
    except KeyError as exc:
        raise IntegrityError(f"{path}: missing field {exc}")
    raise FormatError(f"{path}: unknown model kind {kind!r}")
