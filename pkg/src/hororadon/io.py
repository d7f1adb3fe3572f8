"""File formats: JSON for vertex, horocycle and Laurent data, CSV for grids.

Words are always integer arrays so that q > 9 parses unambiguously.
Integer-valued tables are written with integer ``re``/``im`` fields and come
back bit-identical.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import FormatError, ParameterMismatch
from .horocycle import HoroFunction
from .transforms import FreqFunction, VertexFunction
from .tree import Tree, Vertex


def atomic_write(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _split(val) -> tuple:
    if isinstance(val, (int, np.integer)):
        return int(val), 0
    c = complex(val)
    return c.real, c.imag


def _join(re, im):
    if isinstance(re, int) and isinstance(im, int) and not isinstance(re, bool):
        return re if im == 0 else complex(re, im)
    return complex(re, im)


def vertex_to_json(x: Vertex) -> dict:
    return {"word": list(x)}


def cylinder_to_json(u: Vertex) -> dict:
    return {"prefix": list(u)}


# -- parsing helpers ---------------------------------------------------------


def _load(text: str, path=None):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, path=path, line=exc.lineno) from None


def _get(obj, key, path, ctx, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError("missing field", path=path, field=f"{ctx}{key}")
    val = obj[key]
    if kind is not None and (not isinstance(val, kind) or isinstance(val, bool)):
        raise FormatError(f"expected {getattr(kind, '__name__', kind)}", path=path,
                          field=f"{ctx}{key}")
    return val


def _word(tree: Tree, raw, path, field) -> Vertex:
    if not isinstance(raw, list) or not all(isinstance(a, int) and not isinstance(a, bool)
                                            for a in raw):
        raise FormatError("word must be a list of integers", path=path, field=field)
    if not tree.is_vertex(raw):
        raise FormatError(f"{raw} is not a reduced word over 0..{tree.q}", path=path,
                          field=field)
    return tuple(raw)


def _tree(data, path, q_expected):
    q = _get(data, "q", path, "", int)
    if q < 2:
        raise FormatError("q must be >= 2", path=path, field="q")
    if q_expected is not None and q != q_expected:
        raise ParameterMismatch(f"file has q={q} but q={q_expected} was requested")
    return Tree(q)


# -- vertex functions --------------------------------------------------------


def dump_vertex_function(f: VertexFunction) -> str:
    entries = []
    for x in sorted(f.entries, key=lambda w: (len(w), w)):
        re, im = _split(f.entries[x])
        entries.append({"word": list(x), "re": re, "im": im})
    return json.dumps({"q": f.tree.q, "entries": entries}, indent=1)


def load_vertex_function(text: str, q: int | None = None, path=None) -> VertexFunction:
    data = _load(text, path)
    tree = _tree(data, path, q)
    raw = _get(data, "entries", path, "", list)
    out = {}
    for i, e in enumerate(raw):
        ctx = f"entries[{i}]."
        x = _word(tree, _get(e, "word", path, ctx), path, ctx + "word")
        re = _get(e, "re", path, ctx, (int, float))
        im = e.get("im", 0) if isinstance(e, dict) else 0
        if not isinstance(im, (int, float)) or isinstance(im, bool):
            raise FormatError("expected number", path=path, field=ctx + "im")
        out[x] = out.get(x, 0) + _join(re, im)
    return VertexFunction(tree, out)


# -- horocycle functions -----------------------------------------------------


def dump_horofunction(F: HoroFunction) -> str:
    values = []
    words = F.tree.words(F.depth)
    for i, u in enumerate(words):
        for j in range(F.values.shape[1]):
            val = F.values[i, j]
            if val != 0:
                re, im = _split(val.item() if hasattr(val, "item") else val)
                values.append({"prefix": list(u), "n": F.n_min + j, "re": re, "im": im})
    doc = {"q": F.tree.q, "base": list(F.base), "depth": F.depth,
           "n_min": F.n_min, "n_max": F.n_max, "values": values}
    return json.dumps(doc, indent=1)


def load_horofunction(text: str, q: int | None = None, path=None) -> HoroFunction:
    data = _load(text, path)
    tree = _tree(data, path, q)
    base = _word(tree, _get(data, "base", path, ""), path, "base")
    depth = _get(data, "depth", path, "", int)
    n_min = _get(data, "n_min", path, "", int)
    n_max = _get(data, "n_max", path, "", int)
    if depth < 0:
        raise FormatError("depth must be >= 0", path=path, field="depth")
    if n_max < n_min - 1:
        raise FormatError("n_max < n_min", path=path, field="n_max")
    raw = _get(data, "values", path, "", list)
    idx = tree.cylinder_index(depth)
    entries = []
    exact = True
    for i, e in enumerate(raw):
        ctx = f"values[{i}]."
        u = _word(tree, _get(e, "prefix", path, ctx), path, ctx + "prefix")
        if len(u) != depth:
            raise FormatError(f"prefix length {len(u)} != depth {depth}", path=path,
                              field=ctx + "prefix")
        n = _get(e, "n", path, ctx, int)
        if not n_min <= n <= n_max:
            raise FormatError(f"n={n} outside [{n_min}, {n_max}]", path=path, field=ctx + "n")
        val = _join(_get(e, "re", path, ctx, (int, float)), e.get("im", 0))
        exact = exact and isinstance(val, int)
        entries.append((idx[u], n - n_min, val))
    dtype = np.int64 if exact else complex
    values = np.zeros((tree.num_cylinders(depth), n_max - n_min + 1), dtype=dtype)
    for i, j, val in entries:
        values[i, j] += val
    return HoroFunction(tree, base, depth, n_min, values)


# -- frequency data ----------------------------------------------------------


def dump_laurent(G: FreqFunction) -> str:
    cyl = []
    for i, u in enumerate(G.tree.words(G.depth)):
        coeffs = [{"n": G.n_min + j, "re": float(c.real), "im": float(c.imag)}
                  for j, c in enumerate(G.coeffs[i]) if c != 0]
        cyl.append({"prefix": list(u), "coeffs": coeffs})
    doc = {"q": G.tree.q, "base": list(G.base), "depth": G.depth, "cylinders": cyl}
    return json.dumps(doc, indent=1)


def load_laurent(text: str, q: int | None = None, path=None) -> FreqFunction:
    data = _load(text, path)
    tree = _tree(data, path, q)
    base = _word(tree, _get(data, "base", path, ""), path, "base")
    depth = _get(data, "depth", path, "", int)
    raw = _get(data, "cylinders", path, "", list)
    idx = tree.cylinder_index(depth)
    items = []
    for i, c in enumerate(raw):
        ctx = f"cylinders[{i}]."
        u = _word(tree, _get(c, "prefix", path, ctx), path, ctx + "prefix")
        if len(u) != depth:
            raise FormatError(f"prefix length {len(u)} != depth {depth}", path=path,
                              field=ctx + "prefix")
        for j, e in enumerate(_get(c, "coeffs", path, ctx, list)):
            cctx = f"{ctx}coeffs[{j}]."
            n = _get(e, "n", path, cctx, int)
            re = _get(e, "re", path, cctx, (int, float))
            im = _get(e, "im", path, cctx, (int, float))
            items.append((idx[u], n, complex(re, im)))
    ns = [n for _, n, _ in items] or [0]
    n_min, n_max = min(ns), max(ns)
    coeffs = np.zeros((tree.num_cylinders(depth), n_max - n_min + 1), dtype=complex)
    for i, n, c in items:
        coeffs[i, n - n_min] += c
    return FreqFunction(tree, base, depth, coeffs=coeffs, n_min=n_min)


def _prefix_str(u: Vertex) -> str:
    return " ".join(str(a) for a in u)


def dump_grid_csv(G: FreqFunction, M: int) -> str:
    """Grid samples as CSV: cylinder_prefix, k, t_k, re, im.

    A leading ``#`` comment records q, base, depth and M; prefixes are
    space-separated letters.
    """
    S = G.grid(M)
    t = G.tree.grid(M)
    buf = io.StringIO()
    buf.write(f"# q={G.tree.q} base={_prefix_str(G.base)} depth={G.depth} M={M}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["cylinder_prefix", "k", "t_k", "re", "im"])
    for i, u in enumerate(G.tree.words(G.depth)):
        pu = _prefix_str(u)
        for k in range(M):
            w.writerow([pu, k, repr(float(t[k])), repr(float(S[i, k].real)),
                        repr(float(S[i, k].imag))])
    return buf.getvalue()


def load_grid_csv(text: str, q: int | None = None, path=None) -> FreqFunction:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise FormatError("missing '# q=... base=... depth=... M=...' header", path=path, line=1)
    meta = {}
    for tok in lines[0][1:].split():
        if "=" in tok:
            key, _, val = tok.partition("=")
            meta[key] = val
    # base may be empty or several space-separated letters
    head = lines[0][1:]
    try:
        base_txt = head.split("base=")[1].split("depth=")[0].strip()
        fq = int(meta["q"])
        depth = int(meta["depth"])
        M = int(meta["M"])
    except (KeyError, IndexError, ValueError):
        raise FormatError("malformed grid header", path=path, line=1) from None
    if q is not None and fq != q:
        raise ParameterMismatch(f"file has q={fq} but q={q} was requested")
    tree = Tree(fq)
    base = _word(tree, [int(a) for a in base_txt.split()], path, "base")
    idx = tree.cylinder_index(depth)
    S = np.full((tree.num_cylinders(depth), M), np.nan, dtype=complex)
    reader = csv.reader(lines[1:])
    header = next(reader, None)
    if header != ["cylinder_prefix", "k", "t_k", "re", "im"]:
        raise FormatError("unexpected column header", path=path, line=2)
    for lineno, row in enumerate(reader, start=3):
        if len(row) != 5:
            raise FormatError("expected 5 columns", path=path, line=lineno)
        try:
            u = tuple(int(a) for a in row[0].split())
            k = int(row[1])
            val = complex(float(row[3]), float(row[4]))
        except ValueError:
            raise FormatError("unparseable number", path=path, line=lineno) from None
        if u not in idx or not 0 <= k < M:
            raise FormatError("prefix or k out of range", path=path, line=lineno)
        S[idx[u], k] = val
    if np.isnan(S.real).any():
        raise FormatError("grid is incomplete", path=path)
    return FreqFunction(tree, base, depth, samples=S)
