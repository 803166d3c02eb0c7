"""Matrix file I/O: MatrixMarket array and coordinate formats, and
headerless CSV. Values are written with full double precision so an
array-format round trip is byte-identical."""

import numpy as np

from .linalg import as_matrix

FORMATS = ("matrixmarket-array", "matrixmarket-coordinate", "csv")

_MM_ARRAY_HEADER = "%%MatrixMarket matrix array real general"
_MM_COORD_HEADER = "%%MatrixMarket matrix coordinate real general"


class MatrixParseError(ValueError):
    """Malformed matrix file; carries the offending path and line number."""

    def __init__(self, path, line, message):
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        self.line = line
        self.message = message


def _float(token, path, line):
    try:
        value = float(token)
    except ValueError:
        raise MatrixParseError(path, line, f"non-numeric token {token!r}") from None
    if not np.isfinite(value):
        raise MatrixParseError(path, line, f"non-finite value {token!r}")
    return value


def _int(token, path, line):
    try:
        return int(token)
    except ValueError:
        raise MatrixParseError(path, line, f"expected integer, got {token!r}") from None


def _data_lines(lines, path):
    for no, raw in lines:
        text = raw.strip()
        if not text or text.startswith("%"):
            continue
        yield no, text


def parse_matrix(path, fmt=None):
    """Read a dense matrix from `path`.

    fmt is one of 'matrixmarket-array', 'matrixmarket-coordinate', 'csv',
    or None to detect from the file header. MatrixMarket array data is
    column-major per the format definition; coordinate files use 1-based
    indices and densify missing entries to zero.
    """
    if fmt is not None and fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}, expected one of {FORMATS}")
    with open(path, "r", encoding="utf-8") as handle:
        lines = list(enumerate(handle.read().splitlines(), start=1))
    if not lines:
        raise MatrixParseError(path, 1, "empty file")

    first = lines[0][1].strip()
    if first.startswith("%%MatrixMarket"):
        header_fmt = _parse_mm_header(first, path)
        if fmt is not None and fmt != header_fmt:
            raise MatrixParseError(path, 1,
                                   f"header declares {header_fmt}, expected {fmt}")
        if header_fmt == "matrixmarket-array":
            return _parse_mm_array(lines[1:], path)
        return _parse_mm_coordinate(lines[1:], path)
    if fmt in ("matrixmarket-array", "matrixmarket-coordinate"):
        raise MatrixParseError(path, 1, "missing MatrixMarket header")
    return _parse_csv(lines, path)


def _parse_mm_header(line, path):
    tokens = line.split()
    if len(tokens) < 5 or tokens[1] != "matrix" or tokens[3] != "real" \
            or tokens[4] != "general" or tokens[2] not in ("array", "coordinate"):
        raise MatrixParseError(path, 1, f"unsupported MatrixMarket header {line!r}")
    return f"matrixmarket-{tokens[2]}"


def _parse_mm_array(lines, path):
    data = _data_lines(lines, path)
    try:
        no, size_line = next(data)
    except StopIteration:
        raise MatrixParseError(path, len(lines) + 1, "missing size line") from None
    tokens = size_line.split()
    if len(tokens) != 2:
        raise MatrixParseError(path, no, f"size line must be 'rows cols', got {size_line!r}")
    m = _int(tokens[0], path, no)
    n = _int(tokens[1], path, no)
    if m < 1 or n < 1:
        raise MatrixParseError(path, no, f"dimensions must be positive, got {m} {n}")
    values = []
    for no, text in data:
        for token in text.split():
            if len(values) == m * n:
                raise MatrixParseError(path, no, "more entries than rows*cols")
            values.append(_float(token, path, no))
    if len(values) != m * n:
        raise MatrixParseError(path, len(lines) + 1,
                               f"expected {m * n} entries, found {len(values)}")
    return np.array(values).reshape((n, m)).T  # file order is column-major


def _parse_mm_coordinate(lines, path):
    data = _data_lines(lines, path)
    try:
        no, size_line = next(data)
    except StopIteration:
        raise MatrixParseError(path, len(lines) + 1, "missing size line") from None
    tokens = size_line.split()
    if len(tokens) != 3:
        raise MatrixParseError(path, no,
                               f"size line must be 'rows cols nnz', got {size_line!r}")
    m = _int(tokens[0], path, no)
    n = _int(tokens[1], path, no)
    nnz = _int(tokens[2], path, no)
    if m < 1 or n < 1 or nnz < 0:
        raise MatrixParseError(path, no, f"bad size line {size_line!r}")
    out = np.zeros((m, n))
    seen = set()
    count = 0
    for no, text in data:
        tokens = text.split()
        if len(tokens) != 3:
            raise MatrixParseError(path, no, f"entry must be 'i j value', got {text!r}")
        i = _int(tokens[0], path, no)
        j = _int(tokens[1], path, no)
        if not (1 <= i <= m and 1 <= j <= n):
            raise MatrixParseError(path, no, f"index ({i}, {j}) out of range")
        if (i, j) in seen:
            raise MatrixParseError(path, no, f"duplicate entry ({i}, {j})")
        seen.add((i, j))
        out[i - 1, j - 1] = _float(tokens[2], path, no)
        count += 1
    if count != nnz:
        raise MatrixParseError(path, len(lines) + 1,
                               f"expected {nnz} entries, found {count}")
    return out


def _parse_csv(lines, path):
    rows = []
    width = None
    for no, text in _data_lines(lines, path):
        tokens = [t.strip() for t in text.split(",")]
        if width is None:
            width = len(tokens)
        elif len(tokens) != width:
            raise MatrixParseError(path, no,
                                   f"row has {len(tokens)} fields, expected {width}")
        rows.append([_float(t, path, no) for t in tokens])
    if not rows:
        raise MatrixParseError(path, len(lines) + 1, "no data rows")
    return np.array(rows)


def write_matrix(path, a, fmt="matrixmarket-array"):
    """Write `a` to `path` in the given format (full double precision)."""
    am = as_matrix(a)
    m, n = am.shape
    if fmt == "matrixmarket-array":
        chunks = [_MM_ARRAY_HEADER, f"{m} {n}"]
        chunks.extend(repr(float(v)) for v in am.T.ravel())  # column-major
    elif fmt == "matrixmarket-coordinate":
        ii, jj = np.nonzero(am)
        chunks = [_MM_COORD_HEADER, f"{m} {n} {ii.size}"]
        chunks.extend(f"{i + 1} {j + 1} {repr(float(am[i, j]))}"
                      for i, j in zip(ii, jj))
    elif fmt == "csv":
        chunks = [",".join(repr(float(v)) for v in row) for row in am]
    else:
        raise ValueError(f"unknown format {fmt!r}, expected one of {FORMATS}")
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(chunks) + "\n")
