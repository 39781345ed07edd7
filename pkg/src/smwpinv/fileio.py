"""Matrix Market files, instance bundles and JSON reports.

Matrices are written in the dense ``array`` layout with the ``complex
general`` qualifiers, every component printed with 17 significant
digits, so a write/read cycle reproduces each float64 bit for bit.  The
reader also accepts ``coordinate`` files and the ``real``, ``integer``,
``symmetric``, ``skew-symmetric`` and ``hermitian`` qualifiers; real data
is promoted to complex.

A bundle is a directory holding one ``.mtx`` file per matrix plus
``manifest.json``.  Manifests and command reports are JSON documents
tagged with a ``schema`` key; :func:`read_document` dispatches on it.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParseError

__all__ = [
    "MANIFEST_SCHEMA",
    "REPORT_SCHEMA",
    "BundleManifest",
    "RunReport",
    "read_bundle",
    "read_document",
    "read_mtx",
    "write_bundle",
    "write_document",
    "write_mtx",
]

MANIFEST_SCHEMA = "smwpinv/bundle-manifest/v1"
REPORT_SCHEMA = "smwpinv/run-report/v1"

_FIELDS = ("real", "integer", "complex", "pattern")
_SYMMETRIES = ("general", "symmetric", "skew-symmetric", "hermitian")


def write_mtx(path, a, comment=None):
    """Write ``a`` as a Matrix Market ``array complex general`` file."""
    a = np.asarray(a, dtype=np.complex128)
    rows, cols = a.shape
    lines = ["%%MatrixMarket matrix array complex general"]
    if comment:
        lines.extend(f"% {line}" for line in comment.splitlines())
    lines.append(f"{rows} {cols}")
    # array layout is column-major
    for z in a.T.ravel():
        lines.append(f"{z.real:.17g} {z.imag:.17g}")
    Path(path).write_text("\n".join(lines) + "\n")


def _number(tok, path, lineno):
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"not a number: {tok!r}", path, lineno) from None


def _index(tok, limit, path, lineno):
    try:
        i = int(tok)
    except ValueError:
        raise ParseError(f"not an integer index: {tok!r}", path, lineno) from None
    if not 1 <= i <= limit:
        raise ParseError(f"index {i} outside 1..{limit}", path, lineno)
    return i - 1


def read_mtx(path):
    """Read a Matrix Market file into a complex128 array.

    Raises
    ------
    ParseError
        With the offending line number for malformed input.
    OSError
        If the file cannot be read.
    """
    path = str(path)
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError("empty file", path, 1)
    header = lines[0].split()
    if len(header) != 5 or header[0].lower() != "%%matrixmarket":
        raise ParseError("missing %%MatrixMarket header", path, 1)
    obj, layout, dtype, symmetry = (h.lower() for h in header[1:])
    if obj != "matrix":
        raise ParseError(f"unsupported object {obj!r}", path, 1)
    if layout not in ("array", "coordinate"):
        raise ParseError(f"unsupported format {layout!r}", path, 1)
    if dtype not in _FIELDS or (dtype == "pattern" and layout == "array"):
        raise ParseError(f"unsupported field {dtype!r}", path, 1)
    if symmetry not in _SYMMETRIES:
        raise ParseError(f"unsupported symmetry {symmetry!r}", path, 1)
    if symmetry == "hermitian" and dtype != "complex":
        raise ParseError("hermitian symmetry needs complex field", path, 1)

    body = [(i, ln.split()) for i, ln in enumerate(lines[1:], start=2)
            if ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise ParseError("missing size line", path, len(lines))
    size_line, size = body[0]
    want = 3 if layout == "coordinate" else 2
    if len(size) != want:
        raise ParseError(f"size line needs {want} integers", path, size_line)
    try:
        dims = [int(t) for t in size]
    except ValueError:
        raise ParseError("size line needs integers", path, size_line) from None
    rows, cols = dims[0], dims[1]
    if rows < 0 or cols < 0:
        raise ParseError("negative dimension", path, size_line)
    if symmetry != "general" and rows != cols:
        raise ParseError(f"{symmetry} matrix must be square", path, size_line)

    width = {"complex": 2, "pattern": 0}.get(dtype, 1)
    entries = body[1:]
    out = np.zeros((rows, cols), dtype=np.complex128)

    def value(toks, lineno):
        if dtype == "pattern":
            return 1.0
        if dtype == "complex":
            return complex(_number(toks[0], path, lineno),
                           _number(toks[1], path, lineno))
        return complex(_number(toks[0], path, lineno), 0.0)

    def place(i, j, z):
        out[i, j] = z
        if i != j:
            if symmetry == "symmetric":
                out[j, i] = z
            elif symmetry == "skew-symmetric":
                out[j, i] = -z
            elif symmetry == "hermitian":
                out[j, i] = z.conjugate()

    if layout == "coordinate":
        nnz = dims[2]
        if len(entries) != nnz:
            raise ParseError(f"expected {nnz} entries, found {len(entries)}",
                             path, entries[-1][0] if entries else size_line)
        for lineno, toks in entries:
            if len(toks) != 2 + width:
                raise ParseError(f"expected {2 + width} fields", path, lineno)
            i = _index(toks[0], rows, path, lineno)
            j = _index(toks[1], cols, path, lineno)
            place(i, j, value(toks[2:], lineno))
        return out

    if symmetry == "general":
        slots = [(i, j) for j in range(cols) for i in range(rows)]
    else:
        start = 1 if symmetry == "skew-symmetric" else 0
        slots = [(i, j) for j in range(cols) for i in range(j + start, rows)]
    if len(entries) != len(slots):
        raise ParseError(f"expected {len(slots)} entries, found {len(entries)}",
                         path, entries[-1][0] if entries else size_line)
    for (lineno, toks), (i, j) in zip(entries, slots):
        if len(toks) != width:
            raise ParseError(f"expected {width} fields", path, lineno)
        place(i, j, value(toks, lineno))
    return out


def _dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


@dataclass
class BundleManifest:
    """Description of a bundle directory."""

    regime: str
    spec: dict
    files: dict
    shapes: dict
    expected: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "schema": MANIFEST_SCHEMA,
            "regime": self.regime,
            "spec": self.spec,
            "files": self.files,
            "shapes": self.shapes,
            "expected": self.expected,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["regime"], d["spec"], d["files"], d["shapes"],
                   d.get("expected", {}))


@dataclass
class RunReport:
    """Outcome of one CLI command.

    ``verdict`` is one of ``valid``, ``one-inverse-only``, ``invalid`` and
    ``not-checked``.  ``timings`` holds wall-clock seconds and is only
    present when benchmarking was requested.  ``details`` carries
    command-specific extras (rank, singular values, precondition
    residuals, benchmark rows).
    """

    command: str
    inputs: list
    verdict: str = "not-checked"
    tol: float = None
    output: str = None
    method: str = None
    condition_report: dict = None
    penrose_residuals: list = None
    oracle: dict = None
    timings: dict = None
    details: dict = field(default_factory=dict)
    error: str = None

    def to_dict(self):
        return {
            "schema": REPORT_SCHEMA,
            "command": self.command,
            "inputs": self.inputs,
            "verdict": self.verdict,
            "tol": self.tol,
            "output": self.output,
            "method": self.method,
            "condition_report": self.condition_report,
            "penrose_residuals": self.penrose_residuals,
            "oracle": self.oracle,
            "timings": self.timings,
            "details": self.details,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, d):
        kwargs = {k: d.get(k) for k in (
            "command", "inputs", "verdict", "tol", "output", "method",
            "condition_report", "penrose_residuals", "oracle", "timings",
            "error")}
        kwargs["details"] = d.get("details") or {}
        return cls(**kwargs)

    def to_json(self):
        return _dumps(self.to_dict())


_SCHEMAS = {MANIFEST_SCHEMA: BundleManifest, REPORT_SCHEMA: RunReport}


def read_document(source):
    """Parse a manifest or run report from a path or a JSON string."""
    if isinstance(source, Path) or (isinstance(source, str)
                                    and not source.lstrip().startswith("{")):
        source = Path(source).read_text()
    d = json.loads(source)
    try:
        cls = _SCHEMAS[d.get("schema")]
    except KeyError:
        raise ValueError(f"unknown document schema {d.get('schema')!r}") from None
    return cls.from_dict(d)


def write_document(path, doc):
    Path(path).write_text(_dumps(doc.to_dict()))


def write_bundle(out_dir, matrices, regime, spec, expected=None):
    """Write ``matrices`` (name -> array) and a manifest into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files, shapes = {}, {}
    for name, arr in matrices.items():
        fname = f"{name}.mtx"
        write_mtx(out / fname, arr)
        files[name] = fname
        shapes[name] = list(np.shape(arr))
    manifest = BundleManifest(regime, spec, files, shapes, expected or {})
    write_document(out / "manifest.json", manifest)
    return manifest


def read_bundle(bundle_dir):
    """Load a bundle: returns ``(manifest, {name: array})``."""
    root = Path(bundle_dir)
    manifest = read_document(root / "manifest.json")
    mats = {name: read_mtx(root / fname) for name, fname in manifest.files.items()}
    return manifest, mats
