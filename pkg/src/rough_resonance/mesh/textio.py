"""
Plain-text mesh format.

    mesh2d <nv> <nt>
    <x> <y> <tag>            nv lines, tag in {i, d, g}
    <v0> <v1> <v2>           nt lines, counter-clockwise
    edges <ne>
    <va> <vb> <ca> <cb>      ne interface edges with the corner vertices of their chord
"""

from pathlib import Path

import numpy as np

from rough_resonance.mesh.trimesh import (
    TAG_CODES,
    TAG_VALUES,
    MeshError,
    TriMesh,
    validate_mesh,
)


class MeshParseError(MeshError):
    """Raised when mesh text is malformed."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        location = f" at line {line}" if line is not None else ""
        super().__init__(f"{message}{location}")


def format_coordinate(value: float) -> str:
    """Shortest round-trip representation, integers without a trailing '.0'."""
    text = repr(float(value))
    if text.endswith(".0"):
        text = text[:-2]
    if text == "-0":
        text = "0"
    return text


def export_mesh(t: TriMesh) -> str:
    """Serialize a mesh to the text format."""
    lines = [f"mesh2d {t.n_vertices} {t.n_triangles}"]
    for (x, y), tag in zip(t.vertices, t.tags, strict=True):
        lines.append(f"{format_coordinate(x)} {format_coordinate(y)} {TAG_CODES[int(tag)]}")
    for a, b, c in t.triangles:
        lines.append(f"{a} {b} {c}")
    lines.append(f"edges {len(t.interface_edges)}")
    for (va, vb), (ca, cb) in zip(t.interface_edges, t.edge_chords, strict=True):
        lines.append(f"{va} {vb} {ca} {cb}")
    return "\n".join(lines) + "\n"


def _int(text: str, line: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise MeshParseError(f"Invalid integer '{text}'", line) from None


def _float(text: str, line: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise MeshParseError(f"Invalid number '{text}'", line) from None


def import_mesh(text: str, validate: bool = True) -> TriMesh:
    """
    Parse mesh text and re-validate the mesh invariants.

    Args:
        text: Mesh text.
        validate: Run validate_mesh on the result.

    Returns:
        Parsed TriMesh.

    Raises:
        MeshParseError: For malformed text, with a 1-based line number.
        MeshValidationError: If the mesh violates an invariant.
    """
    # Keep original line numbers while skipping blank lines
    numbered = [(i + 1, line) for i, line in enumerate(text.splitlines()) if line.strip()]
    lines = [line for _, line in numbered]
    lineno = [n for n, _ in numbered]

    def at(pos: int) -> int:
        return lineno[pos] if pos < len(lineno) else len(text.splitlines()) + 1

    def fields(pos: int, count: int) -> list[str]:
        if pos >= len(lines):
            raise MeshParseError("Unexpected end of mesh text", at(pos))
        parts = lines[pos].split()
        if len(parts) != count:
            raise MeshParseError(f"Expected {count} fields, got {len(parts)}", at(pos))
        return parts

    header = fields(0, 3)
    if header[0] != "mesh2d":
        raise MeshParseError("Missing 'mesh2d' header", at(0))
    nv = _int(header[1], at(0))
    nt = _int(header[2], at(0))
    if nv < 0 or nt < 0:
        raise MeshParseError("Negative vertex or triangle count", at(0))

    vertices = np.zeros((nv, 2))
    tags = np.zeros(nv, dtype=np.int8)
    pos = 1
    for i in range(nv):
        x, y, tag = fields(pos, 3)
        if tag not in TAG_VALUES:
            raise MeshParseError(f"Unknown vertex tag '{tag}'", at(pos))
        vertices[i] = (_float(x, at(pos)), _float(y, at(pos)))
        tags[i] = TAG_VALUES[tag]
        pos += 1

    triangles = np.zeros((nt, 3), dtype=np.int64)
    for i in range(nt):
        parts = fields(pos, 3)
        triangles[i] = [_int(p, at(pos)) for p in parts]
        pos += 1

    section = fields(pos, 2) if pos < len(lines) else ["edges", "0"]
    if section[0] != "edges":
        raise MeshParseError("Missing 'edges' section", at(pos))
    ne = _int(section[1], at(pos))
    pos += 1
    edges = np.zeros((ne, 2), dtype=np.int64)
    chords = np.zeros((ne, 2), dtype=np.int64)
    for i in range(ne):
        parts = fields(pos, 4)
        values = [_int(p, at(pos)) for p in parts]
        if max(values) >= nv or min(values) < 0:
            raise MeshParseError("Edge references a missing vertex", at(pos))
        edges[i] = values[:2]
        chords[i] = values[2:]
        pos += 1
    if pos < len(lines):
        raise MeshParseError("Trailing content after edges section", at(pos))

    mesh = TriMesh(
        vertices=vertices,
        triangles=triangles,
        tags=tags,
        interface_edges=edges,
        edge_chords=chords,
    )
    if validate:
        validate_mesh(mesh)
    return mesh


def save_mesh(t: TriMesh, path: str | Path) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(export_mesh(t), encoding="utf-8")
    return out


def load_mesh(path: str | Path) -> TriMesh:
    return import_mesh(Path(path).read_text(encoding="utf-8"))
