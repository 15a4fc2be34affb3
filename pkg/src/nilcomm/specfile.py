"""Reader and writer for group-spec files.

Grammar (one statement per line, ``#`` starts a comment)::

    name <text>
    [algebra]
    dim <n>
    class <c>                      # optional, checked against the brackets
    bracket (i, j, k, value)       # [e_i, e_j] has e_k-coefficient value; 1-based
    [lattice]                      # optional, defaults to the standard lattice
    basis <vector>
    [torus]
    gen <label>: <matrix>
    [pauto]
    level <N_u> <N_t>
    image <vector> | <exponents>   # one per generator: lattice basis first, then torus
    [embedding <name>]
    gen <label>: <matrix>          # one per generator, same order as pauto images
    expect_h3 pass|fail

Vectors are comma-separated rationals (``1,0,1/2``); matrices separate
rows with ``;`` (``2,1;1,1``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .case_studies import Embedding
from .commensurator import PartialAutomorphism
from .lie import InvalidAlgebra, LogLattice, NilLieAlgebra
from .linalg import QMatrix
from .polycyclic import CongruenceLevel, GroupElement, InvalidSpec, LatticeSpec, TorusGen


class SpecSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass
class PautoBlock:
    level: CongruenceLevel
    images: list
    line: int = 0


@dataclass
class SpecFile:
    spec: LatticeSpec | None = None
    pautos: list = field(default_factory=list)
    embeddings: list = field(default_factory=list)


_SECTIONS = {"algebra", "lattice", "torus", "pauto", "embedding"}


def _fraction(tok: str, line: int, col: int) -> Fraction:
    tok = tok.strip()
    if not re.fullmatch(r"[+-]?\d+(/\d+)?", tok):
        raise SpecSyntaxError(f"expected a rational number, got {tok!r}", line, col)
    try:
        return Fraction(tok)
    except ZeroDivisionError:
        raise SpecSyntaxError(f"zero denominator in {tok!r}", line, col) from None


def _vector(text: str, line: int, col: int) -> tuple:
    if not text.strip():
        return ()
    out = []
    offset = 0
    for part in text.split(","):
        out.append(_fraction(part, line, col + offset + len(part) - len(part.lstrip())))
        offset += len(part) + 1
    return tuple(out)


def _matrix(text: str, line: int, col: int) -> QMatrix:
    rows = []
    offset = 0
    for part in text.split(";"):
        rows.append(_vector(part, line, col + offset))
        offset += len(part) + 1
    if not rows or any(len(r) != len(rows[0]) for r in rows) or not rows[0]:
        raise SpecSyntaxError("matrix rows must be nonempty and of equal length", line, col)
    return QMatrix.from_rows(rows)


def _element(text: str, line: int, col: int) -> GroupElement:
    uni, _, tor = text.partition("|")
    tcol = col + len(uni) + 1
    exps = _vector(tor, line, tcol)
    if any(e.denominator != 1 for e in exps):
        raise SpecSyntaxError("torus exponents must be integers", line, tcol + len(tor) - len(tor.lstrip()))
    return GroupElement(_vector(uni, line, col), tuple(int(e) for e in exps))


def parse(text: str) -> SpecFile:
    out = SpecFile()
    name = ""
    dim = None
    cls = None
    brackets: list[tuple] = []
    basis: list[tuple] = []
    torus: list[TorusGen] = []
    section = None
    algebra_line = 0
    current_embed: dict | None = None

    def finish_embed():
        if current_embed is not None:
            out.embeddings.append(Embedding(current_embed["name"], tuple(current_embed["images"]),
                                            current_embed["expect"]))

    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        col = len(body) - len(body.lstrip()) + 1
        body = body.strip()
        if body.startswith("["):
            m = re.fullmatch(r"\[(\w+)(?:\s+([\w.-]+))?\]", body)
            if not m or m.group(1) not in _SECTIONS:
                raise SpecSyntaxError(f"unknown section header {body!r}", lineno, col)
            section = m.group(1)
            if section == "embedding":
                finish_embed()
                current_embed = {"name": m.group(2) or f"embedding{len(out.embeddings) + 1}",
                                 "images": [], "expect": None}
            elif m.group(2):
                raise SpecSyntaxError(f"section [{section}] takes no name", lineno, col)
            if section == "algebra":
                algebra_line = lineno
            if section == "pauto":
                out.pautos.append(PautoBlock(None, [], lineno))
            continue
        key, _, rest = body.partition(" ")
        rest = rest.strip()
        rcol = col + len(key) + (len(body[len(key):]) - len(body[len(key):].lstrip()))
        if section is None:
            if key == "name":
                name = rest
                continue
            raise SpecSyntaxError(f"statement {key!r} outside any section", lineno, col)
        if section == "algebra":
            if key == "dim":
                dim = int(_fraction(rest, lineno, rcol))
            elif key == "class":
                cls = int(_fraction(rest, lineno, rcol))
            elif key == "bracket":
                parts = [p for p in re.split(r"[\s,()]+", rest) if p]
                if len(parts) != 4:
                    raise SpecSyntaxError("bracket needs (i, j, k, value)", lineno, rcol)
                i, j, k = (int(_fraction(p, lineno, rcol)) for p in parts[:3])
                if dim is None:
                    raise SpecSyntaxError("dim must come before brackets", lineno, col)
                if not all(1 <= x <= dim for x in (i, j, k)):
                    raise SpecSyntaxError("bracket index out of range", lineno, rcol)
                brackets.append((i - 1, j - 1, k - 1, _fraction(parts[3], lineno, rcol)))
            else:
                raise SpecSyntaxError(f"unknown algebra statement {key!r}", lineno, col)
        elif section == "lattice":
            if key != "basis":
                raise SpecSyntaxError(f"unknown lattice statement {key!r}", lineno, col)
            basis.append(_vector(rest, lineno, rcol))
        elif section in ("torus", "embedding"):
            if section == "embedding" and key == "expect_h3":
                if rest not in ("pass", "fail"):
                    raise SpecSyntaxError("expect_h3 takes pass or fail", lineno, rcol)
                current_embed["expect"] = rest == "pass"
                continue
            if key != "gen":
                raise SpecSyntaxError(f"unknown {section} statement {key!r}", lineno, col)
            label, sep, mat = rest.partition(":")
            if not sep:
                raise SpecSyntaxError("expected 'gen <label>: <matrix>'", lineno, rcol)
            M = _matrix(mat, lineno, rcol + len(label) + 1)
            if section == "torus":
                torus.append(TorusGen(M, label.strip()))
            else:
                current_embed["images"].append(M)
        elif section == "pauto":
            block = out.pautos[-1]
            if key == "level":
                parts = rest.split()
                if len(parts) != 2:
                    raise SpecSyntaxError("level needs two positive integers", lineno, rcol)
                try:
                    block.level = CongruenceLevel(*(int(_fraction(p, lineno, rcol)) for p in parts))
                except ValueError as exc:
                    raise SpecSyntaxError(str(exc), lineno, rcol) from None
            elif key == "image":
                block.images.append(_element(rest, lineno, rcol))
            else:
                raise SpecSyntaxError(f"unknown pauto statement {key!r}", lineno, col)
    finish_embed()
    for block in out.pautos:
        if block.level is None:
            raise SpecSyntaxError("pauto block without a level", block.line)

    if dim is not None:
        try:
            algebra = NilLieAlgebra.from_brackets(dim, brackets, cls)
        except InvalidAlgebra as exc:
            raise SpecSyntaxError(f"invalid algebra: {exc}", algebra_line) from None
        try:
            lattice = LogLattice(algebra, tuple(basis)) if basis else LogLattice.standard(algebra)
            out.spec = LatticeSpec(algebra, lattice, tuple(torus), name)
        except (InvalidSpec, ValueError) as exc:
            raise SpecSyntaxError(f"invalid spec: {exc}", algebra_line) from None
    return out


def pauto_from_block(spec: LatticeSpec, block: PautoBlock) -> PartialAutomorphism:
    return PartialAutomorphism(spec, block.level, tuple(block.images))


def format_spec(spec: LatticeSpec) -> str:
    a = spec.algebra
    lines = []
    if spec.name:
        lines.append(f"name {spec.name}")
    lines += ["[algebra]", f"dim {a.dim}", f"class {a.nilpotency_class}"]
    for i in range(a.dim):
        for j in range(i + 1, a.dim):
            for k, c in enumerate(a.structure[i][j]):
                if c:
                    lines.append(f"bracket ({i + 1}, {j + 1}, {k + 1}, {c})")
    lines.append("[lattice]")
    lines += ["basis " + ",".join(str(x) for x in b) for b in spec.uni_lattice.basis]
    if spec.torus_gens:
        lines.append("[torus]")
        lines += [f"gen {g.label}: {g.action.literal()}" for g in spec.torus_gens]
    return "\n".join(lines) + "\n"


def format_pauto(phi: PartialAutomorphism) -> str:
    lines = ["[pauto]", f"level {phi.source.uni_scale} {phi.source.torus_scale}"]
    lines += [f"image {g.literal()}".rstrip() for g in phi.gen_images]
    return "\n".join(lines) + "\n"


def fixture_path(name: str) -> Path:
    """A bundled fixture by file name."""
    ref = resources.files("nilcomm") / "fixtures" / name
    return Path(str(ref))


def resolve(path: str) -> Path:
    """An existing file, or a bundled fixture with that name."""
    p = Path(path)
    if p.exists():
        return p
    f = fixture_path(p.name)
    if f.exists():
        return f
    raise FileNotFoundError(path)


def load(path: str) -> SpecFile:
    return parse(resolve(path).read_text())


def fixture_names() -> list[str]:
    root = resources.files("nilcomm") / "fixtures"
    return sorted(p.name for p in root.iterdir() if p.name.endswith((".spec", ".pauto")))
