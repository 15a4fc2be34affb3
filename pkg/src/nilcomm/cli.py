"""Command-line front end.

Exit status: 0 on success, 1 when a check fails or a level search hits its
cap, 2 on unreadable or malformed input.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from fractions import Fraction

from . import case_studies as cs
from . import commensurator as cm
from . import specfile
from .lie import LogLattice, bch, exp_unipotent, log_unipotent
from .linalg import (
    QMatrix,
    all_eigenvalues_on_unit_circle,
    charpoly,
    is_semisimple,
    jordan_chevalley,
)
from .polycyclic import (
    LevelSearchError,
    commutator_level,
    fitting_subgroup,
    hirsch_rank,
    unipotent_shadow,
)


class InputError(Exception):
    pass


class CheckFailure(Exception):
    pass


def _vec(v) -> str:
    return ",".join(str(Fraction(x)) for x in v)


def _matrix_arg(text: str) -> QMatrix:
    try:
        return QMatrix.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad matrix literal {text!r}: {exc}") from None


def _vector_arg(text: str) -> tuple:
    try:
        return specfile._vector(text, 1, 1)
    except specfile.SpecSyntaxError as exc:
        raise InputError(f"bad vector literal {text!r}: {exc}") from None


def _load_spec(path: str):
    f = specfile.load(path)
    if f.spec is None:
        raise InputError(f"{path}: no [algebra] section")
    return f


def _load_pauto(spec, path: str) -> cm.PartialAutomorphism:
    f = specfile.load(path)
    if not f.pautos:
        raise InputError(f"{path}: no [pauto] section")
    try:
        return specfile.pauto_from_block(spec, f.pautos[0])
    except (cm.InvalidCommensuration, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _subgroup(text: str) -> cm.SubgroupClass:
    kind, _, k = text.partition(":")
    try:
        return cm.SubgroupClass(kind, int(k) if k else 1)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _emit_checks(out, checks) -> None:
    for c in checks:
        print(c.line(), file=out)
    if not all(c.ok for c in checks):
        raise CheckFailure()


# ---------------------------------------------------------------------------


def cmd_jordan(args, out):
    M = _matrix_arg(args.matrix)
    try:
        S, U = jordan_chevalley(M)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    print(f"S = {S.literal()}", file=out)
    print(f"U = {U.literal()}", file=out)
    print(f"semisimple: {str(is_semisimple(M)).lower()}", file=out)


def cmd_charpoly(args, out):
    print(f"charpoly: {charpoly(_matrix_arg(args.matrix))}", file=out)


def cmd_unit_circle(args, out):
    try:
        ans = all_eigenvalues_on_unit_circle(_matrix_arg(args.matrix))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    print(f"unit-circle: {str(ans).lower()}", file=out)


def cmd_bch(args, out):
    spec = _load_spec(args.spec).spec
    try:
        print(f"bch: {_vec(bch(spec.algebra, _vector_arg(args.x), _vector_arg(args.y)))}", file=out)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_explog(args, out):
    M = _matrix_arg(args.matrix)
    try:
        R = exp_unipotent(M) if args.direction == "exp" else log_unipotent(M)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    print(f"{args.direction}: {R.literal()}", file=out)


def cmd_fitting(args, out):
    spec = _load_spec(args.spec).spec
    L, E = fitting_subgroup(spec)
    for b in L.basis:
        print(f"basis {_vec(b)}", file=out)
    print("torus " + ",".join(spec.torus_gens[j].label for j in E), file=out)


def cmd_hirsch(args, out):
    print(f"hirsch: {hirsch_rank(_load_spec(args.spec).spec)}", file=out)


def cmd_shadow(args, out):
    spec = _load_spec(args.spec).spec
    sh = unipotent_shadow(spec)
    print(f"rank: {len(sh.basis)}", file=out)
    for b in sh.basis:
        print(f"basis {_vec(b)}", file=out)


def cmd_level(args, out):
    spec = _load_spec(args.spec).spec
    f = _vector_arg(args.f)
    shadow = LogLattice.standard(spec.algebra) if args.shadow == "standard" else unipotent_shadow(spec)
    report = commutator_level(spec, f, shadow, rng=random.Random(args.seed), cap=max(args.cap, 1))
    print(f"level: {report.level.uni_scale} {report.level.torus_scale}", file=out)
    print(f"k: {report.k}", file=out)
    print(f"ell: {report.ell}", file=out)
    print(f"multiplier: {report.multiplier}", file=out)
    print(f"CHECK generator-powers PASS {report.exhaustive_checked} words", file=out)
    print(f"CHECK deep-words PASS {report.sampled_checked} samples", file=out)


def cmd_compose(args, out):
    spec = _load_spec(args.spec).spec
    outer = _load_pauto(spec, args.outer)
    inner = _load_pauto(spec, args.inner)
    result = cm.compose(outer, inner, args.cap)
    out.write(specfile.format_pauto(result))
    if args.compare:
        other = _load_pauto(spec, args.compare)
        print(f"equivalent: {str(cm.equivalent(result, other)).lower()}", file=out)


def cmd_invert(args, out):
    spec = _load_spec(args.spec).spec
    out.write(specfile.format_pauto(cm.invert(_load_pauto(spec, args.pauto), args.cap)))


def _induced(args, out, fn):
    spec = _load_spec(args.spec).spec
    phi = _load_pauto(spec, args.pauto)
    result, sub = fn(phi, _subgroup(args.subgroup), args.cap)
    out.write(specfile.format_spec(sub))
    out.write(specfile.format_pauto(result))
    print(f"matrix: {result.T.literal()}", file=out)


def cmd_restrict(args, out):
    _induced(args, out, cm.restrict)


def cmd_quotient(args, out):
    _induced(args, out, cm.quotient)


def cmd_witness(args, out):
    spec = _load_spec(args.spec).spec
    phi = _load_pauto(spec, args.pauto)
    delta = _subgroup(args.subgroup)
    w = cm.strong_witness(phi, delta)
    print(f"strong: {str(w.holds).lower()}", file=out)
    for v in w.image_generators:
        print(f"image {_vec(v)}", file=out)
    for v in w.target_generators:
        print(f"target {_vec(v)}", file=out)
    print(f"commensuristic: {str(cm.is_commensuristic_witness(phi, delta)).lower()}", file=out)


def cmd_verify_heisenberg(args, out):
    spec = _load_spec(args.spec).spec if args.spec else cs.heisenberg_spec(1)
    _emit_checks(out, cs.verify_heisenberg(spec, seed=args.seed, cap=args.cap))


def cmd_verify_sol(args, out):
    spec = _load_spec(args.spec).spec if args.spec else cs.sol_spec()
    _emit_checks(out, cs.verify_sol(spec, seed=args.seed, cap=args.cap))


def cmd_verify_psl(args, out):
    _emit_checks(out, cs.verify_psl(seed=args.seed))


def cmd_hull_check(args, out):
    f = _load_spec(args.spec)
    embeds = [e for e in f.embeddings if args.embedding in (None, e.name)]
    if not embeds:
        raise InputError(f"{args.spec}: no matching [embedding] section")
    ok = True
    for e in embeds:
        try:
            report = cs.hull_axiom_check(f.spec, e)
        except ValueError as exc:
            raise InputError(f"embedding {e.name}: {exc}") from None
        print(f"embedding {e.name}", file=out)
        for line in cs.hull_report_lines(report, e):
            print(line, file=out)
        ok &= cs.hull_ok(report, e)
    if not ok:
        raise CheckFailure()


# ---------------------------------------------------------------------------


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{name} must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nilcomm", description="Exact computations with lattices and commensurators.")
    p.add_argument("--seed", type=int, default=None, help="seed for randomized checks (env NILCOMM_SEED, default 0)")
    p.add_argument("--cap", type=int, default=None, help="level search cap (env NILCOMM_CAP, default 1024)")
    sub = p.add_subparsers(dest="verb", required=True)

    def verb(name, fn, help_):
        q = sub.add_parser(name, help=help_)
        q.set_defaults(fn=fn)
        return q

    for name, fn, help_ in [("jordan", cmd_jordan, "Jordan-Chevalley decomposition"),
                            ("charpoly", cmd_charpoly, "characteristic polynomial"),
                            ("unit-circle", cmd_unit_circle, "are all eigenvalues on the unit circle")]:
        verb(name, fn, help_).add_argument("matrix", help="matrix literal, rows separated by ';'")
    q = verb("explog", cmd_explog, "exp of a nilpotent or log of a unipotent matrix")
    q.add_argument("direction", choices=["exp", "log"])
    q.add_argument("matrix")
    q = verb("bch", cmd_bch, "BCH product in a spec's algebra")
    q.add_argument("--spec", required=True)
    q.add_argument("x")
    q.add_argument("y")
    for name, fn, help_ in [("fitting", cmd_fitting, "Fitting subgroup"),
                            ("hirsch", cmd_hirsch, "Hirsch rank"),
                            ("shadow", cmd_shadow, "unipotent shadow lattice")]:
        verb(name, fn, help_).add_argument("spec")
    q = verb("level", cmd_level, "congruence level for a commutator f (p . f^-1)")
    q.add_argument("spec")
    q.add_argument("--f", required=True, help="vector in the spec's algebra")
    q.add_argument("--shadow", choices=["standard", "hull"], default="standard")
    q = verb("compose", cmd_compose, "compose OUTER after INNER")
    q.add_argument("--spec", required=True)
    q.add_argument("outer")
    q.add_argument("inner")
    q.add_argument("--compare", help="pauto file to test equivalence against")
    q = verb("invert", cmd_invert, "inverse commensuration")
    q.add_argument("--spec", required=True)
    q.add_argument("pauto")
    for name, fn, help_ in [("restrict", cmd_restrict, "induced map on a subgroup"),
                            ("quotient", cmd_quotient, "induced map on a quotient"),
                            ("witness", cmd_witness, "commensuristic witnesses for a subgroup")]:
        q = verb(name, fn, help_)
        q.add_argument("--spec", required=True)
        q.add_argument("pauto")
        q.add_argument("--subgroup", required=True, help="whole, fitting, center[:k], lower[:k]")
    q = verb("verify-heisenberg", cmd_verify_heisenberg, "Heisenberg commensurator checks")
    q.add_argument("spec", nargs="?")
    q = verb("verify-sol", cmd_verify_sol, "Sol commensurator checks")
    q.add_argument("spec", nargs="?")
    verb("verify-psl", cmd_verify_psl, "PSL_n checks")
    q = verb("hull-check", cmd_hull_check, "hull axiom H3 on embedding fixtures")
    q.add_argument("spec")
    q.add_argument("--embedding")
    return p


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        args.seed = args.seed if args.seed is not None else _env_int("NILCOMM_SEED", 0)
        args.cap = args.cap if args.cap is not None else _env_int("NILCOMM_CAP", cm.DEFAULT_CAP)
        args.fn(args, out)
    except CheckFailure:
        return 1
    except LevelSearchError as exc:
        print(f"error: {exc}", file=err)
        return 1
    except cm.WitnessFailure as exc:
        print(f"error: {exc}", file=err)
        return 1
    except specfile.SpecSyntaxError as exc:
        print(f"error: {args_path(args)}: {exc}", file=err)
        return 2
    except FileNotFoundError as exc:
        print(f"error: cannot read {exc.args[0] if exc.args else exc}", file=err)
        return 2
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=err)
        return 2
    return 0


def args_path(args) -> str:
    for name in ("spec", "pauto", "outer"):
        v = getattr(args, name, None)
        if v:
            return v
    return "input"


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
