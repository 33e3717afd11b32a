"""Command line entry point: single-step subcommands and the full pipeline."""

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .complex_of_groups import cog_from_action, dump_cog, validate_cog, validate_cog_morphism
from .development import (BASE_CHANGE_READING, canonical_witness, check_equivariant_iso, develop,
                          dump_development)
from .discrete_morse import (CLASS_BUDGET, ZIGZAG_BUDGET, Matching, check_compatibility,
                             flow_category, format_matching, induced_flow_action, lift_matching,
                             parse_matching_text, validate_matching)
from .errors import BudgetExceeded, InputError, Report, VerificationError
from .group_action import (SimplicialAction, check_quotient, check_regularity, choose_lifts_transfers,
                           fixed_subcomplex, format_group, format_lifts, load_action,
                           lp_action_from_simplicial, parse_lifts_text, quotient_face_poset,
                           subdivide_action)
from .group_core import all_subgroups, trivial_group
from .homology import HomologyProfile, nerve_homology
from .lp_category import (ISO_BUDGET, NERVE_BOUND, dump_category, full_subcategory, geometric_nerve,
                          load_category, object_chain_length, validate_lp)
from .morse_cog import commuting_lifts, morse_cog, quotient_flow_iso
from .simplicial_complex import (SimplicialComplex, face_poset, format_complex, parse_complex_text,
                                 simplicial_homology_oracle)

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


@dataclass
class PipelineConfig:
    complex: str
    group: str = None
    matching: str = None
    lifts: str = None
    seed: int = 0
    out: str = None
    budget_nerve: int = NERVE_BOUND
    budget_zigzag: int = ZIGZAG_BUDGET
    budget_classes: int = CLASS_BUDGET
    budget_iso: int = ISO_BUDGET
    fixed_point_checks: bool = False
    coherent_lifts: bool = False

    def __post_init__(self):
        for name in ("budget_nerve", "budget_zigzag", "budget_classes", "budget_iso"):
            if getattr(self, name) <= 0:
                raise InputError(f"{name} must be positive")


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def load_inputs(complex_path, group_path=None):
    X = parse_complex_text(_read(complex_path))
    if group_path:
        return load_action(X, _read(group_path))
    return SimplicialAction(trivial_group(len(X.vertices)), X)


def nerve_degrees(C, X):
    """Enough nerve dimensions to see every degree in which X can have homology."""
    return max(object_chain_length(C), X.dim) + 2


def _profile(H):
    return {"betti": list(H.betti), "torsion": [list(t) for t in H.torsion]}


def _agree(H_nerve, H_x):
    """Equal in every degree the nerve computation determines."""
    k = len(H_nerve.betti)
    a = HomologyProfile(H_nerve.betti, H_nerve.torsion).trimmed()
    b = HomologyProfile(H_x.betti[:k] + [0] * (k - len(H_x.betti)),
                        [list(t) for t in H_x.torsion[:k]] + [[]] * (k - len(H_x.torsion))).trimmed()
    return a.betti == b.betti and a.torsion == b.torsion and all(
        x == 0 for x in H_x.betti[k:]) and not any(H_x.torsion[k:])


class Pipeline:
    """Runs stages in order; the first failing stage stops the run."""

    def __init__(self):
        self.stages = []

    def stage(self, name, fn):
        try:
            details, rep = fn()
        except VerificationError as e:
            self.stages.append(_stage_entry(name, False, {"error": str(e)}, e.report))
            raise _Stop(EXIT_FAIL) from None
        except BudgetExceeded as e:
            self.stages.append(_stage_entry(name, False, {"error": str(e)}, None, budget=True))
            raise _Stop(EXIT_BUDGET) from None
        except InputError as e:
            self.stages.append(_stage_entry(name, False, {"error": str(e)}, None))
            raise _Stop(EXIT_INPUT) from None
        ok = rep is None or rep.ok
        self.stages.append(_stage_entry(name, ok, details, rep))
        if not ok:
            raise _Stop(EXIT_FAIL)
        return details


class _Stop(Exception):
    def __init__(self, code):
        super().__init__(code)
        self.code = code


def _stage_entry(name, ok, details, rep, budget=False):
    entry = {"stage": name, "ok": ok}
    if budget:
        entry["budget_exhausted"] = True
    entry["details"] = details
    if rep is not None:
        entry["report"] = rep.as_dict()
    return entry


def run_pipeline(cfg):
    """Full chain from input files to the main-theorem verdict; returns (exit code, report)."""
    P = Pipeline()
    st = {}

    def load():
        st["A"] = load_inputs(cfg.complex, cfg.group)
        X, G = st["A"].complex, st["A"].group
        return {"f_vector": list(X.f_vector()), "group_order": len(G)}, None

    def regularity():
        return {}, check_regularity(st["A"])

    def quotient():
        A = st["A"]
        st["lpa"] = lp_action_from_simplicial(A, check=False)
        st["Qd"] = Qd = quotient_face_poset(A, st["lpa"])
        return {"quotient_f_vector": list(Qd.complex.f_vector()), "objects": Qd.quotient.n_obj}, check_quotient(Qd)

    def lifts():
        fixed = parse_lifts_text(_read(cfg.lifts), st["Qd"]) if cfg.lifts else None
        st["LT"] = choose_lifts_transfers(st["lpa"], st["Qd"], seed=cfg.seed, lifts=fixed,
                                          coherent=cfg.coherent_lifts)
        return {"seed": cfg.seed, "explicit_lifts": len(fixed or {}), "coherent": cfg.coherent_lifts}, None

    def cog():
        st["F"], st["Phi"] = F, Phi = cog_from_action(st["lpa"], st["Qd"], st["LT"])
        rep = validate_cog(F)
        rep.extend(validate_cog_morphism(Phi, F))
        return {}, rep

    def matching():
        Y = st["Qd"].complex
        st["M"] = parse_matching_text(_read(cfg.matching), Y) if cfg.matching else Matching([])
        return {"pairs": len(st["M"].pairs)}, validate_matching(Y, st["M"])

    def compatibility():
        return {}, check_compatibility(st["F"], st["Qd"].complex, st["M"])

    def lifted():
        st["St"] = lift_matching(st["A"], st["Qd"], st["LT"], st["M"], st["F"])
        return {"pairs": len(st["St"].pairs)}, None

    def flows():
        budgets = dict(budget=cfg.budget_zigzag, class_budget=cfg.budget_classes)
        st["FY"] = flow_category(st["Qd"].complex, st["M"], **budgets)
        st["FX"] = flow_category(st["A"].complex, st["St"], **budgets)
        return {"quotient_flow": {"objects": st["FY"].category.n_obj, "morphisms": st["FY"].category.n_mor},
                "lifted_flow": {"objects": st["FX"].category.n_obj, "morphisms": st["FX"].category.n_mor}}, None

    def mcog():
        st["mc"] = mc = morse_cog(st["F"], st["Phi"], st["FY"])
        G = st["A"].group
        d = {"nontrivial_transfers": sum(1 for s in mc.sigma if s),
             "transfers": {st["FY"].category.mor_labels[m]: G.name(s) for m, s in enumerate(mc.sigma) if s}}
        return d, mc.report

    def dev():
        st["D"] = D = develop(st["mc"].cog, st["mc"].psi)
        return {"objects": D.category.n_obj, "morphisms": D.category.n_mor}, None

    def comparison():
        st["act"] = induced_flow_action(st["A"], st["FX"])
        st["fq"] = quotient_flow_iso(st["act"], st["FX"], st["FY"], st["Qd"])
        st["LT2"], _ = commuting_lifts(st["A"], st["Qd"], st["LT"], st["fq"], st["FX"], st["FY"], st["mc"])
        return {}, None

    def equivariant():
        fq = st["fq"]
        w = canonical_witness(st["D"], st["act"], fq.quotient, st["LT2"], fq.iso)
        res = check_equivariant_iso(st["D"].action, st["act"], w, budget=cfg.budget_iso)
        if res.status == "inconclusive":
            raise BudgetExceeded("equivariant isomorphism search budget exhausted")
        rep = Report("equivariant_iso")
        if not res.found:
            rep.add("no_equivariant_isomorphism")
        rep.note = BASE_CHANGE_READING
        return {"status": res.status, "via_witness": res.found and res.functor is w}, rep

    def homology_stage():
        X, C = st["A"].complex, st["D"].category
        H = nerve_homology(C, bound=cfg.budget_nerve, max_dim=nerve_degrees(C, X))
        Hx = simplicial_homology_oracle(X)
        rep = Report("homology")
        if not _agree(H, Hx):
            rep.add("homology_differs", nerve=_profile(H), complex=_profile(Hx))
        return {"development": _profile(H), "complex": _profile(Hx)}, rep

    def fixed_points():
        A, D = st["A"], st["D"]
        G = A.group
        rep = Report("fixed_points")
        rep.note = "derived check"
        rows = []
        for H in all_subgroups(G):
            objs = [x for x in range(D.category.n_obj) if all(D.action.obj_act[h][x] == x for h in H)]
            fixed = fixed_subcomplex(A, H)
            if not objs or not fixed:
                if bool(objs) != bool(fixed):
                    rep.add("fixed_set_emptiness", subgroup=H.names())
                rows.append({"subgroup": H.names(), "empty": True})
                continue
            C = full_subcategory(D.category, objs)
            XH = SimplicialComplex(fixed)
            Hd = nerve_homology(C, bound=cfg.budget_nerve, max_dim=nerve_degrees(C, XH))
            Hx = simplicial_homology_oracle(XH)
            if not _agree(Hd, Hx):
                rep.add("fixed_homology_differs", subgroup=H.names())
            rows.append({"subgroup": H.names(), "betti": list(Hd.trimmed().betti)})
        return {"subgroups": rows}, rep

    steps = [("load", load), ("regularity", regularity), ("quotient", quotient), ("lifts", lifts),
             ("complex_of_groups", cog), ("matching", matching), ("compatibility", compatibility),
             ("lifted_matching", lifted), ("flow_categories", flows), ("morse_complex_of_groups", mcog),
             ("development", dev), ("flow_comparison", comparison), ("equivariant_isomorphism", equivariant),
             ("homology", homology_stage)]
    if cfg.fixed_point_checks:
        steps.append(("fixed_points", fixed_points))
    code = EXIT_PASS
    try:
        for name, fn in steps:
            P.stage(name, fn)
    except _Stop as s:
        code = s.code
    report = {"verdict": "PASS" if code == EXIT_PASS else "FAIL", "exit_code": code,
              "seed": cfg.seed, "stages": P.stages}
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    return code, report


# --- single-step subcommands -----------------------------------------------------

def _setup(args, need_cog=True):
    A = load_inputs(args.complex, args.group)
    reg = check_regularity(A)
    if not reg.ok:
        raise VerificationError("action is not regular", reg)
    lpa = lp_action_from_simplicial(A, check=False)
    Qd = quotient_face_poset(A, lpa)
    out = {"A": A, "lpa": lpa, "Qd": Qd}
    if need_cog:
        fixed = parse_lifts_text(_read(args.lifts), Qd) if args.lifts else None
        LT = choose_lifts_transfers(lpa, Qd, seed=args.seed, lifts=fixed, coherent=args.coherent_lifts)
        F, Phi = cog_from_action(lpa, Qd, LT)
        out.update(LT=LT, F=F, Phi=Phi)
    return out


def _matching(args, Y):
    return parse_matching_text(_read(args.matching), Y) if args.matching else Matching([])


def cmd_validate(args):
    A = load_inputs(args.complex, args.group)
    rep = check_regularity(A)
    return rep, []


def cmd_quotient(args):
    s = _setup(args, need_cog=False)
    Qd, C = s["Qd"], s["lpa"].category
    lines = [dump_category(Qd.quotient).rstrip("\n")]
    for orb in Qd.obj_orbits:
        lines.append(f"orbit {C.objects[orb[0]]} : " + ", ".join(C.objects[x] for x in orb))
    return check_quotient(Qd), lines


def cmd_stabilizers(args):
    s = _setup(args, need_cog=False)
    Qd, C, lpa = s["Qd"], s["lpa"].category, s["lpa"]
    lines = [f"stab {C.objects[orb[0]]} : " + " ".join(lpa.stabilizer(orb[0]).names()) for orb in Qd.obj_orbits]
    return Report("stabilizers"), lines


def cmd_cog(args):
    s = _setup(args)
    rep = validate_cog(s["F"])
    rep.extend(validate_cog_morphism(s["Phi"], s["F"]))
    return rep, [format_lifts(s["Qd"], s["LT"]).rstrip("\n"), dump_cog(s["F"], s["Phi"]).rstrip("\n")]


def cmd_matchcheck(args):
    s = _setup(args)
    Y = s["Qd"].complex
    M = _matching(args, Y)
    rep = validate_matching(Y, M)
    if rep.ok:
        rep.extend(check_compatibility(s["F"], Y, M))
    return rep, [format_matching(M).rstrip("\n")] if M.pairs else []


def cmd_flow(args):
    s = _setup(args, need_cog=args.lifted)
    Y = s["Qd"].complex
    M = _matching(args, Y)
    budgets = dict(budget=args.budget_zigzag, class_budget=args.budget_classes)
    if args.lifted:
        St = lift_matching(s["A"], s["Qd"], s["LT"], M, s["F"])
        fl = flow_category(s["A"].complex, St, **budgets)
    else:
        fl = flow_category(Y, M, **budgets)
    return validate_lp(fl.category), [dump_category(fl.category).rstrip("\n")]


def cmd_morse_cog(args):
    s = _setup(args)
    Y = s["Qd"].complex
    M = _matching(args, Y)
    comp = check_compatibility(s["F"], Y, M)
    if not comp.ok:
        return comp, []
    fl = flow_category(Y, M, budget=args.budget_zigzag, class_budget=args.budget_classes)
    mc = morse_cog(s["F"], s["Phi"], fl)
    return mc.report, [dump_category(fl.category).rstrip("\n"), dump_cog(mc.cog, mc.psi).rstrip("\n")]


def cmd_develop(args):
    s = _setup(args)
    if args.of == "cog":
        D = develop(s["F"], s["Phi"])
        return D.report, [dump_development(D).rstrip("\n")]
    Y = s["Qd"].complex
    M = _matching(args, Y)
    comp = check_compatibility(s["F"], Y, M)
    if not comp.ok:
        return comp, []
    fl = flow_category(Y, M, budget=args.budget_zigzag, class_budget=args.budget_classes)
    mc = morse_cog(s["F"], s["Phi"], fl)
    D = develop(mc.cog, mc.psi)
    return D.report, [dump_development(D).rstrip("\n")]


def _category_arg(args):
    if args.category:
        return load_category(_read(args.category)), None
    X = parse_complex_text(_read(args.complex))
    return face_poset(X), X


def cmd_nerve(args):
    C, X = _category_arg(args)
    md = nerve_degrees(C, X) if X is not None else None
    N = geometric_nerve(C, max_dim=md, bound=args.budget_nerve)
    lines = [f"f_vector: {list(N.f_vector())}"]
    if N.exact_below is not None:
        lines.append(f"truncated: simplices up to dimension {N.exact_below}")
    return Report("nerve"), lines


def cmd_homology(args):
    if args.category:
        C = load_category(_read(args.category))
        H = nerve_homology(C, bound=args.budget_nerve)
    else:
        H = simplicial_homology_oracle(parse_complex_text(_read(args.complex)))
    return Report("homology"), H.lines()


def cmd_dump(args):
    X = parse_complex_text(_read(args.complex))
    return Report("dump"), [dump_category(face_poset(X)).rstrip("\n")]


def cmd_load_category(args):
    C = load_category(_read(args.category))
    return validate_lp(C), [dump_category(C).rstrip("\n")]


def cmd_subdivide(args):
    A = load_inputs(args.complex, args.group)
    As = subdivide_action(A)
    lines = [format_complex(As.complex).rstrip("\n")]
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "complex.txt").write_text(format_complex(As.complex), encoding="utf-8")
        if args.group:
            (out / "group.txt").write_text(format_group(As), encoding="utf-8")
    elif args.group:
        lines.append(format_group(As).rstrip("\n"))
    return check_regularity(As), lines


COMMANDS = {
    "validate": cmd_validate, "quotient": cmd_quotient, "stabilizers": cmd_stabilizers, "cog": cmd_cog,
    "matchcheck": cmd_matchcheck, "flow": cmd_flow, "morse-cog": cmd_morse_cog, "develop": cmd_develop,
    "nerve": cmd_nerve, "homology": cmd_homology, "dump": cmd_dump, "load-category": cmd_load_category,
    "subdivide": cmd_subdivide,
}
NEEDS_COMPLEX = {"validate", "quotient", "stabilizers", "cog", "matchcheck", "flow", "morse-cog",
                 "develop", "dump", "subdivide", "run"}


def build_parser():
    p = argparse.ArgumentParser(prog="equimorse", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in ["run", *COMMANDS]:
        sp = sub.add_parser(name)
        sp.add_argument("--complex")
        sp.add_argument("--group")
        sp.add_argument("--matching")
        sp.add_argument("--lifts")
        sp.add_argument("--category")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out")
        sp.add_argument("--budget-nerve", type=int, default=NERVE_BOUND)
        sp.add_argument("--budget-zigzag", type=int, default=ZIGZAG_BUDGET)
        sp.add_argument("--budget-classes", type=int, default=CLASS_BUDGET)
        sp.add_argument("--budget-iso", type=int, default=ISO_BUDGET)
        sp.add_argument("--fixed-point-checks", action="store_true")
        sp.add_argument("--coherent-lifts", action="store_true",
                        help="lift faces inside lifted cofaces where possible")
        sp.add_argument("--json", action="store_true", help="print the report as JSON")
        if name == "flow":
            sp.add_argument("--lifted", action="store_true", help="flow category of the lifted matching on X")
        if name == "develop":
            sp.add_argument("--of", choices=["morse", "cog"], default="morse")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command in NEEDS_COMPLEX and not args.complex:
            raise InputError("--complex is required")
        if args.command in ("nerve", "homology") and not (args.complex or args.category):
            raise InputError("--complex or --category is required")
        if args.command == "load-category" and not args.category:
            raise InputError("--category is required")
        if args.command == "run":
            cfg = PipelineConfig(args.complex, args.group, args.matching, args.lifts, args.seed, args.out,
                                 args.budget_nerve, args.budget_zigzag, args.budget_classes, args.budget_iso,
                                 args.fixed_point_checks, args.coherent_lifts)
            code, report = run_pipeline(cfg)
            if args.json:
                print(json.dumps(report, indent=2))
            else:
                for s in report["stages"]:
                    print(f"{'PASS' if s['ok'] else 'FAIL'} {s['stage']}")
                print(f"verdict: {report['verdict']}")
            return code
        rep, lines = COMMANDS[args.command](args)
    except InputError as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as e:
        print(f"budget exhausted: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except VerificationError as e:
        print(f"FAIL: {e}", file=sys.stderr)
        if e.report is not None:
            print(json.dumps(e.report.as_dict(), indent=2), file=sys.stderr)
        return EXIT_FAIL
    text = "\n".join(x for x in lines if x)
    if args.out and args.command != "subdivide":
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{args.command}.txt").write_text(text + "\n", encoding="utf-8")
    if text:
        print(text)
    # data goes to stdout, verdicts to stderr, so dumps can be piped back in
    if args.json or not rep.ok:
        print(json.dumps(rep.as_dict(), indent=2), file=sys.stderr)
    print("PASS" if rep.ok else "FAIL", file=sys.stderr)
    return EXIT_PASS if rep.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
