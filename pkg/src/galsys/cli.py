"""Command-line front end: ``galsys <area> <action> --spec FILE``.

Parameters come from the document's ``params`` object, overridden by ``--params``.
Reports are JSON with sorted keys; verdicts are data and exit 0.  Exit 2 means
the input was rejected, exit 3 that a resource cap stopped the computation.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Any, Callable

from . import amalgam as am
from . import codes
from . import groups as grp
from . import imaginaries as im
from . import kummer
from .config import get_caps, set_caps, set_seed
from .errors import InvariantError, ResourceCapError, SpecError, UsageError
from .fields import galois as gal
from .fields.factor import factor_over, irreducible_over
from .fields.tower import ExactField, minimal_polynomial
from .report import Report, dumps, error_document
from .spec import SpecDocument, parse_elements, parse_set, parse_spec, prefix
from .system import Subsystem, SystemElement, build_system, dual_embedding, dual_group

COMMANDS = {
    "group": ("show", "normals", "quotient", "homs", "ep"),
    "system": ("build", "query", "lattice", "dual", "types-equal"),
    "amalgam": ("fiber", "theta"),
    "field": ("build", "minpoly", "irreducible", "galois"),
    "code": ("encode", "validate", "decode", "validate2"),
    "kummer": ("example", "run"),
    "imaginary": ("stable", "closure", "canonical"),
}


class Params:
    """Merged command parameters with spec-aware lookups."""

    def __init__(self, doc: SpecDocument, values: dict, flags: dict):
        self.doc, self.values, self.flags = doc, values, flags

    def get(self, key: str, default: Any = None) -> Any:
        return self.values.get(key, default)

    def need(self, key: str) -> Any:
        if key not in self.values:
            raise UsageError(f"missing parameter {key!r}")
        return self.values[key]

    def _named(self, section: str, key: str):
        table = getattr(self.doc, section)
        name = self.values.get(key)
        if name is None:
            if len(table) == 1:
                return next(iter(table.values()))
            raise UsageError(f"parameter {key!r} is required (the document declares {len(table)} {section})")
        return self.doc.lookup(section, name, f"$.params.{key}")

    def group(self, key: str = "group") -> grp.FiniteGroup:
        return self._named("groups", key)

    def map(self, key: str) -> grp.GroupHom:
        return self.doc.lookup("maps", self.need(key), f"$.params.{key}")

    def field(self, key: str = "field") -> ExactField:
        return self._named("fields", key)

    def extension(self, key: str = "extension") -> gal.GaloisExtension:
        return self._named("extensions", key)

    def base_field(self) -> ExactField:
        """Base of a code: a declared field, an extension's base, or ℚ."""
        if "field" in self.values:
            return self.field()
        if "extension" in self.values:
            return self.extension().base
        base = self.values.get("base", "Q")
        if base == "Q":
            return ExactField.rationals()
        if isinstance(base, dict) and "prime" in base:
            return ExactField.prime_field(base["prime"])
        raise UsageError("parameter 'base' must be \"Q\" or {\"prime\": p}")

    def elements(self, key: str) -> list[SystemElement]:
        return parse_elements(self.need(key), f"$.params.{key}")


def _hom_json(f: grp.GroupHom | None):
    return None if f is None else f.images.tolist()


def _group_json(g: grp.FiniteGroup) -> dict:
    return {
        "order": g.order,
        "identity": g.identity,
        "abelian": g.is_abelian,
        "generators": list(g.generators),
        "element_orders": g.element_orders.tolist(),
        "conjugacy_classes": [list(c) for c in g.conjugacy_classes],
        "table": g.table.tolist(),
    }


# ---------------------------------------------------------------------------
# group


def group_show(p: Params):
    return _group_json(p.group())


def group_normals(p: Params):
    g = p.group()
    return {"normal_subgroups": [{"elements": list(n.elements), "order": n.order, "index": n.index}
                                 for n in grp.normal_subgroups(g)]}


def group_quotient(p: Params):
    g = p.group()
    q, pi = grp.quotient(g, p.need("kernel"))
    return {"quotient": _group_json(q), "projection": pi.images.tolist()}


def group_homs(p: Params):
    dom, cod = p.group("domain"), p.group("codomain")
    homs = grp.homomorphisms(dom, cod, surjective_only=bool(p.get("surjective", False)))
    return {"count": len(homs), "homomorphisms": [h.images.tolist() for h in homs]}


def group_ep(p: Params):
    verdict = grp.has_embedding_property(p.group())
    out = {"embedding_property": verdict.holds}
    if not verdict.holds:
        out["witness"] = {
            "f": {"images": _hom_json(verdict.f), "target_order": verdict.f.codomain.order},
            "g": {"images": _hom_json(verdict.g), "source_order": verdict.g.domain.order,
                  "source_table": verdict.g.domain.table.tolist()},
        }
    return out


# ---------------------------------------------------------------------------
# system


def system_build(p: Params):
    return build_system(p.group()).to_dict()


def system_query(p: Params):
    s = build_system(p.group())
    relation = p.flags.get("relation") or p.need("relation")
    args = p.elements("elements")
    arity = {"leq": 2, "C": 2, "P": 3}.get(relation)
    if arity is None:
        raise UsageError(f"unknown relation {relation!r}; expected leq, C or P")
    if len(args) != arity:
        raise UsageError(f"relation {relation} takes {arity} elements, got {len(args)}")
    holds = {"leq": s.leq, "C": s.C, "P": s.P}[relation](*args)
    return {"relation": relation, "elements": [x.as_list() for x in args], "holds": holds}


def system_lattice(p: Params):
    s = build_system(p.group())
    return {
        "levels": [list(n.elements) for n in s.levels],
        "leq": s.level_leq.astype(int).tolist(),
        "join": s.join_table.tolist(),
        "meet": s.meet_table.tolist(),
    }


def system_dual(p: Params):
    if "map" in p.values:
        f = p.map("map")
        emb = dual_embedding(f)
        return {"map": p.get("map"), "images": emb.images.tolist(),
                "preserves_structure": emb.preserves_structure(),
                "source_size": emb.source.size, "target_size": emb.target.size}
    s = build_system(p.group())
    level = int(p.get("level", s.bottom))
    sub = Subsystem(s, level)
    q, pi = dual_group(sub)
    return {"level": level, "subsystem_levels": list(sub.levels),
            "dual_group": _group_json(q), "projection": pi.images.tolist()}


def system_types_equal(p: Params):
    s = build_system(p.group())
    sub = Subsystem.from_levels(s, p.need("subsystem")) if isinstance(p.get("subsystem"), list) \
        else Subsystem(s, int(p.get("subsystem", s.top)))
    verdict = s.types_equal(p.elements("beta"), p.elements("gamma"), sub,
                            check_embedding=bool(p.get("check_embedding", False)))
    return {"equal": verdict.equal, "reason": verdict.reason,
            "subsystem_levels": list(sub.levels), "witness": _hom_json(verdict.witness)}


# ---------------------------------------------------------------------------
# amalgam


def _instance(p: Params, d: Any, path: str):
    """A fibred instance from named groups and maps, or from a pushout description."""
    if not isinstance(d, dict):
        raise SpecError(path, "expected an object")
    doc = p.doc
    if "pushout" in d:
        po = d["pushout"]
        w = doc.lookup("groups", po.get("group"), f"{path}.pushout.group")
        ks = po.get("kernels")
        if not (isinstance(ks, list) and len(ks) == 3):
            raise SpecError(f"{path}.pushout.kernels", "expected three kernels")
        inst, maps = am.pushout_instance(w, *ks)
        return inst, w, maps
    gs = {k: doc.lookup("groups", d.get(k), f"{path}.{k}") for k in ("g1", "g2", "g3", "ha", "hb", "hc")}
    ms = {k: doc.lookup("maps", d.get(k), f"{path}.{k}") for k in ("r1a", "r2a", "r1b", "r3b", "r2c", "r3c")}
    return am.FiberedInstance(**gs, **ms), None, None


def amalgam_fiber(p: Params):
    inst, _, _ = _instance(p, p.need("instance"), "$.params.instance")
    fp = am.triple_fiber_product(inst)
    out = {"order": fp.order, "factor_orders": list(fp.sizes), "materialized": fp.is_materialized}
    if fp.is_materialized:
        out["triples"] = fp.triples.tolist()
        out["is_subgroup"] = fp.is_subgroup()
    return out


def amalgam_theta(p: Params):
    d = p.need("theta")
    if isinstance(d, dict) and "pushout" in d:
        target, w, (p1, p2, p3) = _instance(p, d, "$.params.theta")
        ident2 = grp.identity_hom(p2.codomain)
        ident3 = grp.identity_hom(p3.codomain)
        inst = am.ThetaInstance(w, p1, p2, p3, ident2, ident3, target)
    else:
        target, _, _ = _instance(p, d.get("target"), "$.params.theta.target")
        w = p.doc.lookup("groups", d.get("w"), "$.params.theta.w")
        maps = {k: p.doc.lookup("maps", d.get(k), f"$.params.theta.{k}")
                for k in ("r_ab", "r1", "r2", "theta1", "theta2")}
        inst = am.ThetaInstance(w, target=target, **maps)
    res = am.assemble_theta(inst)
    fp = am.triple_fiber_product(inst.target)
    out = {
        "compatible": res.compatible,
        "counterexample": res.counterexample,
        "surjective": list(res.surjective),
        "image_size": len(res.image),
        "image": res.image.tolist(),
        "fiber_product_order": fp.order,
    }
    if fp.is_materialized:
        out["image_equals_fiber_product"] = bool(
            len(res.image) == len(fp.triples) and (res.image == fp.triples).all())
    return out


# ---------------------------------------------------------------------------
# fields


def _field_json(L: ExactField) -> dict:
    chain = L.chain()
    return {
        "characteristic": L.characteristic,
        "degree": L.degree,
        "size": L.size,
        "steps": [{"degree": f.step_degree, "modulus": [f.parent.to_json(c) for c in f.modulus]}
                  for f in chain[1:]],
    }


def field_build(p: Params):
    return _field_json(p.field())


def field_minpoly(p: Params):
    L = p.field()
    K = prefix(L, p.get("over", 0), "$.params.over")
    x = L.coerce(p.need("element"))
    mp = minimal_polynomial(L, x, K)
    return {"over_degree": K.degree, "minimal_polynomial": [K.to_json(c) for c in mp],
            "degree": len(mp) - 1}


def field_irreducible(p: Params):
    L = p.field()
    K = prefix(L, p.get("over", len(L.chain()) - 1), "$.params.over")
    poly = [K.coerce(c) for c in p.need("poly")]
    verdict = irreducible_over(K, poly)
    out = {"irreducible": verdict.irreducible, "reason": verdict.reason}
    if p.get("factor", not verdict.irreducible):
        out["factors"] = [{"factor": [K.to_json(c) for c in f], "multiplicity": m}
                          for f, m in factor_over(K, poly)]
    return out


def field_galois(p: Params):
    ext = p.extension()
    g = ext.group
    return {
        "name": ext.name,
        "base_degree": ext.base.degree,
        "top": _field_json(ext.top),
        "degree": ext.degree,
        "automorphisms": [s.to_json() for s in ext.automorphisms],
        "table": g.table.tolist(),
        "abelian": g.is_abelian,
        "element_orders": g.element_orders.tolist(),
        "fixed_field_is_base": ext.fixed_field_is_base(),
    }


# ---------------------------------------------------------------------------
# codes


def code_encode(p: Params):
    ext = p.extension()
    sigmas = [int(s) for s in p.need("sigmas")]
    alpha = p.need("alpha")
    K = ext.base
    if "beta" in p.values:
        ec = codes.encode_extended(ext, sigmas, alpha, p.values["beta"])
        return {"code": ec.to_json(K)}
    return {"code": codes.encode(ext, sigmas, alpha).to_json(K),
            "conjugation_orbit": sorted(list(t) for t in codes.conjugation_orbit(ext, sigmas))}


def code_validate(p: Params):
    K = p.base_field()
    return codes.validate_code(K, codes.GaloisCode.from_json(K, p.need("code"))).to_json()


def code_decode(p: Params):
    K = p.base_field()
    decoded = codes.decode_all(K, codes.GaloisCode.from_json(K, p.need("code")))
    out = decoded.to_json()
    if "extension" in p.values and "alpha" in p.values:
        ext = p.extension()
        out["transported"] = sorted(list(t) for t in codes.transport(decoded, ext, p.values["alpha"]))
    return out


def code_validate2(p: Params):
    K = p.base_field()
    return codes.validate_two_code(K, codes.TwoCode.from_json(K, p.need("two"))).to_json()


# ---------------------------------------------------------------------------
# kummer


def _kummer_report(result: dict) -> tuple[dict, list]:
    assertions = result.pop("assertions")
    return result, assertions


def kummer_example(p: Params):
    return _kummer_report(kummer.run_paper_example())


def kummer_run(p: Params):
    name = p.get("scenario")
    if name is None:
        if len(p.doc.kummer) != 1:
            raise UsageError("parameter 'scenario' is required")
        sc = next(iter(p.doc.kummer.values()))
    else:
        sc = p.doc.lookup("kummer", name, "$.params.scenario")
    return _kummer_report(kummer.run_scenario(sc))


# ---------------------------------------------------------------------------
# imaginaries


def _definable_set(p: Params) -> im.DefinableSet:
    path = p.flags.get("set")
    if path:
        g = p.group("system") if p.flags.get("system") is None else \
            p.doc.lookup("groups", p.flags["system"], "--system")
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read set file {path}: {exc}") from None
        return parse_set(g, data, "$")
    name = p.need("set")
    return p.doc.lookup("sets", name, "$.params.set")


def imaginary_stable(p: Params):
    D = _definable_set(p)
    st = im.is_conjugation_stable(D)
    return {"stable": st.stable, "witness_g": st.witness_g,
            "witness_tuple": None if st.witness_tuple is None else [x.as_list() for x in st.witness_tuple],
            "set": D.to_json()}


def imaginary_closure(p: Params):
    D = _definable_set(p)
    closure = im.conjugation_closure(D)
    return {"closure": closure.to_json(), "size": len(closure), "original_size": len(D)}


def imaginary_canonical(p: Params):
    D = _definable_set(p)
    auts = im.automorphism_group(D.parent)
    pair = im.canonical_pair(D, auts)
    norm = im.normalize_single_class(D)
    out = pair.to_json()
    out["automorphism_count"] = len(auts.perms)
    out["projection_is_function"] = norm.is_function
    return out


HANDLERS: dict[str, Callable[[Params], Any]] = {
    "group show": group_show, "group normals": group_normals, "group quotient": group_quotient,
    "group homs": group_homs, "group ep": group_ep,
    "system build": system_build, "system query": system_query, "system lattice": system_lattice,
    "system dual": system_dual, "system types-equal": system_types_equal,
    "amalgam fiber": amalgam_fiber, "amalgam theta": amalgam_theta,
    "field build": field_build, "field minpoly": field_minpoly,
    "field irreducible": field_irreducible, "field galois": field_galois,
    "code encode": code_encode, "code validate": code_validate,
    "code decode": code_decode, "code validate2": code_validate2,
    "kummer example": kummer_example, "kummer run": kummer_run,
    "imaginary stable": imaginary_stable, "imaginary closure": imaginary_closure,
    "imaginary canonical": imaginary_canonical,
}


def execute(doc: SpecDocument, command: str, flags: dict | None = None) -> tuple[dict, int]:
    """Run one command; returns (report or error document, exit status)."""
    flags = dict(flags or {})
    handler = HANDLERS.get(command)
    if handler is None:
        return error_document(UsageError(f"unknown command {command!r}"), "usage"), 2
    values = dict(doc.params)
    values.update(flags.get("params") or {})
    old_caps = set_caps(get_caps().updated(flags.get("caps") or {})) if flags.get("caps") else None
    old_seed = set_seed(flags["seed"]) if flags.get("seed") is not None else None
    start = time.perf_counter()
    try:
        result = handler(Params(doc, values, flags))
        assertions: list = []
        if isinstance(result, tuple):
            result, assertions = result
        report = Report(command, values, result, assertions,
                        time.perf_counter() - start if flags.get("timing") else None)
        return report.to_json(), 0
    except ResourceCapError as exc:
        return error_document(exc, "resource_cap"), 3
    except SpecError as exc:
        return error_document(exc, "spec"), 2
    except (UsageError, InvariantError) as exc:
        return error_document(exc, "usage" if isinstance(exc, UsageError) else "invariant"), 2
    except (TypeError, ValueError, KeyError) as exc:
        return error_document(exc, "usage"), 2
    finally:
        if old_caps is not None:
            set_caps(old_caps)
        if flags.get("seed") is not None:
            set_seed(old_seed)


def _json_arg(text: str, flag: str) -> dict:
    try:
        val = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{flag}: malformed JSON ({exc.msg})") from None
    if not isinstance(val, dict):
        raise UsageError(f"{flag}: expected a JSON object")
    return val


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="galsys", description=__doc__.splitlines()[0])
    areas = parser.add_subparsers(dest="area", required=True)
    for area, actions in COMMANDS.items():
        ap = areas.add_parser(area)
        sub = ap.add_subparsers(dest="action", required=True)
        for action in actions:
            cp = sub.add_parser(action)
            cp.add_argument("--spec", help="spec document (JSON)")
            cp.add_argument("--out", help="write the report here instead of stdout")
            cp.add_argument("--caps", help="cap overrides as a JSON object")
            cp.add_argument("--params", help="parameter overrides as a JSON object")
            cp.add_argument("--seed", type=int, help="seed for randomized factorization shifts")
            cp.add_argument("--timing", action="store_true", help="include wall time in the report")
            if (area, action) == ("system", "query"):
                cp.add_argument("--relation", choices=("leq", "C", "P"))
            if area == "imaginary":
                cp.add_argument("--system", help="group whose complete system hosts the set")
                cp.add_argument("--set", help="JSON file of [level, coset] tuples")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    command = f"{args.area} {args.action}"
    try:
        if args.spec:
            try:
                data = Path(args.spec).read_bytes()
            except OSError as exc:
                raise UsageError(f"cannot read spec: {exc}") from None
            doc = parse_spec(data)
        else:
            doc = parse_spec('{"version": 1}')
        flags = {
            "caps": _json_arg(args.caps, "--caps") if args.caps else None,
            "params": _json_arg(args.params, "--params") if args.params else None,
            "seed": args.seed,
            "timing": args.timing,
            "relation": getattr(args, "relation", None),
            "system": getattr(args, "system", None),
            "set": getattr(args, "set", None),
        }
        if flags["caps"]:
            get_caps().updated(flags["caps"])
    except SpecError as exc:
        sys.stderr.write(dumps(error_document(exc, "spec")))
        return 2
    except UsageError as exc:
        sys.stderr.write(dumps(error_document(exc, "usage")))
        return 2
    report, status = execute(doc, command, flags)
    text = dumps(report)
    if status != 0:
        sys.stderr.write(text)
        return status
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
