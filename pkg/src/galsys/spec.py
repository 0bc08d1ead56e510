"""Spec documents: JSON declarations of groups, maps, fields, sets and scenarios.

Every declaration is built eagerly so that schema problems and dangling
references surface at parse time with a JSON path such as
``$.maps.pi.codomain``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from . import groups as grp
from .errors import GalsysError, SpecError
from .fields import galois as gal
from .fields.tower import ExactField, extend
from .imaginaries import DefinableSet
from .kummer import KummerScenario, load_bundled
from .system import SystemElement, build_system

SUPPORTED_VERSIONS = (1,)


@dataclass
class SpecDocument:
    version: int
    groups: dict[str, grp.FiniteGroup] = field(default_factory=dict)
    maps: dict[str, grp.GroupHom] = field(default_factory=dict)
    fields: dict[str, ExactField] = field(default_factory=dict)
    extensions: dict[str, gal.GaloisExtension] = field(default_factory=dict)
    kummer: dict[str, KummerScenario] = field(default_factory=dict)
    sets: dict[str, DefinableSet] = field(default_factory=dict)
    params: dict[str, Any] = field(default_factory=dict)
    raw: dict = field(default_factory=dict, repr=False)

    def lookup(self, section: str, name: Any, path: str):
        table = getattr(self, section)
        if not isinstance(name, str) or name not in table:
            raise SpecError(path, f"unknown {section[:-1] if section.endswith('s') else section} {name!r}")
        return table[name]


def _need(d: dict, key: str, path: str):
    if not isinstance(d, dict):
        raise SpecError(path, "expected an object")
    if key not in d:
        raise SpecError(f"{path}.{key}", "missing required field")
    return d[key]


def _int_list(v, path: str) -> list[int]:
    if not isinstance(v, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in v):
        raise SpecError(path, "expected a list of integers")
    return v


def _wrap(path: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except SpecError:
        raise
    except GalsysError as exc:
        raise SpecError(path, str(exc)) from None
    except (TypeError, ValueError, KeyError, IndexError) as exc:
        raise SpecError(path, f"invalid value: {exc}") from None


# ---------------------------------------------------------------------------
# groups and maps


def _build_group(doc: SpecDocument, name: str, d: dict, path: str) -> grp.FiniteGroup:
    kind = _need(d, "kind", path)
    if kind == "cayley":
        table = _need(d, "table", path)
        if not isinstance(table, list) or not all(isinstance(r, list) for r in table):
            raise SpecError(f"{path}.table", "expected a square list of lists")
        for i, r in enumerate(table):
            _int_list(r, f"{path}.table[{i}]")
        return _wrap(path, grp.FiniteGroup, table, identity=d.get("identity"), name=name)
    if kind == "permutation":
        degree = _need(d, "degree", path)
        gens = _need(d, "generators", path)
        if not isinstance(gens, list):
            raise SpecError(f"{path}.generators", "expected a list of permutations")
        for i, g in enumerate(gens):
            _int_list(g, f"{path}.generators[{i}]")
        g = _wrap(path, grp.from_permutations, degree, gens)
        return grp.FiniteGroup(g.table, identity=g.identity, name=name, validate=False)
    if kind == "abelian":
        orders = _int_list(_need(d, "orders", path), f"{path}.orders")
        g = _wrap(path, grp.abelian, orders)
        return grp.FiniteGroup(g.table, identity=g.identity, name=name, validate=False)
    if kind in ("cyclic", "symmetric", "alternating", "dihedral", "dicyclic"):
        n = _need(d, "n", path)
        g = _wrap(path, getattr(grp, kind), n)
        return grp.FiniteGroup(g.table, identity=g.identity, name=name, validate=False)
    if kind == "product":
        factors = _need(d, "factors", path)
        if not isinstance(factors, list) or not factors:
            raise SpecError(f"{path}.factors", "expected a non-empty list of group names")
        out = doc.lookup("groups", factors[0], f"{path}.factors[0]")
        for i, f in enumerate(factors[1:], 1):
            out = grp.direct_product(out, doc.lookup("groups", f, f"{path}.factors[{i}]"))
        return grp.FiniteGroup(out.table, identity=out.identity, name=name, validate=False)
    raise SpecError(f"{path}.kind", f"unknown group kind {kind!r}")


def _build_map(doc: SpecDocument, d: dict, path: str) -> grp.GroupHom:
    dom = doc.lookup("groups", _need(d, "domain", path), f"{path}.domain")
    cod = doc.lookup("groups", _need(d, "codomain", path), f"{path}.codomain")
    images = _int_list(_need(d, "images", path), f"{path}.images")
    return _wrap(path, grp.GroupHom, dom, cod, images)


# ---------------------------------------------------------------------------
# fields and extensions


def _build_field(doc: SpecDocument, d: dict, path: str) -> ExactField:
    if "extends" in d:
        K = doc.lookup("fields", d["extends"], f"{path}.extends")
    else:
        base = _need(d, "base", path)
        if base == "Q":
            K = ExactField.rationals()
        elif isinstance(base, dict) and "prime" in base:
            K = _wrap(f"{path}.base.prime", ExactField.prime_field, base["prime"])
        else:
            raise SpecError(f"{path}.base", "expected \"Q\" or {\"prime\": p}")
    tower = d.get("tower", [])
    if not isinstance(tower, list):
        raise SpecError(f"{path}.tower", "expected a list of polynomials")
    for i, poly in enumerate(tower):
        if not isinstance(poly, list):
            raise SpecError(f"{path}.tower[{i}]", "expected an ascending coefficient list")
        K = _wrap(f"{path}.tower[{i}]", extend, K, poly)
    return K


def prefix(L: ExactField, depth: Any, path: str) -> ExactField:
    chain = L.chain()
    if not isinstance(depth, int) or isinstance(depth, bool) or not 0 <= depth < len(chain):
        raise SpecError(path, f"tower depth must be an integer in [0, {len(chain) - 1}]")
    return chain[depth]


def _build_extension(doc: SpecDocument, d: dict, path: str) -> gal.GaloisExtension:
    kind = d.get("kind", "field")
    if kind == "field":
        L = doc.lookup("fields", _need(d, "field", path), f"{path}.field")
        K = prefix(L, d.get("over", 0), f"{path}.over")
        mode = d.get("mode", "auto")
        return _wrap(path, gal.galois_extension, K, L, mode, d.get("images"))
    if kind == "frobenius":
        return _wrap(path, gal.frobenius, _need(d, "p", path), _need(d, "n", path))
    if kind == "multiquadratic":
        return _wrap(path, gal.multiquadratic, _int_list(_need(d, "ds", path), f"{path}.ds"))
    if kind == "cyclotomic":
        return _wrap(path, gal.cyclotomic, _need(d, "n", path))
    if kind == "kummer_cyclotomic":
        return _wrap(path, gal.kummer_cyclotomic, d.get("a", 2))
    raise SpecError(f"{path}.kind", f"unknown extension kind {kind!r}")


# ---------------------------------------------------------------------------
# sets


def parse_elements(items: Any, path: str) -> list[SystemElement]:
    if not isinstance(items, list):
        raise SpecError(path, "expected a list of [level, coset] pairs")
    out = []
    for i, x in enumerate(items):
        if not (isinstance(x, list) and len(x) == 2 and all(isinstance(v, int) for v in x)):
            raise SpecError(f"{path}[{i}]", "expected [level, coset]")
        out.append(SystemElement(x[0], x[1]))
    return out


def parse_set(group: grp.FiniteGroup, d: Any, path: str, arity: int | None = None) -> DefinableSet:
    """A set given as a list of tuples, or an object with 'tuples' and optional 'arity'."""
    if isinstance(d, dict):
        arity = d.get("arity", arity)
        tuples = _need(d, "tuples", path)
        path = f"{path}.tuples"
    else:
        tuples = d
    if not isinstance(tuples, list):
        raise SpecError(path, "expected a list of tuples")
    parsed = [tuple(parse_elements(t, f"{path}[{i}]")) for i, t in enumerate(tuples)]
    if arity is None:
        if not parsed:
            raise SpecError(path, "an empty set needs an explicit arity")
        arity = len(parsed[0])
    return _wrap(path, DefinableSet, build_system(group), arity, tuple(parsed))


# ---------------------------------------------------------------------------


def parse_spec(data: bytes | str) -> SpecDocument:
    """Validate and build a spec document; errors carry the offending JSON path."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SpecError("$", f"not UTF-8: {exc}") from None
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SpecError("$", f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise SpecError("$", "top level must be an object")
    version = raw.get("version")
    if version not in SUPPORTED_VERSIONS:
        raise SpecError("$.version", f"unsupported version {version!r}; expected one of {list(SUPPORTED_VERSIONS)}")
    known = {"version", "groups", "maps", "fields", "extensions", "kummer", "sets", "params"}
    for key in raw:
        if key not in known:
            raise SpecError(f"$.{key}", "unknown section")
    doc = SpecDocument(version=version, raw=raw)
    for section in ("groups", "maps", "fields", "extensions", "kummer", "sets"):
        entries = raw.get(section, {})
        if not isinstance(entries, dict):
            raise SpecError(f"$.{section}", "expected an object keyed by name")
        for name, d in entries.items():
            path = f"$.{section}.{name}"
            if section == "groups":
                doc.groups[name] = _build_group(doc, name, d, path)
            elif section == "maps":
                doc.maps[name] = _build_map(doc, d, path)
            elif section == "fields":
                doc.fields[name] = _build_field(doc, d, path)
            elif section == "extensions":
                doc.extensions[name] = _build_extension(doc, d, path)
            elif section == "kummer":
                if isinstance(d, dict) and "bundled" in d:
                    doc.kummer[name] = _wrap(path, load_bundled, d["bundled"])
                else:
                    doc.kummer[name] = _wrap(path, KummerScenario.from_json, d, name)
            else:
                g = doc.lookup("groups", _need(d, "group", path), f"{path}.group")
                doc.sets[name] = parse_set(g, d, path)
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise SpecError("$.params", "expected an object")
    doc.params = params
    return doc
