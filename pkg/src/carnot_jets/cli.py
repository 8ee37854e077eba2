"""Command-line entry point.

Exit codes: 0 success, 1 usage or parse error, 2 mathematical obstruction,
3 internal certificate failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .algebra import AlgebraError, bch, load_algebra
from .contact import Obstruction, deprolong, is_contact, prolong_point
from .embed import CertificateError, embed
from .exact import rat, rat_str
from .formats import (FormatError, dumps, map_from_json, map_to_json, parse_rat_list, point_from_json,
                      point_to_json, poly_text, tensor_from_json, tensor_to_json, wpoly_from_json,
                      wpoly_to_json)
from .hd import HDSpace, NotMember, format_tensor, word_label
from .jets import JetError, jet_space
from .pbw import tau_coefficients
from .polyjet import dual_poly_basis, left_field, pairing_matrix, taylor

EXIT_USAGE, EXIT_OBSTRUCTION, EXIT_INTERNAL = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from None


def _index_str(I):
    return "(" + ",".join(str(i) for i in I) + ")"


def _op_text(alg, I):
    out = ""
    for i, k in enumerate(I):
        if k:
            out += alg.labels[i] + "~" + (f"^{k}" if k > 1 else "")
    return out or "1"


def _mono_text(alg, I):
    out = ""
    for i, k in enumerate(I):
        if k:
            out += alg.coord_names[i] + (f"^{k}" if k > 1 else "")
    return out or "1"


def _uea_text(alg, terms, order):
    parts = []
    for I in order:
        c = terms.get(I)
        if not c:
            continue
        body = _op_text(alg, I)
        mag = abs(c)
        s = body if mag == 1 else f"{mag}{body}"
        parts.append(("-" if c < 0 else "+", s))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, s in parts[1:]:
        out += f" {sign} {s}"
    return out


# -- subcommands ---------------------------------------------------------------


def cmd_validate(args):
    alg = load_algebra(args.alg)
    rep = alg.validate()
    out = {"name": alg.name, "layer_dims": list(alg.layer_dims()),
           "checks": {k: {"ok": ok, "message": msg} for k, (ok, msg) in rep.items()}}
    return out, 0 if all(ok for ok, _ in rep.values()) else EXIT_OBSTRUCTION


def cmd_bch(args):
    alg = load_algebra(args.alg).require_valid()
    x = alg.element(parse_rat_list(args.x))
    y = alg.element(parse_rat_list(args.y))
    return {"bch": [rat_str(c) for c in bch(x, y).coords]}, 0


def cmd_tau_table(args):
    alg = load_algebra(args.alg).require_valid()
    ws, idx, table = tau_coefficients(alg, args.m)
    return {"columns": [list(I) for I in idx],
            "rows": [{"word": [i + 1 for i in w], "label": word_label(alg, w),
                      "tau": [rat_str(table[w].get(I, 0)) for I in idx]} for w in ws]}, 0


def cmd_hd_basis(args):
    alg = load_algebra(args.alg).require_valid()
    sp = HDSpace.of(alg, args.wdim)
    out = []
    for I, c, A in sp.basis(args.m):
        item = {"index": list(I), "tensor": tensor_to_json(alg, A)}
        if args.wdim > 1:
            item["w"] = c + 1
        if args.wdim == 1:
            item["text"] = format_tensor(alg, A)
        out.append(item)
    return out, 0


def cmd_membership(args):
    alg = load_algebra(args.alg).require_valid()
    data = _read_json(args.tensor)
    A = tensor_from_json(alg, args.wdim, args.m, data)
    ok, info = HDSpace.of(alg, args.wdim).membership(A)
    if ok:
        return {"member": True, "expansion": [{"index": list(I), "w": c + 1, "coeff": rat_str(v)}
                                              for (I, c), v in sorted(info.items())]}, 0
    witness, pairing = info
    return {"member": False, "witness": {word_label(alg, w): rat_str(v) for w, v in sorted(witness.items())},
            "pairing": [rat_str(v) for v in pairing]}, EXIT_OBSTRUCTION


def cmd_dual_poly_basis(args):
    alg = load_algebra(args.alg).require_valid()
    p = parse_rat_list(args.point) if args.point else [0] * alg.n
    if len(p) != alg.n:
        raise UsageError(f"point needs {alg.n} coordinates")
    out = []
    for I, P in dual_poly_basis(alg, p, args.m):
        out.append({"index": list(I), "poly": wpoly_to_json([P]), "text": poly_text(alg, P)})
    return out, 0


def cmd_taylor(args):
    alg = load_algebra(args.alg).require_valid()
    f = wpoly_from_json(_read_json(args.poly), alg.coord_names)
    p = parse_rat_list(args.point)
    if len(p) != alg.n:
        raise UsageError(f"point needs {alg.n} coordinates")
    comps = taylor(alg, f, p, args.m)
    return {"center": [rat_str(c) for c in p],
            "components": [{"degree": k, "poly": wpoly_to_json(P)} for k, P in enumerate(comps)]}, 0


def cmd_jet_algebra(args):
    alg = load_algebra(args.alg).require_valid()
    js = jet_space(alg, args.wdim, args.m)
    ja = js.algebra()
    rep = ja.validate()
    out = ja.to_json()
    out["layer_dims"] = list(ja.layer_dims())
    out["step"] = ja.step
    out["provenance"] = [list(p) if p[0] == "base" else ["hd", p[1], list(p[2]), p[3] + 1] for p in ja.provenance]
    out["valid"] = all(ok for ok, _ in rep.values())
    return out, 0 if out["valid"] else EXIT_INTERNAL


def _space(args):
    alg = load_algebra(args.alg).require_valid()
    return jet_space(alg, args.wdim, args.m)


def cmd_jet_mul(args):
    js = _space(args)
    p = point_from_json(js, _read_json(args.p))
    q = point_from_json(js, _read_json(args.q))
    return point_to_json(js.multiply(p, q)), 0


def cmd_jet_exp(args):
    js = _space(args)
    data = _read_json(args.x)
    try:
        x = [rat(c) for c in data["x"]]
        X = {}
        for k, tens in data.get("X", {}).items():
            X[int(k)] = js.hd.coords(tensor_from_json(js.alg, js.wdim, int(k), tens))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, (FormatError, NotMember)):
            raise
        raise FormatError(f"bad algebra element: {exc}") from None
    if len(x) != js.alg.n:
        raise UsageError(f"x needs {js.alg.n} coordinates")
    return point_to_json(js.exp(x, X)), 0


def cmd_contact_check(args):
    F = map_from_json(_read_json(args.map))
    ok, info = is_contact(F)
    if ok:
        return {"contact": True, "certificate": info}, 0
    info = dict(info)
    info["poly"] = {",".join(map(str, e)): rat_str(c) for e, c in sorted(info["poly"].terms.items())}
    return {"contact": False, "witness": info}, EXIT_OBSTRUCTION


def cmd_prolong(args):
    js = _space(args)
    F = map_from_json(_read_json(args.map), js)
    ok, info = is_contact(F)
    if not ok:
        raise Obstruction("map is not contact", info)
    phat = point_from_json(js.higher(), _read_json(args.point))
    return point_to_json(prolong_point(F, phat)), 0


def cmd_deprolong(args):
    F = map_from_json(_read_json(args.map))
    Fp, rep = deprolong(F)
    out = map_to_json(Fp)
    if "hypotheses" in rep:
        out["hypotheses"] = rep["hypotheses"]
    return out, 0


def cmd_embed(args):
    g = load_algebra(args.alg).require_valid()
    res = embed(g)
    gq = res.quotient
    out = {"quotient": gq.to_json(), "target": f"j^{gq.step}({gq.name}; V_{g.step})", "phi": [],
           "certificates": res.certificates}
    for u in range(g.n):
        out["phi"].append({"basis": g.labels[u], "poly": wpoly_to_json(res.polys[u]),
                           "multilinear": {"degree": res.stacks[u].degree,
                                           "tensor": tensor_to_json(gq, res.stacks[u])}})
    return out, 0


# -- report ------------------------------------------------------------------


def heisenberg_report():
    alg = load_algebra("heisenberg(1)")
    lines = ["Heisenberg algebra h: basis X, Y, Z; [X,Y] = Z; V1 = span{X,Y}, V2 = span{Z}", ""]
    lines.append("Left-invariant fields in exponential coordinates (x, y, z):")
    for i in range(alg.n):
        parts = []
        for k, q in enumerate(left_field(alg, i)):
            if q:
                coef = poly_text(alg, q)
                term = f"d_{alg.coord_names[k]}" if coef == "1" else f"({coef}) d_{alg.coord_names[k]}"
                parts.append(term)
        lines.append(f"  {alg.labels[i]}~ = " + " + ".join(parts))
    for m in (1, 2, 3):
        ws, idx, table = tau_coefficients(alg, m)
        sp = HDSpace.of(alg, 1)
        lines += ["", f"== HD^{m}(h; R) ==",
                  "words: " + ", ".join("⊗".join(alg.labels[i] for i in w) for w in ws),
                  "multi-indices: " + ", ".join(_index_str(I) for I in idx),
                  "U^{} basis: ".format(m) + ", ".join(_op_text(alg, I) for I in idx)]
        for w in ws:
            rev = "".join(alg.labels[i] + "~" for i in reversed(w))
            lines.append(f"tau({'⊗'.join(alg.labels[i] for i in w)}) = {rev} = {_uea_text(alg, table[w], idx)}")
        for I, _, A in sp.basis(m):
            lines.append(f"A_{_index_str(I)} = {format_tensor(alg, A)}")
        idx2, M = pairing_matrix(alg, m)
        head = [_op_text(alg, I) for I in idx2]
        rows = [[_mono_text(alg, J)] + [str(M[a][b]) for a in range(len(idx2))] for b, J in enumerate(idx2)]
        widths = [max(len(r[c]) for r in rows + [[""] + head]) for c in range(len(head) + 1)]
        lines.append("pairing <D|x^J>_e (rows x^J, columns D):")
        lines.append("  " + " | ".join(s.ljust(wd) for s, wd in zip([""] + head, widths)))
        for r in rows:
            lines.append("  " + " | ".join(s.ljust(wd) for s, wd in zip(r, widths)))
        basis = dual_poly_basis(alg, [0, 0, 0], m)
        lines.append(f"dual basis of P^{m}_e: {{" + ", ".join(poly_text(alg, P) for _, P in basis) + "}")
    return "\n".join(lines) + "\n"


def cmd_heisenberg_report(args):
    return heisenberg_report(), 0


# -- dispatcher --------------------------------------------------------------


def build_parser():
    p = _Parser(prog="carnot-jets", description="Exact jet spaces over Carnot groups.")
    p.add_argument("-o", "--output", help="write the result to this file instead of stdout")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def add(name, fn, help_, alg=True, m=False, wdim_pos=False):
        sp = sub.add_parser(name, help=help_)
        if alg:
            sp.add_argument("alg", help="catalog name like heisenberg(1) or an algebra JSON file")
        if wdim_pos:
            sp.add_argument("wdim", type=int, help="dimension of W")
        if m:
            sp.add_argument("m", type=int, help="order / degree")
        sp.set_defaults(fn=fn)
        return sp

    add("validate", cmd_validate, "check Jacobi, grading and bracket generation")
    sp = add("bch", cmd_bch, "BCH product of two elements")
    sp.add_argument("x", help="comma-separated rationals")
    sp.add_argument("y", help="comma-separated rationals")
    add("tau-table", cmd_tau_table, "tau_I coefficients on the word basis", m=True)
    sp = add("hd-basis", cmd_hd_basis, "basis A_I of HD^m", m=True)
    sp.add_argument("--wdim", type=int, default=1)
    sp = add("hd-member", cmd_membership, "expand a tensor in the A_I basis", m=True)
    sp.add_argument("--tensor", required=True, help="JSON {word: [rat]}")
    sp.add_argument("--wdim", type=int, default=1)
    sp = add("dual-poly-basis", cmd_dual_poly_basis, "polynomials dual to the PBW basis", m=True)
    sp.add_argument("--point", help="center p as comma-separated rationals (default e)")
    sp = add("taylor", cmd_taylor, "homogeneous Taylor components", m=True)
    sp.add_argument("--poly", required=True, help="polynomial JSON file")
    sp.add_argument("--point", required=True, help="comma-separated rationals")
    add("jet-algebra", cmd_jet_algebra, "structure constants of j^m(g;W)", m=True, wdim_pos=True)
    sp = add("jet-mul", cmd_jet_mul, "product of two jet points", m=True, wdim_pos=True)
    sp.add_argument("--p", required=True)
    sp.add_argument("--q", required=True)
    sp = add("jet-exp", cmd_jet_exp, "exponential of a jet algebra element", m=True, wdim_pos=True)
    sp.add_argument("--x", required=True, help="JSON {x: [rat], X: {k: {word: [rat]}}}")
    sp = add("contact-check", cmd_contact_check, "certify a polynomial map as contact", alg=False)
    sp.add_argument("--map", required=True)
    sp = add("prolong", cmd_prolong, "evaluate the prolongation at a point of J^{m+1}", m=True, wdim_pos=True)
    sp.add_argument("--map", required=True)
    sp.add_argument("--point", required=True)
    sp = add("deprolong", cmd_deprolong, "factor a contact map through pi_m", alg=False)
    sp.add_argument("--map", required=True)
    add("embed", cmd_embed, "embed a step-(s+1) algebra into j^s(g'; V_{s+1})")
    add("heisenberg-report", cmd_heisenberg_report, "the worked Heisenberg tables", alg=False)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    for name in ("m", "wdim"):
        if getattr(args, name, 0) is not None and getattr(args, name, 0) < 0:
            print(f"error: {name} must be non-negative", file=sys.stderr)
            return EXIT_USAGE
    if getattr(args, "wdim", 1) == 0:
        print("error: dim W must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        result, code = args.fn(args)
    except (UsageError, FormatError, AlgebraError, JetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (Obstruction, NotMember) as exc:
        print(f"obstruction: {exc}", file=sys.stderr)
        wit = getattr(exc, "witness", None)
        if isinstance(wit, dict) and "obstruction" in wit:
            ob = wit["obstruction"]
            print(f"  {ob['component']} depends on {ob['variable']}: d/d{ob['variable']} = {ob['derivative']}",
                  file=sys.stderr)
        return EXIT_OBSTRUCTION
    except (CertificateError, AssertionError) as exc:
        print(f"internal certificate failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    text = result if isinstance(result, str) else dumps(result) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
