"""Command-line front end: genus data, dimension tables, Hecke data,
Euler factors, and the consistency checks, as text tables or JSON."""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import genus as genus_mod
from .lattice import SpinCharacter, squarefree_part


def _cache_dir(args):
    return (args.cache_dir or os.environ.get("SOMF_CACHE_DIR")
            or os.path.join(os.path.expanduser("~"), ".somf-cache"))


def _classes(args):
    return genus_mod.get_genus(args.disc, cache_dir=_cache_dir(args))


def _parse_char(s):
    s = (s or "triv").strip()
    det = False
    parts = [x for x in s.split(",") if x]
    d0 = 1
    for part in parts:
        part = part.strip()
        if part in ("det",):
            det = True
        elif part in ("triv", "1", "spin1"):
            pass
        elif part.startswith("spin"):
            d0 *= int(part[4:])
        else:
            raise SystemExit("unknown character component %r" % part)
    return SpinCharacter(d0, det_twist=det)


def _emit(args, obj, text):
    if args.json:
        json.dump(obj, sys.stdout, indent=1, default=str)
        sys.stdout.write("\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _series_text(s, depth):
    c = s.expand(depth)
    return " ".join(str(x) for x in c)


# ------------------------------------------------------- subcommands


def cmd_genus(args):
    cl = _classes(args)
    obj = cl.to_json()
    lines = ["disc %d: %d classes, mass %s" % (args.disc, len(cl.classes),
                                               cl.mass())]
    for i, c in enumerate(cl.classes):
        lines.append("class %d |O| = %d |SO| = %d gram rows %s"
                     % (i, c["autO"], c["autSO"],
                        "; ".join(",".join(str(x) for x in row)
                                  for row in c["gram"])))
    _emit(args, obj, "\n".join(lines))
    return 0


def cmd_mass(args):
    desc = genus_mod.GenusDescriptor(args.disc)
    closed = genus_mod.mass_closed_form(desc)
    cl = _classes(args)
    ok = closed == cl.mass()
    _emit(args, {"disc": args.disc, "closed_form": str(closed),
                 "class_sum": str(cl.mass()), "match": ok},
          "disc %d mass %s (closed form) %s (sum 1/|O|) %s"
          % (args.disc, closed, cl.mass(), "ok" if ok else "MISMATCH"))
    return 0 if ok else 1


def cmd_amf_dim(args):
    from . import amf
    cl = _classes(args)
    chi = _parse_char(args.char)
    sp = amf.invariant_subspace(cl, args.weight, chi)
    _emit(args, {"disc": args.disc, "weight": args.weight,
                 "char": chi.name(), "class_dims": sp.class_dims,
                 "dim": sp.dimension},
          "disc %d nu=%d char %s: dim %d (per class %s)"
          % (args.disc, args.weight, chi.name(), sp.dimension,
             sp.class_dims))
    return 0


def cmd_amf_series(args):
    from . import amf
    cl = _classes(args)
    chi = _parse_char(args.char)
    s = amf.dimension_series(cl, chi, args.depth)
    _emit(args, {"disc": args.disc, "char": chi.name(),
                 "coeffs": [str(x) for x in s.expand(args.depth)]},
          _series_text(s, args.depth))
    return 0


def _rational_eigenforms(space, p_split):
    """Rational eigenlines of the space under T_{p,1}."""
    from . import amf
    from .poly import MultiPoly
    T = amf.hecke_matrix(space, p_split, 1)
    sp = amf.eigen_split(space, T)
    basis = space.basis()
    forms = []
    for lam, vecs in sp.rational_lines():
        v = vecs[0]
        comps = [MultiPoly.zero(6) for _ in space.lattices()]
        for j, c in enumerate(v):
            if c == 0:
                continue
            for i, P in enumerate(basis[j].components):
                comps[i] = comps[i] + P * Fraction(c)
        den = 1
        for P in comps:
            for c0 in P.coeffs.values():
                den = den * c0.denominator // _gcd(den, c0.denominator) \
                    if c0.denominator > 1 else den
        forms.append((lam, amf.AMForm(space.lattices(), space.nu,
                                      space.chi, comps,
                                      classes=space.classes)))
    return forms


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _good_prime(delta):
    p = 2
    while delta % p == 0:
        p += 1
    return p


def cmd_amf_hecke(args):
    from . import amf
    cl = _classes(args)
    chi = _parse_char(args.char)
    sp = amf.invariant_subspace(cl, args.weight, chi)
    T = amf.hecke_matrix(sp, args.p, args.k)
    _emit(args, {"disc": args.disc, "weight": args.weight,
                 "char": chi.name(), "p": args.p, "k": args.k,
                 "matrix": [[str(x) for x in row] for row in T]},
          "\n".join(" ".join(str(x) for x in row) for row in T))
    return 0


def cmd_amf_lfun(args):
    from . import amf
    cl = _classes(args)
    chi = _parse_char(args.char)
    sp = amf.invariant_subspace(cl, args.weight, chi)
    forms = _rational_eigenforms(sp, _good_prime(args.disc))
    split = genus_mod.kronecker(args.disc, args.p) == 1
    out = []
    lines = []
    for lam0, f in forms:
        lams = {k: amf.hecke_eigenvalue_orbits(f, args.p, k)
                for k in range(1, 4)}
        F = amf.standard_euler_factor(lams, args.weight, args.p, split)
        out.append({"split_eigenvalue": str(lam0),
                    "lambdas": {str(k): str(v) for k, v in lams.items()},
                    "euler_factor": [str(c) for c in F]})
        lines.append("eigenform (T_%d eigenvalue %s): L_%d = %s"
                     % (_good_prime(args.disc), lam0, args.p,
                        [str(c) for c in F]))
    _emit(args, {"disc": args.disc, "weight": args.weight,
                 "char": chi.name(), "p": args.p, "eigenforms": out},
          "\n".join(lines) or "no rational eigenforms")
    return 0


def cmd_theta(args):
    from . import amf
    cl = _classes(args)
    chi = _parse_char(args.char)
    sp = amf.invariant_subspace(cl, args.weight, chi)
    forms = _rational_eigenforms(sp, _good_prime(args.disc))
    out = []
    lines = []
    for lam0, f in forms:
        th = amf.theta_map(f, N=args.prec)
        comps = {",".join(map(str, mu)):
                 {str(n): str(c) for n, c in sorted(d.items()) if c != 0}
                 for mu, d in sorted(th.components.items())}
        zero = th.is_zero()
        out.append({"split_eigenvalue": str(lam0),
                    "weight": str(th.weight), "bound": str(th.bound),
                    "components": comps, "zero": zero})
        lines.append("eigenform %s: theta %s" % (lam0,
                                                 "= 0" if zero else "!= 0"))
    _emit(args, {"disc": args.disc, "weight": args.weight,
                 "char": chi.name(), "eigenforms": out},
          "\n".join(lines) or "no rational eigenforms")
    return 0


def cmd_jacobian(args):
    from . import amf
    cl = _classes(args)
    f = amf.jacobian_form(cl.lattices()[0])
    _emit(args, {"disc": args.disc, "degree": f.nu, "char": f.chi.name()},
          "disc %d: jacobian form of degree %d, character %s"
          % (args.disc, f.nu, f.chi.name()))
    return 0


def cmd_lift_lfun(args):
    from . import elliptic
    forms = elliptic.level1_eigenforms(args.weight, prec=40)
    out = []
    lines = []
    nu = args.nu if args.nu is not None else args.weight - 3
    for f in forms:
        if args.kind == "yoshida":
            F = elliptic.yoshida_euler(f, f, args.disc, nu, args.p)
        elif args.kind == "miyawaki":
            g = elliptic.level1_eigenforms(args.weight - 2, prec=40)[0]
            F = elliptic.miyawaki_euler(f, g, args.disc, args.p)
        else:
            raise SystemExit("unknown lift kind %r" % args.kind)
        out.append([str(c) for c in F])
        lines.append("L_%d = %s" % (args.p, [str(c) for c in F]))
    _emit(args, {"kind": args.kind, "disc": args.disc, "p": args.p,
                 "factors": out}, "\n".join(lines))
    return 0


def cmd_herm_hecke(args):
    from . import hermitian
    ctx = hermitian.FieldContext(args.disc)
    k = args.weight
    T = hermitian.delta_table(ctx, k, support=(args.prec, args.prec))
    p = args.p
    chi = ctx.chi(p)
    if chi == -1:
        U = hermitian.tp_inert(T, p, k)
    elif chi == 1:
        U = hermitian.tp_split(T, p, k)
    else:
        raise SystemExit("p divides the discriminant")
    lam, info = hermitian.eigenvalue_extract(T, U)
    _emit(args, {"disc": args.disc, "weight": k, "p": p,
                 "eigenvalue": str(lam), "indices_used": info["indices_used"]},
          "disc %d weight %d: T_%d eigenvalue %s" % (args.disc, k, p, lam))
    return 0


def cmd_herm_euler(args):
    from . import hermitian
    ctx = hermitian.FieldContext(args.disc)
    k = args.weight
    p = args.p
    chi = ctx.chi(p)
    T = hermitian.delta_table(ctx, k, support=(args.prec, args.prec))
    if chi == -1:
        l1, _ = hermitian.eigenvalue_extract(T, hermitian.tp_inert(T, p, k))
        l2, _ = hermitian.eigenvalue_extract(T, hermitian.tp2_inert(T, p, k))
        F = hermitian.degree6_from_eigenvalues(k, p, inert=(l1, l2))
    elif chi == 1:
        pi = ctx.split_gen(p)
        lp, _ = hermitian.eigenvalue_extract(T, hermitian.tp_split(T, p, k))
        lf, _ = hermitian.eigenvalue_extract(T, hermitian.tfrakp_split(T, pi, k))
        pic = ctx.conj(pi)
        lfc, _ = hermitian.eigenvalue_extract(
            T, hermitian.tfrakp_split(T, pic, k))
        F = hermitian.degree6_from_eigenvalues(k, p, split=(lp, lf, lfc))
    else:
        raise SystemExit("p divides the discriminant")
    _emit(args, {"disc": args.disc, "weight": k, "p": p,
                 "euler_factor": [str(c) for c in F]},
          "L_%d = %s" % (p, [str(c) for c in F]))
    return 0


def cmd_atkin_lehner(args):
    from . import hermitian
    delta = args.disc
    m = -delta if delta % 2 else -delta // 4
    out = []
    lines = []
    for d in sorted(x for x in range(1, m + 1) if m % x == 0):
        try:
            W = hermitian.atkin_lehner_matrix(d, delta)
        except (ValueError, ArithmeticError):
            continue
        ctx = hermitian.FieldContext(delta)
        ok = hermitian.atkin_lehner_unitary(ctx, W)
        out.append({"d": d, "unitary": ok})
        lines.append("W_%d: unitary %s" % (d, ok))
    _emit(args, {"disc": delta, "involutions": out}, "\n".join(lines))
    return 0


def cmd_dim_series(args):
    from . import dimseries
    s = dimseries.hermitian_series(args.disc, args.group)
    _emit(args, {"disc": args.disc, "group": args.group,
                 "series": s.to_json(),
                 "coeffs": [str(x) for x in s.expand(args.depth)]},
          _series_text(s, args.depth))
    return 0


def cmd_check_thm53(args):
    from . import dimseries
    r = dimseries.correspondence_check(args.disc, args.depth)
    _emit(args, r, "disc %d to t^%d: %s" % (args.disc, args.depth,
                                            "ok" if r["ok"] else
                                            "FAIL %s" % r["rows"][:3]))
    return 0 if r["ok"] else 1


def _fundamental_discs(lo, hi):
    out = []
    for D in range(lo, hi + 1):
        d = -D
        if d % 4 == 1:
            out.append(D)
        elif d % 4 == 0 and ((-d // 4) % 4 in (1, 2)
                             and squarefree_part(D // 4) == D // 4):
            out.append(D)
    return out


def cmd_appc_table(args):
    rows = []
    lines = []
    for D in _fundamental_discs(args.min, args.max):
        cl = genus_mod.get_genus(-D, cache_dir=_cache_dir(args))
        dims, total = genus_mod.weight0_spin_dims(cl)
        rows.append({"D": D, "classes": len(cl.classes),
                     "dims": {str(k): v for k, v in sorted(dims.items())},
                     "total": total})
        lines.append("D=%d classes=%d total=%d" % (D, len(cl.classes), total))
    _emit(args, {"rows": rows}, "\n".join(lines))
    return 0


def cmd_appb_table(args):
    from . import dimseries
    exp = dimseries.expected_orthogonal_dims(args.disc)
    rows = dimseries.appendix_rows(args.disc)
    lines = ["k " + " ".join("%3d" % k for k in range(4, 21))]
    for name in ("Maass", "Maass_spin", "G", "G_spin", "Y"):
        lines.append("%-10s %s" % (name, " ".join("%3d" % rows[name][k - 1]
                                                  for k in range(4, 21))))
    lines.append("%-10s %s" % ("triv", " ".join("%3d" % v for v in exp[1])))
    lines.append("%-10s %s" % ("spin", " ".join("%3d" % v
                                                for v in exp["spin"])))
    _emit(args, {"disc": args.disc, "rows": rows, "expected": {
        "triv": exp[1], "spin": exp["spin"]}}, "\n".join(lines))
    return 0


# ------------------------------------------------------------ driver


def _add_common(sp, *names):
    if "disc" in names:
        sp.add_argument("--disc", type=int, required=True)
    if "weight" in names:
        sp.add_argument("--weight", type=int, required=True)
    if "char" in names:
        sp.add_argument("--char", default="triv")
    if "p" in names:
        sp.add_argument("--p", type=int, required=True)
    if "k" in names:
        sp.add_argument("--k", type=int, default=1)
    if "prec" in names:
        sp.add_argument("--prec", type=int, default=6)
    if "depth" in names:
        sp.add_argument("--depth", type=int, default=20)


def main(argv=None):
    ap = argparse.ArgumentParser(prog="somf")
    ap.add_argument("--cache-dir", default=None)
    ap.add_argument("--json", action="store_true")
    ap.add_argument("--threads", type=int, default=1)
    sub = ap.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("genus"); _add_common(s, "disc")
    s = sub.add_parser("mass"); _add_common(s, "disc")
    s = sub.add_parser("amf-dim"); _add_common(s, "disc", "weight", "char")
    s = sub.add_parser("amf-series"); _add_common(s, "disc", "char", "depth")
    s = sub.add_parser("amf-hecke")
    _add_common(s, "disc", "weight", "char", "p", "k")
    s = sub.add_parser("amf-lfun"); _add_common(s, "disc", "weight", "char", "p")
    s = sub.add_parser("theta"); _add_common(s, "disc", "weight", "char")
    s.add_argument("--prec", type=int, default=None)
    s = sub.add_parser("jacobian"); _add_common(s, "disc")
    s = sub.add_parser("lift-lfun")
    s.add_argument("--kind", required=True, choices=["yoshida", "miyawaki"])
    _add_common(s, "disc", "weight", "p")
    s.add_argument("--nu", type=int, default=None)
    s = sub.add_parser("herm-hecke"); _add_common(s, "disc", "weight", "p", "prec")
    s = sub.add_parser("herm-euler"); _add_common(s, "disc", "weight", "p", "prec")
    s = sub.add_parser("atkin-lehner"); _add_common(s, "disc")
    s = sub.add_parser("dim-series"); _add_common(s, "disc", "depth")
    s.add_argument("--group", default="GammaK", choices=["GammaK", "GammaK*"])
    s = sub.add_parser("check-thm53"); _add_common(s, "disc")
    s.add_argument("--depth", type=int, default=40)
    s = sub.add_parser("appc-table")
    s.add_argument("--min", type=int, default=3)
    s.add_argument("--max", type=int, default=164)
    s = sub.add_parser("appb-table"); _add_common(s, "disc")

    args = ap.parse_args(argv)
    handlers = {
        "genus": cmd_genus, "mass": cmd_mass, "amf-dim": cmd_amf_dim,
        "amf-series": cmd_amf_series, "amf-hecke": cmd_amf_hecke,
        "amf-lfun": cmd_amf_lfun, "theta": cmd_theta,
        "jacobian": cmd_jacobian, "lift-lfun": cmd_lift_lfun,
        "herm-hecke": cmd_herm_hecke, "herm-euler": cmd_herm_euler,
        "atkin-lehner": cmd_atkin_lehner, "dim-series": cmd_dim_series,
        "check-thm53": cmd_check_thm53, "appc-table": cmd_appc_table,
        "appb-table": cmd_appb_table,
    }
    return handlers[args.cmd](args)


if __name__ == "__main__":
    raise SystemExit(main())
