"""Command-line front end.

Exit codes: 0 the property was verified or the value computed; 1 the
property was refuted (non-membership, undefined product, failed
verification); 2 usage or parse errors; 3 a size or search budget was
exceeded.  Reports go to standard output, diagnostics to standard error.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
import time

from . import appendix as appendixlab
from . import famgroups, massey, ncseries
from .config import Caps, load_caps
from .errors import NoWitness, TooLarge, UnipotentLabError
from .fingrp import (
    FinGroup,
    Presentation,
    abelian_group,
    compare_filtrations,
    cyclic_group,
    enumerate_homs,
    series,
    trivial_group,
    unitriangular_group,
)
from .freewords import Filtration, in_filtration, parse_word, witness_rep
from .report import Report, slug, write_csv
from .residue import RingSpec
from .unimat import solve_conjugation

_U_SHORTHAND = re.compile(r"^u(\d+)f(\d+)$")


def parse_group(text: str, caps: Caps) -> FinGroup:
    """Group descriptors: trivial, cyclic:K, abelian:K1,K2,...,
    unitriangular:n=3,ring=Fp:2 (shorthand u3f2), or a family descriptor."""
    if text == "trivial":
        return trivial_group()
    m = _U_SHORTHAND.match(text)
    if m:
        return unitriangular_group(int(m.group(1)),
                                   RingSpec.prime_field(int(m.group(2))), caps)
    kind, _, rest = text.partition(":")
    if kind == "cyclic":
        return cyclic_group(int(rest))
    if kind == "abelian":
        return abelian_group([int(x) for x in rest.split(",")])
    if kind == "unitriangular":
        params = dict(item.split("=", 1) for item in rest.split(","))
        return unitriangular_group(int(params["n"]),
                                   RingSpec.parse(params["ring"]), caps)
    return famgroups.parse_family(text, caps).group


def parse_characters(text: str, G: FinGroup, p: int) -> list[massey.Character]:
    """Comma-separated characters; each is ``id`` (single-generator
    groups) or colon-separated values on the generators."""
    out = []
    for item in text.split(","):
        item = item.strip()
        if item == "id":
            if len(G.gens) != 1:
                raise UnipotentLabError(
                    "'id' character needs a single-generator group")
            out.append(massey.Character.from_gen_values(G, p, [1]))
        else:
            vals = [int(x) for x in item.split(":")]
            out.append(massey.Character.from_gen_values(G, p, vals))
    return out


def parse_element(family: famgroups.Family, text: str) -> tuple:
    """Family elements: inner coordinates comma-joined, outer after ';'."""
    mod = family.modulus
    parts = text.split(";")
    inner = [int(x) % mod for x in parts[0].split(",")] if parts[0] else []
    if len(inner) != family.inner_rank:
        raise UnipotentLabError(
            f"expected {family.inner_rank} inner coordinates, got {len(inner)}")
    if family.has_outer:
        if len(parts) != 2:
            raise UnipotentLabError("expected 'inner;outer' for this family")
        return tuple(inner) + (int(parts[1]) % mod,)
    if len(parts) != 1:
        raise UnipotentLabError("this family has no outer component")
    return tuple(inner)


def _common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--format", choices=("text", "json"), default="text")
    sub.add_argument("--config", default=None, help="caps/budgets JSON file")
    sub.add_argument("--threads", type=int, default=1,
                     help="worker cap (current implementation is sequential)")
    sub.add_argument("--timings", action="store_true",
                     help="append an elapsed-ms line (off for byte-stable output)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unipotent-lab",
        description="Exact computations with group filtrations, unipotent "
                    "representations and Massey products.")
    subs = parser.add_subparsers(dest="verb", required=True)

    p_magnus = subs.add_parser("magnus", help="Magnus expansion of a word")
    p_magnus.add_argument("--word", required=True)
    p_magnus.add_argument("--d", type=int, default=None)
    p_magnus.add_argument("--ring", default="Z")
    p_magnus.add_argument("--cutoff", type=int, required=True)
    _common(p_magnus)

    for verb in ("filtration", "witness"):
        sp = subs.add_parser(verb, help=f"{verb} check for a word")
        sp.add_argument("--word", required=True)
        sp.add_argument("--kind", required=True,
                        choices=("lower-central", "zassenhaus", "p-central"))
        sp.add_argument("--p", type=int, default=None)
        sp.add_argument("--n", type=int, required=True)
        _common(sp)

    p_series = subs.add_parser("series", help="filtration series of a finite group")
    p_series.add_argument("--group", required=True)
    p_series.add_argument("--kind", required=True,
                          choices=("lower-central", "zassenhaus", "p-central"))
    p_series.add_argument("--p", type=int, default=None)
    p_series.add_argument("--upto", type=int, default=8)
    p_series.add_argument("--figures", default=None,
                          help="directory for the PNG figure and CSV table")
    _common(p_series)

    p_homs = subs.add_parser("homs", help="enumerate homomorphisms of a presentation")
    p_homs.add_argument("--presentation", required=True, help="presentation file")
    p_homs.add_argument("--target", required=True)
    p_homs.add_argument("--show", type=int, default=5)
    _common(p_homs)

    p_conj = subs.add_parser("conjugator", help="solve A B A^-1 = B^t for B = 1+X")
    p_conj.add_argument("--target", required=True,
                        choices=("power", "negpower", "inverse"))
    p_conj.add_argument("--p", type=int, required=True)
    p_conj.add_argument("--s", type=int, required=True)
    p_conj.add_argument("--k", type=int, default=None)
    _common(p_conj)

    p_family = subs.add_parser("family", help="build a parametric finite group")
    p_family.add_argument("--desc", required=True)
    _common(p_family)

    p_sep = subs.add_parser("separate", help="separating representation of an element")
    p_sep.add_argument("--family", required=True)
    p_sep.add_argument("--element", required=True)
    _common(p_sep)

    p_kv = subs.add_parser("kernel-verify",
                           help="kernel n-unipotent property on a quotient")
    p_kv.add_argument("--family", required=True)
    p_kv.add_argument("--n", type=int, required=True)
    _common(p_kv)

    for verb in ("massey", "cross-check"):
        sp = subs.add_parser(verb, help=f"{verb} for an n-fold Massey product")
        sp.add_argument("--group", required=True)
        sp.add_argument("--p", type=int, required=True)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--alphas", required=True)
        _common(sp)

    p_embed = subs.add_parser("embed", help="minimal unipotent embedding")
    p_embed.add_argument("--p", type=int, required=True)
    p_embed.add_argument("--group", required=True, choices=("cyclic-p2", "mp3"))
    _common(p_embed)

    p_apx = subs.add_parser("appendix", help="kernel property counterexamples")
    p_apx.add_argument("action", choices=("verify",))
    p_apx.add_argument("--p", type=int, required=True)
    p_apx.add_argument("--N", type=int, required=True)
    p_apx.add_argument("--target", action="append", required=True,
                       help="target group descriptor (repeatable)")
    p_apx.add_argument("--n", type=int, default=3)
    p_apx.add_argument("--count-homs", action="store_true")
    _common(p_apx)

    p_cmp = subs.add_parser("compare", help="compare p-central vs Zassenhaus series")
    p_cmp.add_argument("--group", required=True)
    p_cmp.add_argument("--p", type=int, required=True)
    p_cmp.add_argument("--max-level", type=int, default=4)
    p_cmp.add_argument("--figures", default=None)
    _common(p_cmp)

    return parser


def _add_matrix(report: Report, key: str, mat) -> None:
    report.add(key, mat.to_text())


def _filtration_of(args) -> Filtration:
    p = None if args.kind == "lower-central" else args.p
    return Filtration(args.kind, p)


def run_magnus(args, caps: Caps, report: Report) -> int:
    w = parse_word(args.word, args.d)
    spec = RingSpec.parse(args.ring)
    out = ncseries.magnus(w, spec, args.cutoff)
    report.add("word", str(w))
    report.add("d", w.d)
    report.add("ring", str(spec))
    report.add("cutoff", args.cutoff)
    report.add("series", ncseries.dump(out))
    return 0


def run_filtration(args, caps: Caps, report: Report) -> int:
    w = parse_word(args.word)
    filt = _filtration_of(args)
    member = in_filtration(w, filt, args.n, caps)
    report.add("word", str(w))
    report.add("kind", str(filt))
    report.add("n", args.n)
    report.add("verdict", "member" if member else "not-a-member")
    if member:
        return 0
    wit = witness_rep(w, filt, args.n, caps)
    report.add("witness.index", "(" + ",".join(str(i) for i in wit.index) + ")")
    report.add("witness.ring", str(wit.spec))
    report.add("witness.size", wit.size)
    report.add("witness.corner", wit.corner)
    _add_matrix(report, "witness.matrix", wit.matrix)
    return 1


def run_witness(args, caps: Caps, report: Report) -> int:
    w = parse_word(args.word)
    filt = _filtration_of(args)
    report.add("word", str(w))
    report.add("kind", str(filt))
    report.add("n", args.n)
    try:
        wit = witness_rep(w, filt, args.n, caps)
    except NoWitness:
        report.add("verdict", "no-witness")
        report.add("member", True)
        return 1
    report.add("verdict", "witness-found")
    report.add("witness.index", "(" + ",".join(str(i) for i in wit.index) + ")")
    report.add("witness.ring", str(wit.spec))
    report.add("witness.size", wit.size)
    report.add("witness.corner", wit.corner)
    _add_matrix(report, "witness.matrix", wit.matrix)
    return 0


def run_series(args, caps: Caps, report: Report) -> int:
    G = parse_group(args.group, caps)
    table = series(G, args.kind, args.p, upto=args.upto)
    orders = table.orders()
    report.add("group", G.name)
    report.add("order", G.order)
    report.add("kind", args.kind)
    if args.p is not None:
        report.add("p", args.p)
    report.add("levels", ",".join(str(o) for o in orders))
    report.add("stabilized", table.stabilized)
    report.add("trivial-at", len(orders) if orders[-1] == 1 else "none")
    if args.figures:
        os.makedirs(args.figures, exist_ok=True)
        stem = slug(f"series-{args.group}-{args.kind}")
        csv_path = os.path.join(args.figures, stem + ".csv")
        png_path = os.path.join(args.figures, stem + ".png")
        write_csv(csv_path, ["level", "order"],
                  [[i + 1, o] for i, o in enumerate(orders)])
        from .plots import render_series_figure
        render_series_figure(png_path, f"{G.name}: {args.kind}",
                             args.p or 2, orders)
        report.add("table", csv_path)
        report.add("figure", png_path)
    return 0


def run_homs(args, caps: Caps, report: Report) -> int:
    with open(args.presentation, "r", encoding="utf-8") as fh:
        pres = Presentation.parse(fh.read())
    H = parse_group(args.target, caps)
    homs = enumerate_homs(pres, H, caps)
    report.add("rank", pres.rank)
    report.add("relators", ";".join(str(r) for r in pres.relators))
    report.add("target", H.name)
    report.add("count", len(homs))
    for i, tup in enumerate(homs[:args.show]):
        report.add(f"hom.{i}", " | ".join(H.fmt(x) for x in tup))
    return 0


def run_conjugator(args, caps: Caps, report: Report) -> int:
    conj = solve_conjugation(args.target, args.p, args.s, args.k)
    lhs = conj.A * conj.B * conj.A.inverse()
    rhs = conj.B ** conj.power
    report.add("target", args.target)
    report.add("p", args.p)
    report.add("s", args.s)
    if args.k is not None:
        report.add("k", args.k)
    report.add("n", conj.n)
    report.add("power", conj.power)
    _add_matrix(report, "A", conj.A)
    _add_matrix(report, "B", conj.B)
    report.add("relation-verified", lhs == rhs)
    report.add("order-A", conj.A.order())
    return 0 if lhs == rhs else 1


def run_family(args, caps: Caps, report: Report) -> int:
    fam = famgroups.parse_family(args.desc, caps)
    G = fam.group
    report.add("descriptor", fam.descriptor)
    report.add("order", G.order)
    report.add("exponent", G.exponent())
    report.add("abelian", G.is_abelian())
    report.add("generators", len(G.gens))
    report.add("multiplier", fam.multiplier())
    return 0


def run_separate(args, caps: Caps, report: Report) -> int:
    fam = famgroups.parse_family(args.family, caps)
    u = parse_element(fam, args.element)
    report.add("family", fam.descriptor)
    report.add("element", args.element)
    try:
        rep = famgroups.separating_rep(fam, u, caps)
    except NoWitness:
        report.add("verdict", "no-witness")
        return 1
    report.add("verdict", "separated")
    report.add("case", rep.case)
    if rep.coordinate is not None:
        report.add("coordinate", rep.coordinate + 1)
    report.add("n", rep.n)
    for gi, img in enumerate(rep.hom.gen_images):
        _add_matrix(report, f"rho.gen{gi + 1}", img)
    _add_matrix(report, "rho.element", rep.image_of_u)
    report.add("hom-verified", rep.hom.verify())
    return 0


def run_kernel_verify(args, caps: Caps, report: Report) -> int:
    fam = famgroups.parse_family(args.family, caps)
    params = _family_params(args.family)
    res = famgroups.verify_kernel_property(fam.kind, params, args.n, caps)
    report.add("family", res.descriptor)
    report.add("n", args.n)
    report.add("exponent", res.exponent)
    report.add("order", res.group_order)
    report.add("series-trivial", res.series_trivial)
    report.add("all-separated", res.all_separated)
    report.add("homs-used", res.homs_used)
    report.add("homs-verified", res.homs_verified)
    report.add("verdict", "kernel-property-holds" if res.ok else "kernel-property-fails")
    return 0 if res.ok else 1


def _family_params(text: str) -> dict:
    if text == "trivial":
        return {}
    _, rest = text.split(":", 1)
    params = {}
    for item in rest.split(","):
        key, value = item.split("=", 1)
        params[key] = value if key == "variant" else int(value)
    return params


def run_massey(args, caps: Caps, report: Report) -> int:
    G = parse_group(args.group, caps)
    alphas = parse_characters(args.alphas, G, args.p)
    if len(alphas) != args.n:
        raise UnipotentLabError(f"need {args.n} characters, got {len(alphas)}")
    verdict = massey.dwyer_search(G, alphas, args.n, caps)
    report.add("group", G.name)
    report.add("p", args.p)
    report.add("n", args.n)
    report.add("alphas", args.alphas)
    report.add("verdict", verdict.status)
    report.add("candidates", verdict.candidates)
    report.add("homs", verdict.homs_found)
    if verdict.bar_witness:
        for gi, bar in enumerate(verdict.bar_witness):
            report.add(f"witness.bar.gen{gi + 1}", bar.to_text())
    if verdict.lift_witness:
        for gi, mat in enumerate(verdict.lift_witness):
            _add_matrix(report, f"witness.lift.gen{gi + 1}", mat)
    return 0 if verdict.status != massey.UNDEFINED else 1


def run_cross_check(args, caps: Caps, report: Report) -> int:
    G = parse_group(args.group, caps)
    alphas = parse_characters(args.alphas, G, args.p)
    res = massey.cross_check(G, alphas, args.n, caps)
    report.add("group", G.name)
    report.add("p", args.p)
    report.add("n", args.n)
    report.add("alphas", args.alphas)
    report.add("dwyer-verdict", res.dwyer.status)
    report.add("cochain-verdict", res.cochain.status)
    report.add("homs", res.dwyer.homs_found)
    report.add("defining-systems", res.cochain.systems_found)
    report.add("counts-match", res.counts_match)
    report.add("bijection-valid", res.bijection_valid)
    report.add("verdict", "agree" if res.ok else "disagree")
    return 0 if res.ok else 1


def run_embed(args, caps: Caps, report: Report) -> int:
    res = famgroups.minimal_embedding(args.group, args.p, caps)
    report.add("group", args.group)
    report.add("p", args.p)
    report.add("n", res.n)
    report.add("order", res.group_order)
    report.add("injective", res.injective)
    report.add("hom-verified", res.verified)
    report.add("exponent-below", res.exponent_below)
    report.add("scanned-below", res.scanned_below)
    report.add("verdict", "minimal-embedding" if res.ok else "failed")
    return 0 if res.ok else 1


def run_appendix(args, caps: Caps, report: Report) -> int:
    targets = [(t, parse_group(t, caps)) for t in args.target]
    inst = appendixlab.build_instance(args.p, args.N, targets, caps)
    res = appendixlab.violates_kernel_property(inst, args.n, caps)
    report.add("p", args.p)
    report.add("N", args.N)
    report.add("n", args.n)
    report.add("targets", ";".join(res.target_labels))
    report.add("relators", len(inst.presentation.relators))
    report.add("pigeonhole-ok", res.pigeonhole_ok)
    if res.commutator_outside_g3 is not None:
        report.add("commutator-outside-g3", res.commutator_outside_g3)
        report.add("commutator-in-kernel-filtration",
                   res.commutator_in_kernel_filtration)
    report.add("witness", str(inst.commutator_word))
    if args.count_homs and res.pigeonhole_ok:
        try:
            for label, count in appendixlab.hom_counts(inst, caps).items():
                report.add(f"homs.{label}", count)
        except TooLarge:
            report.add("homs", "skipped-budget")
    if res.status == appendixlab.VIOLATED:
        report.add("verdict", f"kernel {args.n}-unipotent property FAILS")
        return 0
    report.add("verdict", res.status)
    return 1


def run_compare(args, caps: Caps, report: Report) -> int:
    G = parse_group(args.group, caps)
    res = compare_filtrations(G, args.p, args.max_level)
    report.add("group", G.name)
    report.add("order", G.order)
    report.add("p", args.p)
    report.add("max-level", args.max_level)
    report.add("pcentral-orders", ",".join(str(o) for o in res.pcentral_orders))
    report.add("zassenhaus-orders", ",".join(str(o) for o in res.zassenhaus_orders))
    report.add("pcentral-in-zassenhaus",
               ",".join("true" if b else "false" for b in res.pcentral_in_zassenhaus))
    report.add("zassenhaus-p-plus-1-in-pcentral-3",
               res.zassenhaus_p_plus_1_in_pcentral_3)
    if res.level3_equal is not None:
        report.add("level3-equal", res.level3_equal)
    report.add("verdict", "inclusions-hold" if res.ok else "inclusion-failed")
    if args.figures:
        os.makedirs(args.figures, exist_ok=True)
        stem = slug(f"compare-{args.group}-p{args.p}")
        csv_path = os.path.join(args.figures, stem + ".csv")
        png_path = os.path.join(args.figures, stem + ".png")
        write_csv(csv_path,
                  ["level", "pcentral_order", "zassenhaus_order", "included"],
                  [[i + 1, pc, za, str(inc).lower()]
                   for i, (pc, za, inc) in enumerate(
                       zip(res.pcentral_orders, res.zassenhaus_orders,
                           res.pcentral_in_zassenhaus))])
        from .plots import render_compare_figure
        render_compare_figure(png_path, f"{G.name}", args.p,
                              list(res.pcentral_orders),
                              list(res.zassenhaus_orders))
        report.add("table", csv_path)
        report.add("figure", png_path)
    return 0 if res.ok else 1


_RUNNERS = {
    "magnus": run_magnus,
    "filtration": run_filtration,
    "witness": run_witness,
    "series": run_series,
    "homs": run_homs,
    "conjugator": run_conjugator,
    "family": run_family,
    "separate": run_separate,
    "kernel-verify": run_kernel_verify,
    "massey": run_massey,
    "cross-check": run_cross_check,
    "embed": run_embed,
    "appendix": run_appendix,
    "compare": run_compare,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    report = Report(argv)
    start = time.monotonic()
    try:
        caps = load_caps(args.config)
        code = _RUNNERS[args.verb](args, caps, report)
    except TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except UnipotentLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.timings:
        report.add("elapsed-ms", int((time.monotonic() - start) * 1000))
    sys.stdout.write(report.render(args.format))
    return code


if __name__ == "__main__":
    raise SystemExit(main())
