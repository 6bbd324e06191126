"""Regenerate the bundled corpus under src/coincide/corpus.

Run from the repository root: ``python3 scripts/generate_corpus.py``.
Product complexes are triangulated by the package itself; everything else
is written out literally below.
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from coincide.formats import ComplexFile, MapFile, ProblemFile, emit_complex, emit_map, emit_problem  # noqa: E402
from coincide.simplicial import SimplicialComplex, SimplicialMap, simplicial_product  # noqa: E402

OUT = ROOT / "src" / "coincide" / "corpus"


def cycle(names):
    return [(names[i], names[(i + 1) % len(names)]) for i in range(len(names))]


def complexes() -> dict[str, ComplexFile]:
    cx = {}

    def add(name, verts, tops, subs=None, orient=None):
        k = SimplicialComplex(verts, tops)
        cx[name] = ComplexFile(name, k, {"boundary": "auto-boundary"} if subs is None else subs, orient)

    add("circle3", list("abc"), cycle(list("abc")))
    hexv = [f"v{i}" for i in range(6)]
    add("circle6", hexv, cycle(hexv))
    add("sphere-bipyramid", ["n", "s", "a", "b", "c"],
        [(p, x, y) for p in "ns" for x, y in (("a", "b"), ("b", "c"), ("a", "c"))])
    add("tetra-sphere", ["0", "1", "2", "3"],
        [("0", "1", "2"), ("0", "1", "3"), ("0", "2", "3"), ("1", "2", "3")])
    add("disk1", list("abc"), [("a", "b", "c")])
    rim = ["r0", "r1", "r2"]
    add("disk-cone", ["c"] + rim, [("c", rim[k], rim[(k + 1) % 3]) for k in range(3)])
    inner, outer = ["i0", "i1", "i2"], ["u0", "u1", "u2"]
    annulus = []
    for k in range(3):
        k1 = (k + 1) % 3
        annulus += [(inner[k], inner[k1], outer[k]), (inner[k1], outer[k], outer[k1])]
    add("disk-two-ring", ["o"] + inner + outer,
        [("o", inner[k], inner[(k + 1) % 3]) for k in range(3)] + annulus,
        {"boundary": "auto-boundary", "annulus": annulus})
    tor = [f"t{i}{j}" for i in range(3) for j in range(3)]
    tris = []
    for i in range(3):
        for j in range(3):
            a, b = f"t{i}{j}", f"t{(i + 1) % 3}{j}"
            c, d = f"t{(i + 1) % 3}{(j + 1) % 3}", f"t{i}{(j + 1) % 3}"
            tris += [(a, b, c), (a, d, c)]
    add("torus9", tor, tris)
    mob = [f"m{i}" for i in range(5)]
    add("mobius5", mob, [(mob[i], mob[(i + 1) % 5], mob[(i + 2) % 5]) for i in range(5)])
    add("interval", ["p0", "m", "p1"], [("p0", "m"), ("m", "p1")])
    add("figure-eight", ["x", "a1", "a2", "b1", "b2"], cycle(["x", "a1", "a2"]) + cycle(["x", "b1", "b2"]),
        {})

    prod = simplicial_product(cx["interval"].complex, cx["figure-eight"].complex)
    ends = [tuple(f"{p}:{v}" for v in s) for p in ("p0", "p1") for s in cx["figure-eight"].complex.maximal_simplices()]
    cx["interval-x-figure-eight"] = ComplexFile("interval-x-figure-eight", prod, {"ends": ends})
    prod2 = simplicial_product(cx["disk-cone"].complex, cx["circle3"].complex)
    rim_circle = simplicial_product(SimplicialComplex(rim, cycle(rim)), cx["circle3"].complex)
    cx["disk-cone-x-circle3"] = ComplexFile(
        "disk-cone-x-circle3", prod2, {"rim-x-circle": list(rim_circle.maximal_simplices())}
    )
    return cx


def maps(cx) -> dict[str, MapFile]:
    mp = {}

    def add(name, src, tgt, table):
        s, t = cx[src], cx[tgt]
        if not isinstance(table, dict):
            table = {v: table(v) for v in s.complex.vertices}
        mp[name] = MapFile(name, s, t, SimplicialMap(s.complex, t.complex, table), src, tgt)

    for name in ("circle3", "sphere-bipyramid", "tetra-sphere", "torus9", "disk-cone"):
        add(f"{name}-id", name, name, lambda v: v)
    hexv = [f"v{i}" for i in range(6)]
    w = "abc"
    add("hex-deg2", "circle6", "circle3", {hexv[i]: w[i % 3] for i in range(6)})
    add("hex-deg1", "circle6", "circle3", {hexv[i]: w[i // 2] for i in range(6)})
    add("hex-deg0", "circle6", "circle3", {v: "a" for v in hexv})
    add("hex-degm2", "circle6", "circle3", {hexv[i]: w[(-i) % 3] for i in range(6)})
    add("torus-proj", "torus9", "circle3", lambda v: w[int(v[1])])
    add("torus-const", "torus9", "circle3", lambda v: "a")
    add("mobius-fold", "mobius5", "disk-cone", lambda v: "r0" if v in ("m0", "m1", "m2") else "r1")
    add("mobius-center", "mobius5", "disk-cone", lambda v: "c")
    add("figure-eight-proj", "interval-x-figure-eight", "interval", lambda v: v.split(":")[0])
    add("figure-eight-mid", "interval-x-figure-eight", "interval", lambda v: "m")
    add("disk-circle-proj", "disk-cone-x-circle3", "disk-cone", lambda v: v.split(":")[0])
    add("disk-circle-center", "disk-cone-x-circle3", "disk-cone", lambda v: "c")
    add("two-ring-collapse", "disk-two-ring", "disk-cone",
        lambda v: "c" if v == "o" else "r" + v[1])
    add("two-ring-center", "disk-two-ring", "disk-cone", lambda v: "c")
    return mp


def problems() -> list[ProblemFile]:
    out = []

    def add(name, mode, blocks=None, **fields):
        fl = {"mode": [mode]}
        for k, v in fields.items():
            fl[k.replace("_", "-")] = v.split()
        out.append(ProblemFile(name, mode, fl, None, blocks or {}))

    for name, cxn, waive in (("sphere-identity", "sphere-bipyramid", "no"),
                             ("tetra-identity", "tetra-sphere", "no"),
                             ("torus-identity", "torus9", "no"),
                             ("circle-identity", "circle3", "no"),
                             ("disk-identity", "disk-cone", "yes")):
        add(name, "case1", domain=cxn, domain_sub="boundary", target=cxn, f=f"{cxn}-id", g=f"{cxn}-id",
            mu="auto", assume_disjoint=waive)
    for df, dg in (("2", "0"), ("1", "m2"), ("0", "2")):
        add(f"circle-deg-{df}-{dg}", "case1", domain="circle6", domain_sub="boundary", target="circle3",
            f=f"hex-deg{df}", g=f"hex-deg{dg}", mu="auto", assume_disjoint="no")
    add("torus-proj-const", "general", domain="torus9", domain_sub="boundary", target="circle3",
        f="torus-proj", g="torus-const", mu="lift", assume_disjoint="no")
    add("mobius-fold", "general", domain="mobius5", domain_sub="boundary", target="disk-cone",
        f="mobius-fold", g="mobius-center", mu="zero", assume_disjoint="no")
    add("figure-eight-proj", "general", domain="interval-x-figure-eight", domain_sub="ends", target="interval",
        f="figure-eight-proj", g="figure-eight-mid", mu="lift", assume_disjoint="no")
    add("spherical-surrogate", "general", domain="disk-cone-x-circle3", domain_sub="rim-x-circle",
        target="disk-cone", f="disk-circle-proj", g="disk-circle-center", mu="lift", assume_disjoint="no")
    add("disk-two-ring-collapse", "general", domain="disk-two-ring", domain_sub="annulus", target="disk-cone",
        f="two-ring-collapse", g="two-ring-center", mu="lift", assume_disjoint="no")
    add("spherical-multivalued", "multivalued", domain="disk-cone-x-circle3", target="disk-cone",
        f="disk-circle-proj", g="disk-circle-center", assume_disjoint="no")
    add("sphere-diagonal-multivalued", "multivalued", domain="sphere-bipyramid", target="sphere-bipyramid",
        f="sphere-bipyramid-id", g="sphere-bipyramid-id", assume_disjoint="no")
    add("hopf-abstract", "abstract", {"fstar": {0: "1"}, "gstar": {0: "1"}},
        n="2", dims_x="1 0 0 1", dims_s="1 0 1", dims_rel="0")
    add("abstract-identity", "abstract", {"fstar": {0: "1", 2: "1"}, "gstar": {0: "1", 2: "1"}},
        n="2", dims_x="1 0 1", dims_s="1 0 1", dims_rel="1", fstar_rel="1")
    add("abstract-zero-g", "abstract", {"fstar": {0: "1", 2: "1"}, "gstar": {0: "1", 2: "0"}},
        n="2", dims_x="1 0 1", dims_s="1 0 1", dims_rel="1", fstar_rel="1")
    add("abstract-supplied-phi", "abstract",
        {"fstar": {0: "1", 1: "1 0"}, "gstar": {0: "1", 1: "2 0"}, "phi": {0: "1", 1: "2"}},
        n="1", dims_x="1 2", dims_s="1 1", dims_rel="1", fstar_rel="1")
    return out


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    for old in OUT.glob("*"):
        if old.suffix in (".cx", ".map", ".prob"):
            old.unlink()
    cx = complexes()
    for name, c in cx.items():
        (OUT / f"{name}.cx").write_text(emit_complex(c), encoding="utf-8")
    for name, m in maps(cx).items():
        (OUT / f"{name}.map").write_text(emit_map(m), encoding="utf-8")
    for p in problems():
        (OUT / f"{p.name}.prob").write_text(emit_problem(p), encoding="utf-8")


if __name__ == "__main__":
    main()
