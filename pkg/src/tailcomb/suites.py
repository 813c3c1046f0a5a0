"""Property suites: the in-scope theorems run as falsifiable checks.

Every suite maps a graph (plus a per-instance generator for sampled checks)
to a count of executed checks and a list of violations; the runner feeds a
deterministic stream of random graphs and wraps each violation in a
self-contained reproducer.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations, combinations_with_replacement

from . import blowup as bw
from . import degrees as dg
from .errors import InvariantViolation, PreconditionError
from .graph import CurveGraph, node_on, relate, validate
from .lift import eq34_level2, is_synchronized, one_tail_diagnostic
from .randgen import child_rng, instance_graph
from .tails import joining_nodes_mask, nested, symm_diff, tail_family


def _sub(G, mask):
    return list(G.names_of(mask))


# -- individual suites -------------------------------------------------------


def suite_closure(G: CurveGraph, rng, profile):
    """Wedge closure of 2-tails and of level-2-free 3-tails, the terminal
    support lemmas, and the three elementary pair facts."""
    checks = 0
    bad = []
    marked_bit = 1 << G.marked
    two = [z for z in G.k_tails(2) if not z & marked_bit]
    for a in range(len(two)):
        for b in range(a, len(two)):
            z, zp = two[a], two[b]
            w = z & zp
            if not w:
                continue
            checks += 1
            if not (G.is_tail(w) and G.k(w) == 2):
                bad.append({"check": "lemma-2.2", "z": _sub(G, z), "zp": _sub(G, zp)})
    for g1, g2 in combinations_with_replacement(range(G.p), 2):
        anchors = (1 << g1) | (1 << g2)
        if anchors & marked_bit:
            continue
        fam2 = nested(G, 2, anchors).members
        blocked = 0
        for w in fam2:
            blocked |= G.term_mask(w)
        cands3 = [
            z
            for z in G.k_tails(3)
            if z & anchors == anchors
            and not z & marked_bit
            and not G.term_mask(z) & blocked
        ]
        for a in range(len(cands3)):
            for b in range(a, len(cands3)):
                z, zp = cands3[a], cands3[b]
                w = z & zp
                checks += 1
                if not (
                    G.is_tail(w) and G.k(w) == 3 and not G.term_mask(w) & blocked
                ):
                    bad.append(
                        {"check": "lemma-2.3", "anchors": _sub(G, anchors),
                         "z": _sub(G, z), "zp": _sub(G, zp)}
                    )
        fam3 = nested(G, 3, anchors).members
        for z in G.k_tails(2):
            if z & anchors != anchors or z & marked_bit:
                continue
            checks += 1
            tz = G.term_mask(z)
            if not any(w & z == w and G.term_mask(w) & tz for w in fam2):
                bad.append(
                    {"check": "lemma-2.5", "anchors": _sub(G, anchors), "z": _sub(G, z)}
                )
        for z in G.k_tails(3):
            if z & anchors != anchors or z & marked_bit:
                continue
            checks += 1
            tz = G.term_mask(z)
            ok = any(G.term_mask(w) & tz for w in fam2) or any(
                G.term_mask(w) & tz and w & z == w for w in fam3
            )
            if not ok:
                bad.append(
                    {"check": "lemma-2.6", "anchors": _sub(G, anchors), "z": _sub(G, z)}
                )
    tails = G.tails()
    full = G.full_mask
    for z in tails:
        kz = G.k(z)
        tz = G.term_mask(z)
        tz_nodes = [t for t, nd in enumerate(G.nodes) if (tz >> t) & 1]
        for zp in tails:
            checks += 1
            rel = relate(G, z, zp)
            if all(node_on(G, zp, t) for t in tz_nodes):
                if not (z & zp == z or (full ^ z) & zp == (full ^ z)):
                    bad.append(
                        {"check": "lemma-2.7-i", "z": _sub(G, z), "zp": _sub(G, zp)}
                    )
            if (tz & G.term_mask(zp)).bit_count() == kz - 1:
                if not rel.perfect:
                    bad.append(
                        {"check": "lemma-2.7-ii", "z": _sub(G, z), "zp": _sub(G, zp)}
                    )
            if kz >= 2 and G.k(zp) == 1 and not rel.free:
                bad.append(
                    {"check": "lemma-2.7-iii", "z": _sub(G, z), "zp": _sub(G, zp)}
                )
    return checks, bad


def _ijk_triples(G):
    for i in range(G.p):
        for j in range(i + 1, G.p):
            if not joining_nodes_mask(G, i, j):
                continue
            for k in range(G.p):
                yield i, j, k


def suite_prop31(G: CurveGraph, rng, profile):
    """Symmetric-difference structure: the boundary-count bound, the total
    order with terminal links, the condition trichotomy, containment across
    the two families, the difference-node locations and the interior
    terminal-support inclusions."""
    checks = 0
    bad = []
    for i, j, k in _ijk_triples(G):
        ijm = joining_nodes_mask(G, i, j)
        union = set(tail_family(G, i, k)) | set(tail_family(G, j, k))
        checks += 1
        hits = sum(1 for w in union if G.term_mask(w) & ijm)
        if hits > 1:
            bad.append({"check": "eq-14", "i": G.names[i], "j": G.names[j],
                        "k": G.names[k], "count": hits})
        reports = {}
        for s in (1, 2, 3):
            checks += 1
            try:
                reports[s] = symm_diff(G, s, i, j, k)
            except InvariantViolation as exc:
                bad.append({"check": f"prop-3.1-s{s}", "i": G.names[i],
                            "j": G.names[j], "k": G.names[k], "error": str(exc)})
                reports[s] = None
            if s == 1:
                # Containment across the level-1 families holds between the
                # adjacent pair's own families; tails anchored at the third
                # component k need not nest against them.
                fa = set(nested(G, 1, 1 << i).members)
                fb = set(nested(G, 1, 1 << j).members)
            else:
                fa = set(nested(G, s, (1 << i) | (1 << k)).members)
                fb = set(nested(G, s, (1 << j) | (1 << k)).members)
            checks += 1
            for w in fa:
                for wp in fb:
                    if not (w & wp == w or w & wp == wp):
                        bad.append({"check": "remark-3.2", "s": s,
                                    "w": _sub(G, w), "wp": _sub(G, wp)})
        r2, r3 = reports.get(2), reports.get(3)
        if any(reports.get(s) and reports[s].family for s in (2, 3)):
            checks += 1
            if reports.get(1) and reports[1].family:
                bad.append({"check": "prop-3.1-last", "i": G.names[i],
                            "j": G.names[j], "k": G.names[k]})
        if r2 and r2.family:
            fam = r2.family
            s1, s2 = r2.difference_nodes
            checks += 1
            if not (ijm >> s1) & 1:
                bad.append({"check": "eq-16-s1", "i": G.names[i], "j": G.names[j],
                            "k": G.names[k], "s1": G.nodes[s1].id})
            if r3 and r3.family:
                checks += 1
                if not (G.term_mask(r3.family[0]) >> s2) & 1:
                    bad.append({"check": "eq-16-s2", "i": G.names[i],
                                "j": G.names[j], "k": G.names[k],
                                "s2": G.nodes[s2].id})
            ui = 0
            for w in nested(G, 2, (1 << i) | (1 << k)).members:
                ui |= G.term_mask(w)
            uj = 0
            for w in nested(G, 2, (1 << j) | (1 << k)).members:
                uj |= G.term_mask(w)
            both = ui & uj
            checks += 1
            for w in fam[1:-1]:
                if G.term_mask(w) & ~both:
                    bad.append({"check": "eq-17-interior", "w": _sub(G, w)})
            ends = (G.term_mask(fam[0]) | G.term_mask(fam[-1])) & ~both
            if ends != (1 << s1) | (1 << s2):
                bad.append({"check": "eq-17-ends", "i": G.names[i],
                            "j": G.names[j], "k": G.names[k],
                            "failing": list(G.node_ids(ends)),
                            "difference_nodes": [G.nodes[s1].id, G.nodes[s2].id]})
    return checks, bad


def suite_oracle(G: CurveGraph, rng, profile):
    """Twister coefficients against the brute-force quasistable twist."""
    checks = 0
    bad = []
    table = dg.twister(G).alpha
    for g1, g2 in combinations_with_replacement(range(G.p), 2):
        alpha = table[(g1, g2)]
        checks += 1
        try:
            c, d = dg.quasistable_representative(
                G, dg.abel_multidegree(G, g1, g2), bound=max(alpha) + 2
            )
        except (InvariantViolation, PreconditionError, ValueError) as exc:
            bad.append({"check": "thm-2.4", "pair": [G.names[g1], G.names[g2]],
                        "error": str(exc)})
            continue
        if c != alpha:
            bad.append({"check": "thm-2.4", "pair": [G.names[g1], G.names[g2]],
                        "alpha": list(alpha), "oracle": list(c)})
    return checks, bad


def suite_lemma35(G: CurveGraph, rng, profile):
    checks = 0
    bad = []
    for i, j, k in _ijk_triples(G):
        for a, b in ((i, j), (j, i)):
            checks += 1
            try:
                dg.lemma35_difference(G, a, b, k)
            except InvariantViolation as exc:
                bad.append({"check": "lemma-3.5", "i": G.names[a], "j": G.names[b],
                            "k": G.names[k], "error": str(exc)})
    return checks, bad


def suite_admissibility(G: CurveGraph, rng, profile):
    """Every gated inequality instance, at every node pair and under both
    matchings (any good refinement realizes either one), plus the diagonal
    instances."""
    checks = 0
    bad = []
    red = G.reducible_nodes()
    for r in red:
        rep = bw.admissibility_check(G, r, r)
        checks += len(rep.instances)
        for inst in rep.failures():
            bad.append({"check": f"ineq-{inst.ineq}", "pair": [G.nodes[r].id],
                        "args": list(inst.args), "value": inst.value})
    for r1, r2 in combinations(red, 2):
        for ch in bw.pair_matchings(G, r1, r2):
            rep = bw.admissibility_check(G, r1, r2, ch)
            checks += len(rep.instances)
            for inst in rep.failures():
                bad.append({
                    "check": f"ineq-{inst.ineq}",
                    "pair": [G.nodes[r1].id, G.nodes[r2].id],
                    "matching": [[G.names[x], G.names[y]]
                                 for x, y in ch.matched_pairs()],
                    "args": list(inst.args),
                    "value": inst.value,
                })
    return checks, bad


def _all_points(G):
    for r1, r2 in combinations(G.reducible_nodes(), 2):
        for ch in bw.pair_matchings(G, r1, r2):
            yield ch, bw.distinguished_points(G, ch)


def suite_lemma61(G: CurveGraph, rng, profile):
    checks = 0
    bad = []
    for ch, pts in _all_points(G):
        for pt in pts:
            checks += 1
            diag = one_tail_diagnostic(G, pt)
            if not diag.ok:
                bad.append({"check": "lemma-6.1", "point": pt.describe(G),
                            "detail": [list(d) for d in diag.detail]})
    return checks, bad


def suite_prop62(G: CurveGraph, rng, profile):
    """Quasistable implies synchronized, and the level-2 node-counting
    identity on every synchronized point."""
    checks = 0
    bad = []
    for ch, pts in _all_points(G):
        for pt in pts:
            checks += 1
            qs = bw.is_quasistable_point(G, pt, profile)
            sync = is_synchronized(G, pt)
            if qs.ok and not sync.synchronized:
                bad.append({"check": "prop-6.2", "point": pt.describe(G),
                            "sync": sync.describe(G)})
            if sync.synchronized:
                viol = eq34_level2(G, pt)
                checks += 1
                if viol:
                    bad.append({"check": "eq-34", "point": pt.describe(G),
                                "violations": [list(v) for v in viol]})
    return checks, bad


def suite_thm63(G: CurveGraph, rng, profile):
    checks = 0
    bad = []
    for ch, pts in _all_points(G):
        checks += 1
        qs_both = all(bw.is_quasistable_point(G, pt, profile).ok for pt in pts)
        sync_both = all(is_synchronized(G, pt).synchronized for pt in pts)
        if qs_both != sync_both:
            bad.append({
                "check": "thm-6.3",
                "pair": [G.nodes[ch.r1].id, G.nodes[ch.r2].id],
                "matching": [[G.names[x], G.names[y]]
                             for x, y in ch.matched_pairs()],
                "quasistable": qs_both,
                "synchronized": sync_both,
            })
    return checks, bad


def suite_thm64(G: CurveGraph, rng, profile):
    checks = 1
    bad = []
    plan = bw.plan_from_tails(G)
    report = bw.decide_resolution(G, plan, profile)
    if not report.resolved:
        bad.append({
            "check": "thm-6.4",
            "profile": profile,
            "failing_pairs": [
                [G.nodes[p.r1].id, G.nodes[p.r2].id]
                for p in report.failing_pairs()
            ],
        })
    return checks, bad


def suite_qs_uniqueness(G: CurveGraph, rng, profile, samples: int = 6):
    """At most one quasistable multidegree per twist class inside the box.

    Degree-0 multidegrees with entries in [-3, 3] are sampled per instance
    (graphs with more than five components are skipped, matching the scale
    at which the full box scan stays exhaustive)."""
    if G.p > 5:
        return 0, []
    checks = 0
    bad = []
    for _ in range(samples):
        d0 = [rng.randint(-3, 3) for _ in range(G.p - 1)]
        last = -sum(d0)
        if not -3 <= last <= 3:
            continue
        d0 = tuple(d0 + [last])
        checks += 1
        try:
            dg.quasistable_representative(G, d0, bound=3)
        except dg.RepresentativeNotFound:
            pass  # absence within the box is not a uniqueness failure
        except InvariantViolation as exc:
            bad.append({"check": "qs-uniqueness", "d0": list(d0),
                        "error": str(exc)})
    return checks, bad


SUITES = {
    "closure-22/23": suite_closure,
    "prop-31": suite_prop31,
    "thm-24-oracle": suite_oracle,
    "lemma-35": suite_lemma35,
    "thm-36-admissibility": suite_admissibility,
    "lemma-61": suite_lemma61,
    "prop-62": suite_prop62,
    "thm-63-pairwise": suite_thm63,
    "thm-64-resolution": suite_thm64,
    "qs-uniqueness": suite_qs_uniqueness,
}

ALL_SUITES = tuple(SUITES)


# -- runner ------------------------------------------------------------------


@dataclass
class SuiteConfig:
    seed: int = 1
    instances: int = 50
    max_components: int = 6
    max_extra_edges: int = 4
    allow_loops: bool = True
    profile: str = bw.RECONSTRUCTED
    suites: tuple[str, ...] = ALL_SUITES
    jobs: int = 1

    def __post_init__(self):
        bad = [s for s in self.suites if s not in SUITES]
        if bad:
            raise PreconditionError(f"unknown suites: {bad}")
        if self.profile not in bw.PROFILES:
            raise PreconditionError(f"unknown profile {self.profile!r}")
        if self.instances < 0 or self.max_components < 1 or self.jobs < 1:
            raise PreconditionError("instances, max_components, jobs out of range")
        self.suites = tuple(self.suites)


@dataclass
class VerificationReport:
    config: SuiteConfig
    checks: dict = field(default_factory=dict)
    violations: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def ok(self) -> bool:
        return not any(self.violations[s] for s in self.config.suites)

    def to_dict(self, include_timing: bool = True) -> dict:
        out = {
            "config": asdict(self.config),
            "suites": {
                s: {"checks": self.checks[s], "violations": self.violations[s]}
                for s in self.config.suites
            },
            "ok": self.ok,
        }
        if include_timing:
            out["wall_time_s"] = round(self.wall_time, 3)
        return out

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), sort_keys=True, indent=2)


def _run_instance(args):
    cfg_dict, index = args
    cfg = SuiteConfig(**cfg_dict)
    G = instance_graph(
        cfg.seed, index, cfg.max_components, cfg.max_extra_edges, cfg.allow_loops
    )
    out = {}
    for name in cfg.suites:
        rng = child_rng(cfg.seed, f"{index}:{name}")
        try:
            checks, bad = SUITES[name](G, rng, cfg.profile)
        except InvariantViolation as exc:
            checks, bad = 1, [{"check": name, "error": str(exc),
                               "witnesses": _jsonable(exc.witnesses)}]
        wrapped = [
            {
                "suite": name,
                "instance": index,
                "seed": cfg.seed,
                "profile": cfg.profile,
                "graph": G.to_spec(),
                "context": b,
            }
            for b in bad
        ]
        out[name] = (checks, wrapped)
    return index, out


def _jsonable(obj):
    try:
        json.dumps(obj)
        return obj
    except TypeError:
        return repr(obj)


def run_suite(config: SuiteConfig) -> VerificationReport:
    """Run the selected suites over the seeded instance stream."""
    start = time.monotonic()
    report = VerificationReport(config)
    for s in config.suites:
        report.checks[s] = 0
        report.violations[s] = []
    cfg_dict = asdict(config)
    work = [(cfg_dict, i) for i in range(config.instances)]
    if config.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = sorted(pool.map(_run_instance, work), key=lambda r: r[0])
    else:
        results = [_run_instance(w) for w in work]
    for _, per_suite in results:
        for name, (checks, bad) in per_suite.items():
            report.checks[name] += checks
            report.violations[name].extend(bad)
    report.wall_time = time.monotonic() - start
    return report


def replay(dump: dict) -> VerificationReport:
    """Re-run the suite of a violation dump on its embedded graph."""
    name = dump["suite"]
    if name not in SUITES:
        raise PreconditionError(f"dump references unknown suite {name!r}")
    G = validate(dump["graph"])
    profile = dump.get("profile", bw.RECONSTRUCTED)
    cfg = SuiteConfig(
        seed=dump.get("seed", 1), instances=1, profile=profile, suites=(name,)
    )
    report = VerificationReport(cfg)
    rng = child_rng(cfg.seed, f"{dump.get('instance', 0)}:{name}")
    start = time.monotonic()
    try:
        checks, bad = SUITES[name](G, rng, profile)
    except InvariantViolation as exc:
        checks, bad = 1, [{"check": name, "error": str(exc),
                           "witnesses": _jsonable(exc.witnesses)}]
    report.checks[name] = checks
    report.violations[name] = [
        {"suite": name, "instance": dump.get("instance", 0), "seed": cfg.seed,
         "profile": profile, "graph": G.to_spec(), "context": b}
        for b in bad
    ]
    report.wall_time = time.monotonic() - start
    return report
