"""Acceptance criteria 1-12, one PASS/FAIL line each, with wall-clock limits."""

import json
import random
from itertools import permutations
import subprocess
import sys
import time
from pathlib import Path

import pytest

import conftest
from steinlab import intmat
from steinlab.arith import RingDesc, RingElem, class_group, class_number, ideal_from_generators
from steinlab.buildings import XBuilding, tits_building_field
from steinlab.lattices import free_module
from steinlab.partial_bases import PBSpec, certify_I_simplex, component_count, unit_spec, verify_certificate
from steinlab.steinberg import folded_frame_suite, folded_image_span, integral_image_span, phi_span_rank
from steinlab.steinberg import steinberg_coinvariants
from steinlab.perms import check_involution, classify_perm, good_perms
from steinlab.topo import reduced_homology, simplex_boundary_complex, sparse_invariant_factors
from oracles import reduced_form_count, solomon_tits_rank

ROOT = Path(__file__).resolve().parent.parent
Z = RingDesc.parse("Z")
R5 = RingDesc.parse("Q(sqrt(-5))")
R23 = RingDesc.parse("Q(sqrt(-23))")


def record(number, title, ok, elapsed, limit, detail):
    within = elapsed <= limit
    status = "PASS" if ok and within else "FAIL"
    line = f"{status} criterion {number:>2} {title}: {detail} ({elapsed:.1f}s, limit {limit}s)"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, detail
    assert within, f"took {elapsed:.1f}s, limit {limit}s"


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_01_solomon_tits_ranks():
    values, ok, slowest = [], True, 0.0
    for q, n in [(2, 2), (3, 2), (2, 3), (3, 3)]:
        with Timer() as t:
            h = reduced_homology(tits_building_field(q, n).order_complex())
        slowest = max(slowest, t.elapsed)
        values.append(h[n - 2])
        ok &= h.nonzero() == {n - 2: solomon_tits_rank(q, n)}
    record(1, "Solomon-Tits ranks", ok and values == [2, 3, 8, 27], slowest, 60, f"betti = {values}")


def test_02_phi_surjectivity():
    with Timer() as t:
        out = phi_span_rank(2, 3)
    ok = out["span_rank"] == out["steinberg_rank"] == 8 and out["factorization_mismatches"] == 0
    record(2, "phi spans St_3(F_2)", ok, t.elapsed, 120, f"span rank {out['span_rank']} over {out['bases']} bases")


def test_03_x_building_ranks():
    results = {}
    with Timer() as t:
        for m in (1, 2, 3):
            for size in (1, 2, 3, 4):
                results[(m, size)] = reduced_homology(XBuilding(m, range(size)).order_complex())[m - 1]
    ok = all(v == (size - 1) ** m for (m, size), v in results.items())
    record(3, "X-building ranks", ok, t.elapsed, 30, f"{len(results)} cases equal (|T|-1)^m")


def test_04_explicit_counterexamples():
    five = ideal_from_generators(Z, [RingElem(Z, 5)])
    certificate = [(0, 2, 5), (3, 1, 0), (-1, 0, 1)]
    with Timer() as t:
        vertex2 = certify_I_simplex([(2, 5)], PBSpec(Z, 2, five, 5))
        spec3 = PBSpec(Z, 3, five, 5)
        vertex3 = certify_I_simplex([(0, 2, 5)], spec3, hints=[certificate])
        searched = certify_I_simplex([(0, 2, 5)], spec3)
        edge = certify_I_simplex([(0, 2, 5), (1, 2, 5)], spec3)
    ok = vertex2.status == "no" and "{2, 3}" in vertex2.reason
    ok &= vertex3.status == "yes" and vertex3.certificate == certificate
    ok &= verify_certificate(certificate, [(0, 2, 5)], spec3)
    ok &= searched.status == "yes" and verify_certificate(searched.certificate, [(0, 2, 5)], spec3)
    ok &= edge.status == "no"
    record(4, "explicit counterexamples", ok, t.elapsed, 5, f"(2,5): {vertex2.reason}; edge: {edge.status}")


def test_05_folded_frames():
    cg = class_group(R5)
    summary, ok, slowest = [], True, 0.0
    for n in (2, 3):
        with Timer() as t:
            certs = folded_frame_suite(free_module(R5, n), cg, seed=0)
        slowest = max(slowest, t.elapsed)
        for c in certs:
            ok &= c.ok and c.image == c.target and not c.bad_image
        ok &= len(certs) == 2 ** (n - 1)
        summary.append(f"n={n}: {len(certs)} apartments")
    record(5, "folded frames over Z[sqrt(-5)]", ok, slowest, 600, ", ".join(summary) + ", all claims PASS")


def test_06_non_integrality():
    with Timer() as t:
        out = integral_image_span(free_module(R5, 2), 2, class_group(R5))
        folded = folded_image_span(free_module(R5, 2), class_group(R5), seed=0)
    ok = out["integral_frames"] > 0 and out["span_rank"] == 0 and folded["span_rank"] == out["target_rank"] == 1
    detail = f"{out['integral_frames']} integral frames span rank {out['span_rank']}; folded span {folded['span_rank']}"
    record(6, "integral classes miss the quotient", ok, t.elapsed, 300, detail)


def test_07_non_vanishing_bound():
    ranks, ok = [], True
    with Timer() as t:
        for ring, n, expected in [(R5, 2, 1), (R5, 3, 1), (R23, 2, 2)]:
            out = folded_image_span(free_module(ring, n), class_group(ring), seed=0)
            ranks.append(out["span_rank"])
            ok &= out["all_certified"] and out["span_rank"] == out["target_rank"] == expected
    record(7, "folded images span the quotient", ok, t.elapsed, 900, f"ranks {ranks} = [1, 1, 2]")


def test_08_coinvariants():
    dims = []
    with Timer() as t:
        for q, n in [(2, 2), (3, 2), (2, 3)]:
            dims.append(steinberg_coinvariants(q, n)["coinvariants_dim"])
    record(8, "Steinberg coinvariants vanish", dims == [0, 0, 0], t.elapsed, 120, f"dims {dims}")


def test_09_permutations():
    with Timer() as t:
        counts_ok = all(
            len(set(good_perms(n))) == 2 ** (n - 1)
            and sum(1 for w in permutations(range(1, n + 1)) if classify_perm(w).good) == 2 ** (n - 1)
            for n in range(1, 9)
        )
        inv_ok = all(all(v for k, v in check_involution(n).items() if k != "count") for n in range(2, 8))
    record(9, "good and bad permutations", counts_ok and inv_ok, t.elapsed, 60, "2^(n-1) good for n<=8, involution for n<=7")


def test_10_disconnectedness_evidence():
    with Timer() as t:
        r5 = [component_count(unit_spec(R5, 2, bound))["components"] for bound in (10, 20, 40)]
        z = component_count(unit_spec(Z, 2, 3, 30))["components"]
    ok = all(c >= 2 for c in r5) and z == 1
    record(10, "B_2 component counts (EVIDENCE)", ok, t.elapsed, 300, f"Z[sqrt(-5)] {r5}, Z {z}")


def test_11_engine_oracles():
    rng = random.Random(2024)
    with Timer() as t:
        snf_ok = True
        for _ in range(500):
            r, c = rng.randint(1, 12), rng.randint(1, 12)
            m = [[rng.randint(-5, 5) if rng.random() < 0.6 else 0 for _ in range(c)] for _ in range(r)]
            rows = [{j: v for j, v in enumerate(row) if v} for row in m]
            snf_ok &= sparse_invariant_factors(rows) == intmat.dense_snf(m)
        spheres_ok = all(
            reduced_homology(simplex_boundary_complex(k)).nonzero() == {k - 1: 1} for k in range(1, 6)
        )
        classes = {d: class_number(RingDesc.parse(f"Q(sqrt({d}))")) for d in (-5, -23, -1)}
        forms = {d: reduced_form_count(disc) for d, disc in ((-5, -20), (-23, -23), (-1, -4))}
    ok = snf_ok and spheres_ok and classes == forms == {-5: 2, -23: 3, -1: 1}
    record(11, "engine oracles", ok, t.elapsed, 120, f"SNF x500, spheres k<=5, class numbers {classes}")


@pytest.mark.slow
def test_12_property_suites(tmp_path):
    with Timer() as t:
        proc = subprocess.run(
            [sys.executable, "-m", "steinlab", "run", str(ROOT / "ci.config"), "--out", str(tmp_path)],
            capture_output=True,
            text=True,
            cwd=ROOT,
        )
    report = json.loads((tmp_path / "report.json").read_text()) if (tmp_path / "report.json").exists() else {}
    counts = report.get("status_counts", {})
    ok = proc.returncode == 0 and report.get("ok") is True and counts.get("FAIL") == 0
    record(12, "run ci.config", ok, t.elapsed, 2700, f"exit {proc.returncode}, status counts {counts}")
