"""Acceptance criteria, one test per criterion, exact tolerances.

Every test prints one `[acceptance] criterion N: PASS/FAIL` line (visible
with `pytest -s` or on failure); run the module alone via
`pytest tests/test_acceptance.py -v -s`.
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from degdet import (DEFAULT_PRIME, Instance, SolveOptions,
                    degdet_blowup, degdet_commutative, enumerate_perfect,
                    first_primes, gen_2x2, gen_bipartite, gen_dense, gen_integer,
                    bound_log2, hungarian, is_consistent, is_minus_infinity,
                    newton_small, random_bipartite_weights, random_rank_profile,
                    solve, solve_and_extract, solve_rational, to_instance)
from degdet.nconvex import (BarrierSpec, DiscreteFunction, barrier, check_pair,
                            descend_to_minimizer, linear_function, max_pair_function,
                            nonneg_combination, normal_path, sample_pairs, transformed)

P = DEFAULT_PRIME


@contextmanager
def criterion(number, label):
    try:
        yield
    except BaseException:
        print(f"[acceptance] criterion {number} ({label}): FAIL")
        raise
    print(f"[acceptance] criterion {number} ({label}): PASS")


def skew3_mats():
    out = []
    for (a, b) in ((0, 1), (0, 2), (1, 2)):
        m = np.zeros((3, 3), dtype=int)
        m[a, b] = 1
        m[b, a] = -1
        out.append(m)
    return out


def test_criterion_01_bipartite_equivalence():
    with criterion(1, "solve == hungarian on 100 bipartite instances"):
        rng = np.random.default_rng(101)
        for trial in range(100):
            n = int(rng.integers(2, 21))
            density = 1.0 if trial % 2 == 0 else float(rng.uniform(0.3, 0.9))
            grid = random_bipartite_weights(n, seed=trial, cost_range=(-10**6, 10**6),
                                            density=density)
            if all(w is None for row in grid for w in row):
                continue
            inst = gen_bipartite(grid)
            start = time.perf_counter()
            report = solve(inst, SolveOptions(seed=trial))
            elapsed = time.perf_counter() - start
            assert elapsed < 5.0, f"trial {trial}: solve took {elapsed:.2f}s"
            assert report.value == hungarian(grid), f"trial {trial} (n={n})"


def test_criterion_02_blowup_equivalence():
    with criterion(2, "solve == blow-up oracle on 100 dense instances + skew fixture"):
        rng = np.random.default_rng(202)
        for trial in range(99):
            n = int(rng.integers(1, 5))
            m = int(rng.integers(1, 7))
            inst = gen_dense(n, m, seed=trial + 5000, cost_range=(-100, 100))
            got = solve(inst, SolveOptions(seed=trial)).value
            want = degdet_blowup(inst, seed=trial + 9000)
            assert got == want, f"trial {trial} (n={n}, m={m}): {got} != {want}"
        skew = Instance.from_arrays(P, skew3_mats(), [0, 0, 0])
        report = solve(skew, SolveOptions(seed=0))
        assert report.value == 0 == degdet_blowup(skew, seed=1)
        assert is_minus_infinity(degdet_commutative(skew, seed=2))


def test_criterion_03_shift_metamorphic():
    with criterion(3, "solve(A[c + b*1]) - solve(A[c]) == n*b"):
        rng = np.random.default_rng(303)
        for trial in range(50):
            n = int(rng.integers(1, 5))
            m = int(rng.integers(1, 5))
            inst = gen_dense(n, m, seed=trial + 7000, cost_range=(-50, 50))
            base = solve(inst, SolveOptions(seed=trial)).value
            for b in (-7, 1, 13):
                shifted = Instance.from_arrays(P, [mat.data for mat in inst.mats],
                                               [c + b for c in inst.costs])
                value = solve(shifted, SolveOptions(seed=trial)).value
                if is_minus_infinity(base):
                    assert is_minus_infinity(value)
                else:
                    assert value - base == n * b, (trial, b)


def test_criterion_04_monotonicity():
    with criterion(4, "single-coordinate cost increases never decrease the value"):
        rng = np.random.default_rng(404)
        for trial in range(50):
            n = int(rng.integers(1, 5))
            m = int(rng.integers(1, 5))
            inst = gen_dense(n, m, seed=trial + 8000, cost_range=(-40, 40))
            base = solve(inst, SolveOptions(seed=trial)).value
            k = int(rng.integers(0, m))
            bumped = list(inst.costs)
            bumped[k] += int(rng.integers(1, 9))
            after = solve(Instance.from_arrays(P, [mat.data for mat in inst.mats], bumped),
                          SolveOptions(seed=trial)).value
            assert after >= base, (trial, k)


def test_criterion_05_iteration_bound():
    with criterion(5, "per-phase oracle calls <= n^2 m + 1, phase 0 count == 1"):
        rng = np.random.default_rng(505)
        corpus = []
        for trial in range(20):
            n = int(rng.integers(2, 6))
            m = int(rng.integers(1, 6))
            corpus.append(gen_dense(n, m, seed=trial + 9100, cost_range=(-500, 500)))
        for trial in range(10):
            n = int(rng.integers(2, 9))
            grid = random_bipartite_weights(n, seed=trial + 50, cost_range=(-10**4, 10**4),
                                            density=0.9)
            corpus.append(gen_bipartite(grid))
        for idx, inst in enumerate(corpus):
            report = solve(inst, SolveOptions(seed=idx))
            if report.used_blowup_fallback or is_minus_infinity(report.value):
                continue
            bound = inst.n * inst.n * inst.m + 1
            assert all(count <= bound for count in report.iterations), idx
            assert report.iterations[0] == 1, idx


def test_criterion_06_truncation_soundness():
    with criterion(6, "truncation depth 2 n^2 m == truncation disabled"):
        rng = np.random.default_rng(606)
        for trial in range(50):
            n = int(rng.integers(1, 5))
            m = int(rng.integers(1, 6))
            cmax = int(rng.integers(10, 10**4))
            inst = gen_dense(n, m, seed=trial + 9500, cost_range=(-cmax, cmax))
            depth = 2 * n * n * m
            with_trunc = solve(inst, SolveOptions(seed=trial, truncation_depth=depth)).value
            without = solve(inst, SolveOptions(seed=trial, truncation_enabled=False)).value
            assert with_trunc == without, trial


def test_criterion_07_scaling_soundness():
    with criterion(7, "scaling == no-scaling for small costs"):
        rng = np.random.default_rng(707)
        for trial in range(50):
            n = int(rng.integers(1, 5))
            m = int(rng.integers(1, 6))
            inst = gen_dense(n, m, seed=trial + 9900, cost_range=(-32, 32))
            scaled = solve(inst, SolveOptions(seed=trial)).value
            direct = solve(inst, SolveOptions(seed=trial, scaling_enabled=False)).value
            assert scaled == direct, trial


def test_criterion_08_n_convexity_suite():
    with criterion(8, "N-convexity on 10^4 pairs in [-8, 8]^6"):
        dim = 6
        pairs = sample_pairs(dim, seed=808, count=10_000, box=(-8, 8))
        lin = linear_function(dim, [2.5, -1.0, 0.0, 4.0, -3.5, 1.0], b=2.0)
        mx = max_pair_function(dim, 1, 4)
        mx_diag = max_pair_function(dim, 2, 2)
        combo = nonneg_combination([lin, mx, mx_diag], [1.5, 2.0, 0.5])
        functions = [lin, mx, mx_diag, combo,
                     transformed(combo, translation=(1, -2, 0, 3, 5, -1)),
                     transformed(combo, swap=(0, 4)),
                     transformed(combo, negate_coord=3)]
        for x, y in pairs:
            for f in functions:
                assert check_pair(f, x, y), (f, x, y)
            assert len(normal_path(x, y)) == max(abs(a - b) for a, b in zip(x, y)) + 1
        bad = DiscreteFunction(1, lambda z: -abs(z[0]))
        assert not check_pair(bad, (-1,), (1,))


def test_criterion_09_barrier_monotonicity():
    with criterion(9, "barrier chains from minimizers are nondecreasing"):
        rng = np.random.default_rng(909)
        checked = 0
        for trial in range(20):
            n = int(rng.integers(1, 3))
            constraints = []
            for i in range(n):
                for j in range(n):
                    constraints.append((i, j, int(rng.integers(0, 3)),
                                        int(rng.integers(-3, 4))))
            spec = BarrierSpec(n=n, penalty=1000, constraints=tuple(constraints))
            h = barrier(spec)
            z = descend_to_minimizer(h, (0,) * (2 * n))
            for _ in range(30):
                y = tuple(int(v) for v in rng.integers(-4, 5, size=2 * n))
                values = [h(pt) for pt in normal_path(z, y)]
                assert all(a <= b for a, b in zip(values, values[1:])), (trial, z, y)
                checked += 1
        assert checked == 600


def test_criterion_10_rational_pipeline():
    with criterion(10, "multi-prime == direct big-prime solve; budget within +2"):
        rng = np.random.default_rng(1010)
        for trial in range(20):
            n = int(rng.integers(1, 4))
            m = int(rng.integers(1, 4))
            inst = gen_integer(n, m, seed=trial + 11000, entry_bound=3,
                               cost_range=(-100, 100))
            rational = solve_rational(inst, SolveOptions(seed=trial))
            direct = solve(inst.reduce_mod(P), SolveOptions(seed=trial + 500)).value
            assert rational == direct, trial
        for n in range(1, 5):
            for D in range(1, 5):
                d = max(1, n - 1)
                L = (n * d) ** (2 * n * d) * D ** (n * d)
                bits = L.bit_length()
                exact = bits - 1 if L == 1 << (bits - 1) else bits
                got = bound_log2(n, D)
                assert exact <= got <= exact + 2, (n, D)
                product = 1
                for q in first_primes(max(1, got)):
                    product *= q
                assert product > L, (n, D)


def test_criterion_11_partitioned_2x2():
    with criterion(11, "extract == enumerate == commutative on 50 partitioned instances"):
        rng = np.random.default_rng(1111)
        for trial in range(50):
            n = int(rng.integers(1, 5))
            profile = random_rank_profile(n, seed=trial + 60, weights=(0.1, 0.3, 0.6))
            part = gen_2x2(n, seed=trial + 12000, rank_profile=profile,
                           cost_range=(-10, 10))
            value, matching = solve_and_extract(part, SolveOptions(seed=trial))
            enum_value, _ = enumerate_perfect(part, seed=trial + 1)
            assert value == enum_value, trial
            if part.edges():
                comm = degdet_commutative(to_instance(part), seed=trial + 2)
                assert comm == value, trial
            if is_minus_infinity(value):
                assert matching is None
                continue
            assert matching.is_perfect(n), trial
            assert matching.weight(part.costs) == value, trial
            assert is_consistent(matching, part, seed=trial + 3), trial


def test_criterion_12_newton_lp():
    with criterion(12, "newton support LP == commutative degree; simplex containment"):
        rng = np.random.default_rng(1212)
        for trial in range(20):
            n = int(rng.integers(1, 5))
            m = int(rng.integers(1, 5))
            inst = gen_dense(n, m, seed=trial + 13000, cost_range=(-20, 20))
            support = newton_small(inst)
            for vec in support.vertices:
                assert all(u >= 0 for u in vec), trial
                assert sum(vec) == n, trial
            for rep in range(5):
                costs = [int(c) for c in rng.integers(-20, 21, size=m)]
                probe = Instance.from_arrays(P, [mat.data for mat in inst.mats], costs)
                lp_value = support.lp(costs)
                comm = degdet_commutative(probe, seed=trial * 10 + rep)
                assert lp_value == comm, (trial, rep)
