import itertools
import random

import pytest

from secmsr.finite_field import FieldContext, FieldError, Matrix
from secmsr.msr import (
    Codeword, MSRArrayCode, NodeContent, ParameterError, SystemParams, class_position,
    class_representatives, digit, digits, helper_subsets, random_message, repair_download, substitute,
)

FIELD = FieldContext(8)


def make(n, k, d, ctx=FIELD, seed=0):
    p = SystemParams(n, k, d)
    code = MSRArrayCode(p, ctx)
    rng = random.Random(seed)
    return p, code, code.encode(random_message(p, ctx, rng))


def test_params_sheet():
    p = SystemParams(4, 2, 3, 1)
    assert p.sheet() == {"n": 4, "k": 2, "d": 3, "l": 1, "s": 2, "alpha": 16, "beta": 8,
                         "M": 32, "M_s": 8, "R": 24}
    assert SystemParams(4, 2, 3, 0).R == 0


@pytest.mark.parametrize("bad", [(4, 2, 2, 1), (4, 2, 4, 0), (3, 3, 2, 0), (4, 1, 3, 0), (4, 2, 3, 2)])
def test_params_rejected(bad):
    with pytest.raises(ParameterError):
        SystemParams(*bad)


def test_index_helpers():
    s, n = 3, 4
    for a in range(s ** n):
        ds = digits(a, s, n)            # most significant first
        assert sum(v * s ** t for t, v in enumerate(reversed(ds))) == a
        for i in range(1, n + 1):
            assert digit(a, i, s) == ds[n - i]
            b = substitute(a, i, 2, s)
            assert digit(b, i, s) == 2
    for i in range(1, n + 1):
        reps = class_representatives(i, s, n)
        assert len(reps) == s ** (n - 1) and reps == sorted(reps)
        assert [class_position(a, i, s) for a in reps] == list(range(len(reps)))
        assert all(digit(a, i, s) == 0 for a in reps)


def test_lambda_distinct_and_fault_detection():
    p = SystemParams(4, 2, 3)
    code = MSRArrayCode(p, FIELD)
    assert len({v for r in code.lam for v in r}) == p.s * p.n
    lam = [list(r) for r in code.lam]
    lam[-1][1] = lam[-1][0]
    with pytest.raises(FieldError):
        MSRArrayCode(p, FIELD, lam)
    with pytest.raises(FieldError):
        MSRArrayCode(SystemParams(5, 2, 4), FieldContext(3))


@pytest.mark.parametrize("nkd", [(4, 2, 3), (5, 3, 4), (5, 2, 4), (6, 2, 4), (5, 2, 3)])
def test_generator_parity_orthogonal(nkd):
    p = SystemParams(*nkd)
    code = MSRArrayCode(p, FIELD)
    G, H = code.generator_matrix(), code.parity_check_matrix()
    assert G.shape == (p.M, p.n * p.alpha)
    assert H.shape == (p.alpha * (p.n - p.k), p.n * p.alpha)
    assert (G @ H.T).is_zero()
    assert G.rank() == p.M
    # systematic on the first k nodes
    assert G.select_cols(range(p.M)) == Matrix.identity(FIELD, p.M)


def test_parity_equations_by_definition():
    p, code, cw = make(4, 2, 3)
    for a in range(p.alpha):
        for t in range(p.n - p.k):
            acc = 0
            for j in range(1, p.n + 1):
                lam = code.lam[j - 1][digit(a, j, p.s)]
                acc ^= FIELD.mul(FIELD.pow(lam, t), cw.node(j).symbols[a])
            assert acc == 0


@pytest.mark.parametrize("nkd", [(4, 2, 3), (5, 3, 4), (5, 2, 4), (6, 2, 4)])
def test_any_k_nodes_recover(nkd):
    p, code, cw = make(*nkd)
    assert code.check_parity(cw)
    for sub in itertools.combinations(range(1, p.n + 1), p.k):
        assert code.collect([cw.node(j) for j in sub]) == cw


@pytest.mark.parametrize("nkd", [(4, 2, 3), (5, 3, 4), (5, 2, 4), (6, 2, 4), (5, 2, 3)])
def test_exact_repair_from_every_helper_set(nkd):
    p, code, cw = make(*nkd)
    for i in range(1, p.n + 1):
        for hs in helper_subsets(p, i):
            dls = [code.repair_download(cw.node(j), i) for j in hs]
            assert all(len(dl.mu) == p.beta for dl in dls)
            assert code.repair(i, dls) == cw.node(i)


def test_download_is_class_sum():
    p, code, cw = make(5, 2, 4)
    node = cw.node(2)
    dl = repair_download(node, 4, p)
    w = p.s ** 3
    for pos, a in enumerate(class_representatives(4, p.s, p.n)):
        want = 0
        for u in range(p.s):
            want ^= node.symbols[a + u * w]
        assert dl.mu[pos] == want


def test_repair_input_errors():
    p, code, cw = make(4, 2, 3)
    dls = [code.repair_download(cw.node(j), 1) for j in (2, 3)]
    with pytest.raises(ValueError):
        code.repair(1, dls)
    with pytest.raises(ValueError):
        code.repair(1, dls + [dls[0]])
    with pytest.raises(ValueError):
        code.repair_download(cw.node(1), 1)


def test_collect_errors():
    p, code, cw = make(4, 2, 3)
    with pytest.raises(ValueError):
        code.collect([cw.node(1)])
    with pytest.raises(ValueError):
        code.collect([cw.node(1), cw.node(1)])
    with pytest.raises(ValueError):
        code.collect([cw.node(1), NodeContent(2, (0,) * 3)])


def test_linearity():
    p = SystemParams(4, 2, 3)
    code = MSRArrayCode(p, FIELD)
    rng = random.Random(2)
    a, b = random_message(p, FIELD, rng), random_message(p, FIELD, rng)
    ab = [[x ^ y for x, y in zip(r, q)] for r, q in zip(a, b)]
    va, vb = code.encode(a).vector(), code.encode(b).vector()
    assert code.encode(ab).vector() == [x ^ y for x, y in zip(va, vb)]


def test_codeword_json_round_trip():
    p, code, cw = make(4, 2, 3, FieldContext(32))
    back = Codeword.from_json(cw.to_json())
    assert back == cw
    with pytest.raises(ValueError):
        Codeword.from_json('{"params": {}}')
