from itertools import product

import numpy as np
import pytest

from src.errors import UnsupportedFieldError
from src.finite_field import (
    DEFAULT_MODULI,
    _evaluate,
    _slow_mul,
    compatible_polynomial,
    default_modulus,
    embed,
    format_field_table,
    is_irreducible,
    make_field,
    tower_generator,
)
from src.memory_manager import free_memory


def test_default_moduli_are_smallest_irreducible():
    assert default_modulus(2, 2) == (1, 1, 1)
    assert default_modulus(2, 3) == (1, 1, 0, 1)
    assert default_modulus(3, 2) == (1, 0, 1)
    assert is_irreducible((1, 1, 0, 1), 2)
    assert not is_irreducible((1, 0, 0, 1), 2)


def test_gf2_tables():
    F = make_field(2, 1)
    assert F.q == 2
    assert F.mul_table().tolist() == [[0, 0], [0, 1]]
    assert F.add(1, 1) == 0


@pytest.mark.parametrize("p,k", [(2, 2), (2, 3), (3, 2), (5, 1), (2, 4)])
def test_table_multiplication_matches_polynomial_product(p, k):
    F = make_field(p, k)
    table = F.mul_table()
    for a, b in product(range(F.q), repeat=2):
        assert table[a, b] == _slow_mul(a, b, p, F.modulus)


@pytest.mark.parametrize("p,k", [(2, 3), (3, 2), (7, 1)])
def test_field_axioms(p, k):
    F = make_field(p, k)
    x = F.elements()
    assert np.all(F.add(x, F.neg(x)) == 0)
    assert np.all(F.sub(F.add(x, 1), 1) == x)
    for a in range(1, F.q):
        assert F.mul(a, F.inv(a)) == 1
    assert F.element_order(F.generator) == F.q - 1
    # дистрибутивность на всей таблице
    a, b = x[:, None], x[None, :]
    for c in range(F.q):
        assert np.all(F.mul(c, F.add(a, b)) == F.add(F.mul(c, a), F.mul(c, b)))


def test_power_conventions():
    F = make_field(2, 2)
    assert F.power(0, 0) == 1
    assert F.power(0, 3) == 0
    for a in range(1, 4):
        assert F.power(a, 3) == 1
    assert F.power(np.array([0, 1, 2, 3]), 2).tolist() == [F.mul(a, a) for a in range(4)]


def test_make_field_validation():
    with pytest.raises(UnsupportedFieldError):
        make_field(4, 1)
    with pytest.raises(UnsupportedFieldError):
        make_field(2, 17)
    with pytest.raises(UnsupportedFieldError):
        make_field(2, 2, modulus=(1, 0, 1))
    with pytest.raises(UnsupportedFieldError):
        make_field(2, 4, table_limit=8)


def test_explicit_modulus_gives_isomorphic_field():
    F = make_field(2, 3, modulus=(1, 0, 1, 1))
    assert F.modulus == (1, 0, 1, 1)
    assert F != make_field(2, 3)
    assert F.element_order(F.generator) == 7


@pytest.mark.parametrize("small_k,big_k", [(1, 3), (2, 4), (2, 6)])
def test_embedding_is_a_homomorphism(small_k, big_k):
    small, big = make_field(2, small_k), make_field(2, big_k)
    image = [embed(small, big, a) for a in range(small.q)]
    assert image[0] == 0 and image[1] == 1
    assert len(set(image)) == small.q
    for a, b in product(range(small.q), repeat=2):
        assert image[small.add(a, b)] == big.add(image[a], image[b])
        assert image[small.mul(a, b)] == big.mul(image[a], image[b])


def test_embedding_requires_divisible_degrees():
    with pytest.raises(UnsupportedFieldError):
        embed(make_field(2, 2), make_field(2, 3), 1)


def test_field_table_output():
    text = format_field_table(make_field(2, 2))
    assert "modulus: 1,1,1" in text
    assert text.splitlines()[0] == "p=2 k=2 q=4"


def _smallest_irreducible(p, k):
    for idx in range(p ** k):
        digits, x = [], idx
        for _ in range(k):
            digits.append(x % p)
            x //= p
        if is_irreducible(tuple(digits) + (1,), p):
            return tuple(digits) + (1,)


@pytest.mark.parametrize("p,k", [(2, 2), (2, 5), (2, 8), (3, 3), (3, 4), (5, 2), (7, 3), (13, 4), (251, 2)])
def test_default_moduli_table_matches_search(p, k):
    assert default_modulus(p, k) == _smallest_irreducible(p, k)


def test_default_moduli_table_covers_table_limit():
    for (p, k), modulus in DEFAULT_MODULI.items():
        assert p ** k <= 2 ** 16
        assert len(modulus) == k + 1 and modulus[-1] == 1
    assert default_modulus(2, 16) == (1, 1, 0, 1, 0, 1) + (0,) * 10 + (1,)
    assert default_modulus(7, 1) == (0, 1)
    with pytest.raises(UnsupportedFieldError):
        default_modulus(257, 2)


@pytest.mark.parametrize("p,k", [(2, 4), (2, 6), (3, 2), (3, 4), (5, 2)])
def test_compatible_polynomials_are_norm_compatible(p, k):
    F = make_field(p, k)
    root = tower_generator(F)
    assert F.element_order(root) == F.q - 1
    for d in (1, 2, 3):
        if k % d == 0 and d < k:
            image = F.power(root, (F.q - 1) // (p ** d - 1))
            assert _evaluate(F, compatible_polynomial(p, d), image) == 0


def _assert_tower_consistent(a, b, c, p=2):
    fa, fb, fc = make_field(p, a), make_field(p, b), make_field(p, c)
    for x in range(fa.q):
        assert embed(fa, fc, x) == embed(fb, fc, embed(fa, fb, x))


@pytest.mark.parametrize("tower", [(1, 2, 4), (2, 4, 8), (3, 6, 12), (1, 3, 6), (2, 6, 12)])
def test_embeddings_compose_along_towers(tower):
    _assert_tower_consistent(*tower)


def test_embeddings_compose_in_characteristic_three():
    _assert_tower_consistent(1, 2, 4, p=3)
    _assert_tower_consistent(2, 4, 8, p=3)


@pytest.mark.slow
@pytest.mark.parametrize("tower", [(2, 8, 16), (4, 8, 16), (2, 4, 16)])
def test_embeddings_compose_up_to_gf_65536(tower):
    _assert_tower_consistent(*tower)


def test_embedding_through_non_default_modulus():
    small, big = make_field(2, 2), make_field(2, 8)
    middle = make_field(2, 4, modulus=(1, 0, 0, 1, 1))
    assert middle != make_field(2, 4)
    for x in range(small.q):
        assert embed(small, big, x) == embed(middle, big, embed(small, middle, x))


def test_embedding_between_moduli_of_one_field():
    F, G = make_field(2, 3), make_field(2, 3, modulus=(1, 0, 1, 1))
    image = [embed(F, G, a) for a in range(F.q)]
    for a, b in product(range(F.q), repeat=2):
        assert image[F.mul(a, b)] == G.mul(image[a], image[b])
        assert image[F.add(a, b)] == G.add(image[a], image[b])
    assert [embed(G, F, b) for b in image] == list(range(F.q))
    assert [embed(F, F, a) for a in range(F.q)] == list(range(F.q))


def test_field_caches_are_released():
    make_field(2, 3)
    compatible_polynomial(2, 3)
    free_memory("tests")
    assert compatible_polynomial.cache_info().currsize == 0
    F = make_field(2, 3)
    assert F.element_order(tower_generator(F)) == 7
