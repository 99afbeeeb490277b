import itertools

from hypothesis import given, strategies as st

from folnerlab.lattice import echelon_coordinates, hermite_normal_form, lattice_basis


def det(m):
    # Bareiss fraction-free determinant
    m = [row[:] for row in m]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1] if n else 1


def matmul(a, b):
    return [[sum(x * y for x, y in zip(row, col)) for col in zip(*b)] for row in a]


def is_hnf(H):
    last = -1
    seen_zero = False
    for row in H:
        nz = [j for j, x in enumerate(row) if x]
        if not nz:
            seen_zero = True
            continue
        assert not seen_zero
        p = nz[0]
        assert p > last and row[p] > 0
        last = p
    return True


matrices = st.integers(1, 4).flatmap(lambda r: st.integers(1, 4).flatmap(
    lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r)))


@given(matrices)
def test_hnf_is_unimodular_transform(M):
    H, U = hermite_normal_form(M)
    assert matmul(U, M) == H
    assert abs(det(U)) == 1
    assert is_hnf(H)
    for i, row in enumerate(H):
        if any(row):
            p = next(j for j, x in enumerate(row) if x)
            assert all(0 <= H[k][p] < row[p] for k in range(i))


@given(matrices)
def test_inputs_lie_in_basis_span(M):
    basis = lattice_basis(M)
    for row in M:
        assert echelon_coordinates(basis, row) is not None


def test_basis_examples():
    assert lattice_basis([[2, 0], [0, 3], [2, 3]]) == [[2, 0], [0, 3]]
    assert lattice_basis([[4, 6], [6, 9]]) == [[2, 3]]
    assert lattice_basis([[1, 0], [0, 1], [-1, -1]]) == [[1, 0], [0, 1]]
    assert echelon_coordinates([[2, 0], [0, 3]], [1, 0]) is None


def test_lattice_points_brute_force():
    M = [[3, 1], [1, 2]]
    basis = lattice_basis(M)
    span = {(3 * a + b, a + 2 * b) for a, b in itertools.product(range(-6, 7), repeat=2)}
    for x, y in itertools.product(range(-5, 6), repeat=2):
        if (x, y) in span:
            assert echelon_coordinates(basis, [x, y]) is not None
    # index of the lattice equals |det M|
    assert basis[0][0] * basis[1][1] == 5
