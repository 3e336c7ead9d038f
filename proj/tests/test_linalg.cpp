#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qam/linalg.hpp"

using namespace qam;

namespace {

Matrix scaled_identity(int n, const Rational& s) { return Matrix::identity(n).scaled(s); }

// Independent PSD oracle: Faddeev-LeVerrier characteristic polynomial.
// For symmetric M all eigenvalues are real; M is PSD iff the elementary
// symmetric functions e_1..e_n of the eigenvalues are all nonnegative.
// det(xI - M) = x^n - e1 x^{n-1} + e2 x^{n-2} - ...
bool psd_oracle(const Matrix& m) {
    int n = m.rows;
    std::vector<Rational> c(static_cast<size_t>(n) + 1);
    c[static_cast<size_t>(n)] = 1;
    Matrix mk = Matrix::zero(n, n);
    for (int k = 1; k <= n; ++k) {
        mk = m * mk;
        for (int i = 0; i < n; ++i) mk.at(i, i) += c[static_cast<size_t>(n - k + 1)];
        Matrix prod = m * mk;
        Rational trace = 0;
        for (int i = 0; i < n; ++i) trace += prod.at(i, i);
        c[static_cast<size_t>(n - k)] = -trace / k;
    }
    // c[n-k] = (-1)^k e_k; PSD iff every e_k >= 0.
    for (int k = 1; k <= n; ++k) {
        Rational ek = c[static_cast<size_t>(n - k)];
        if (k % 2 == 1) ek = -ek;
        if (ek < 0) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("gram_sum reference values") {
    Matrix third = scaled_identity(3, Rational(1, 3));
    Matrix two_thirds = scaled_identity(3, Rational(2, 3));
    CHECK(gram_sum({third, two_thirds, two_thirds}) == Matrix::identity(3));
    CHECK(gram_sum({Matrix::identity(3)}) == Matrix::identity(3));
}

TEST_CASE("psd_check examples") {
    CHECK(psd_check(scaled_identity(4, Rational(1, 2))));
    CHECK_FALSE(psd_check(Matrix::from_rows({{1, 2}, {2, 1}})));
    CHECK(psd_check(Matrix::identity(4) - scaled_identity(4, Rational(1, 2))));
    CHECK_THROWS_AS(psd_check(Matrix::from_rows({{0, 1}, {0, 0}})), std::invalid_argument);
}

TEST_CASE("psd_check agrees with the characteristic-polynomial oracle") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        int n = 2 + static_cast<int>(rng() % 2);
        Matrix m(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = r; c < n; ++c) {
                Rational v(static_cast<long>(rng() % 9) - 4, 1 + static_cast<long>(rng() % 3));
                m.at(r, c) = v;
                m.at(c, r) = v;
            }
        CAPTURE(trial);
        CHECK(psd_check(m) == psd_oracle(m));
    }
}

TEST_CASE("superoperator validation") {
    Matrix half = scaled_identity(4, Rational(1, 2));
    auto coin = Superoperator::make({{"l", half}, {"r", half}}, RestartMode::ImplicitRestart);
    CHECK(superop_validate(coin).ok);
    CHECK(coin.slack == scaled_identity(4, Rational(1, 2)));

    auto bad = Superoperator::make({{"a", Matrix::identity(4)}, {"b", Matrix::identity(4)}},
                                   RestartMode::ImplicitRestart);
    CHECK_FALSE(superop_validate(bad).ok);
}

TEST_CASE("superop_apply coin example and conservation") {
    Matrix half = scaled_identity(4, Rational(1, 2));
    auto coin = Superoperator::make({{"l", half}, {"r", half}}, RestartMode::ImplicitRestart);
    Vector psi{1, 0, 0, 0};
    auto res = superop_apply(coin, psi);
    REQUIRE(res.outcomes.size() == 2);
    CHECK(res.outcomes[0].state == Vector{Rational(1, 2), 0, 0, 0});
    CHECK(res.outcomes[1].state == Vector{Rational(1, 2), 0, 0, 0});
    CHECK(res.restart_mass == Rational(1, 2));

    std::mt19937 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        Vector v(4);
        for (int i = 0; i < 4; ++i) v[i] = Rational(static_cast<long>(rng() % 11) - 5, 3);
        auto r = superop_apply(coin, v);
        Rational consumed = r.restart_mass;
        for (const auto& o : r.outcomes) consumed += o.state.norm_squared();
        CHECK(consumed == v.norm_squared());
    }
}

TEST_CASE("initialize discards previous content") {
    Vector target{1, 0, 0, 0};
    CHECK(initialize(4, target) == target);
    Vector t3{1, 0, 0};
    CHECK(initialize(3, t3) == t3);
}

TEST_CASE("choose_scale_d examples and minimality") {
    CHECK(choose_scale_d({Matrix::identity(2), Matrix::identity(2)}) == 2);
    CHECK(choose_scale_d({Matrix::from_rows({{1, 0}, {0, 2}})}) == 2);

    std::mt19937 rng(23);
    for (int trial = 0; trial < 60; ++trial) {
        int n = 2 + static_cast<int>(rng() % 2);
        std::vector<Matrix> fam;
        int k = 1 + static_cast<int>(rng() % 2);
        for (int e = 0; e < k; ++e) {
            Matrix m(n, n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) m.at(r, c) = static_cast<long>(rng() % 7) - 3;
            fam.push_back(m);
        }
        int d = choose_scale_d(fam);
        Matrix gram = gram_sum(fam);
        CHECK(psd_check(Matrix::identity(n).scaled(Rational(d) * d) - gram));
        if (d > 2) {
            Rational dm1(d - 1);
            CHECK_FALSE(psd_check(Matrix::identity(n).scaled(dm1 * dm1) - gram));
        }
    }
}

TEST_CASE("rank, nullity, linear_solve, kron basics") {
    Matrix shift = Matrix::from_rows({{0, 1}, {0, 0}});
    CHECK(matrix_rank(shift) == 1);
    CHECK(nullity(shift) == 1);
    CHECK(matrix_rank(shift * shift) == 0);

    Matrix a = Matrix::from_rows({{2, 1}, {1, 3}});
    Vector b{5, 10};
    Vector x;
    REQUIRE(linear_solve(a, b, x));
    CHECK(a * x == b);
    Vector dummy;
    CHECK_FALSE(linear_solve(Matrix::from_rows({{1, 1}, {1, 1}}), b, dummy));

    Matrix k = shift.kron(Matrix::identity(2));
    CHECK(k.rows == 4);
    CHECK(k.at(0, 2) == 1);
    CHECK(k.at(1, 3) == 1);
    CHECK(matrix_rank(k) == 2);
}
