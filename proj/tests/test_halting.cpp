#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "qam/halting.hpp"

using namespace qam;

namespace {

Matrix density_step(const std::vector<Matrix>& elements, const Matrix& nu) {
    Matrix out = Matrix::zero(nu.rows, nu.cols);
    for (const auto& e : elements) out = out + e * nu * e.transpose();
    return out;
}

}  // namespace

TEST_CASE("nilpotent shift halts at index 2") {
    auto sys = load_elements_file(TEST_DATA_DIR "/shift.mat");
    auto hi = halting_index(sys);
    REQUIRE(hi.halts);
    CHECK(hi.index == 2);
    CHECK(hi.index <= sys.n * sys.n);

    // the 2x2 shift on its own space: nullities [1, 2]
    CHECK(kernel_chain(Matrix::from_rows({{0, 1}, {0, 0}})) == std::vector<int>{1, 2});
}

TEST_CASE("identity dynamics run forever") {
    auto sys = load_elements_file(TEST_DATA_DIR "/identity.mat");
    CHECK_FALSE(halting_index(sys).halts);
    auto nc = kernel_chain(vectorize(sys).big_e);
    for (int x : nc) CHECK(x == 0);
}

TEST_CASE("degenerate cases") {
    NonhaltingSystem sys;
    sys.n = 2;
    sys.elements = {Matrix::from_rows({{0, 1}, {0, 0}})};
    sys.nu0 = Matrix::zero(2, 2);
    auto hi = halting_index(sys);
    REQUIRE(hi.halts);
    CHECK(hi.index == 0);

    CHECK(kernel_chain(Matrix::zero(3, 3)) == std::vector<int>{3, 3, 3});
    CHECK(kernel_chain(Matrix::identity(3)) == std::vector<int>{0, 0, 0});
}

TEST_CASE("vectorize satisfies its defining identity") {
    // single shift element on an arbitrary matrix
    NonhaltingSystem sys;
    sys.n = 2;
    sys.elements = {Matrix::from_rows({{0, 1}, {0, 0}})};
    sys.nu0 = Matrix::from_rows({{0, 0}, {0, 1}});
    auto vs = vectorize(sys);
    Matrix arb = Matrix::from_rows({{1, Rational(2, 3)}, {-1, 4}});
    CHECK(vs.big_e * vec_of(arb) == vec_of(density_step(sys.elements, arb)));

    // a pair of (1/2)I elements gives bigE = (1/2)I on n^2 dimensions
    NonhaltingSystem coins;
    coins.n = 2;
    coins.elements = {Matrix::identity(2).scaled(Rational(1, 2)),
                      Matrix::identity(2).scaled(Rational(1, 2))};
    coins.nu0 = Matrix::identity(2);
    CHECK(vectorize(coins).big_e == Matrix::identity(4).scaled(Rational(1, 2)));

    // no elements at all: bigE = 0
    NonhaltingSystem empty;
    empty.n = 2;
    empty.nu0 = Matrix::identity(2);
    CHECK(vectorize(empty).big_e.is_zero());
}

TEST_CASE("agreement with the un-vectorized density iteration on random systems") {
    std::mt19937 rng(307);
    int done = 0;
    while (done < 50) {
        int n = 1 + static_cast<int>(rng() % 3);
        int k = 1 + static_cast<int>(rng() % 2);
        NonhaltingSystem sys;
        sys.n = n;
        for (int e = 0; e < k; ++e) {
            Matrix m(n, n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c)
                    m.at(r, c) = Rational(static_cast<long>(rng() % 3) - 1, 2 * k);
            sys.elements.push_back(m);
        }
        // random diagonal PSD nu0; sometimes zero
        Matrix nu(n, n);
        for (int r = 0; r < n; ++r) nu.at(r, r) = Rational(static_cast<long>(rng() % 3), 2);
        sys.nu0 = nu;
        try {
            sys.validate();
        } catch (const std::invalid_argument&) {
            continue;
        }
        ++done;

        auto hi = halting_index(sys);
        Matrix cur = sys.nu0;
        int first = -1;
        for (int j = 0; j <= n * n; ++j) {
            if (cur.is_zero()) {
                first = j;
                break;
            }
            cur = density_step(sys.elements, cur);
        }
        CAPTURE(done);
        CAPTURE(n);
        CAPTURE(k);
        if (first >= 0) {
            REQUIRE(hi.halts);
            CHECK(hi.index == first);
        } else {
            CHECK_FALSE(hi.halts);
        }

        auto chain = kernel_chain(vectorize(sys).big_e);
        int dim = n * n;
        REQUIRE(static_cast<int>(chain.size()) == dim);
        for (size_t i = 1; i < chain.size(); ++i) {
            CHECK(chain[i] >= chain[i - 1]);
            if (chain[i] == chain[i - 1])  // constant from the first repeat on
                for (size_t j = i; j < chain.size(); ++j) CHECK(chain[j] == chain[i]);
        }
    }
}

TEST_CASE("elements file validation") {
    NonhaltingSystem bad;
    bad.n = 2;
    bad.elements = {Matrix::identity(2), Matrix::identity(2)};  // sum E^T E = 2I
    bad.nu0 = Matrix::identity(2);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    NonhaltingSystem asym;
    asym.n = 2;
    asym.elements = {Matrix::identity(2).scaled(Rational(1, 2))};
    asym.nu0 = Matrix::from_rows({{0, 1}, {0, 0}});
    CHECK_THROWS_AS(asym.validate(), std::invalid_argument);
}
