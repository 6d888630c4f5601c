#include "boxbp/solver.hpp"
#include "fixtures.hpp"

#include "doctest.h"

#include <cmath>

using namespace boxbp;
using testing::vec;

namespace {

Box unit_box(Eigen::Index n) { return Box::uniform(n, 0.0, 1.0); }

// Every sign pattern / subset of {0..n-1} with exactly k elements, drawn at random.
std::vector<int> random_subset(Rng& rng, int n, int k) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(static_cast<std::size_t>(k));
    return idx;
}

}  // namespace

TEST_CASE("2x4 fixture: binary indicator of {1,2} is the unique solution") {
    const Matrix A = testing::example_matrix();
    const Vector x0 = vec({1, 1, 0, 0});
    const SolveResult r = solve_box_bp(A, A * x0, unit_box(4), true);
    REQUIRE(r.optimal());
    CHECK((r.x - x0).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(r.objective == doctest::Approx(2.0));
    CHECK(r.unique == Uniqueness::Unique);
}

TEST_CASE("2x4 fixture: half-weight signal is not recovered") {
    // x0 = (0.5, 0.5, 0, 0) has l1 norm 1, but x0 + 0.1 (-u + 2v) = (0.8, 0, 0.1, 0)
    // stays feasible with norm 0.9.  That point is the unique minimizer.
    const Matrix A = testing::example_matrix();
    const Vector x0 = vec({0.5, 0.5, 0, 0});
    const SolveResult r = solve_box_bp(A, A * x0, unit_box(4), true);
    REQUIRE(r.optimal());
    CHECK(r.objective == doctest::Approx(0.9).epsilon(1e-9));
    CHECK((r.x - vec({0.8, 0, 0.1, 0})).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(r.unique == Uniqueness::Unique);
    CHECK((r.x - x0).norm() > 0.1);
}

TEST_CASE("zero measurements give the zero vector") {
    Rng rng(5);
    const Matrix A = sample_gaussian_matrix(rng, 3, 7);
    for (const Box& box : {unit_box(7), Box::uniform(7, -1, 1), Box::uniform(7, -2, 3)}) {
        const SolveResult r = solve_box_bp(A, Vector::Zero(3), box, true);
        REQUIRE(r.optimal());
        CHECK(r.x.cwiseAbs().maxCoeff() < 1e-12);
        CHECK(r.objective < 1e-12);
        CHECK(r.unique == Uniqueness::Unique);
    }
}

TEST_CASE("square invertible systems are always unique") {
    Rng rng(9);
    for (int t = 0; t < 10; ++t) {
        const Matrix A = sample_gaussian_matrix(rng, 5, 5);
        Vector x0(5);
        for (int i = 0; i < 5; ++i) x0[i] = rng.uniform01();
        const SolveResult r = solve_box_bp(A, A * x0, unit_box(5), true);
        REQUIRE(r.optimal());
        CHECK(r.unique == Uniqueness::Unique);
        CHECK((r.x - x0).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("infeasible measurements are reported") {
    const Matrix A = Matrix::Ones(1, 3);
    const SolveResult r = solve_box_bp(A, vec({5.0}), unit_box(3));
    CHECK(r.status == SolveStatus::Infeasible);
    CHECK_THROWS_AS(solve_box_bp(A, vec({1.0, 2.0}), unit_box(3)), std::invalid_argument);
}

TEST_CASE("classic and positive basis pursuit") {
    Rng rng(21);
    const Matrix A = sample_gaussian_matrix(rng, 20, 40);
    Vector x0 = Vector::Zero(40);
    x0[3] = 1.5;
    x0[17] = -0.7;
    x0[30] = 2.0;
    const SolveResult r = solve_l1(A, A * x0, true);
    REQUIRE(r.optimal());
    CHECK(relative_error(r.x, x0) < 1e-8);
    CHECK(r.unique == Uniqueness::Unique);

    Vector xp = x0.cwiseAbs();
    const SolveResult rp = solve_positive_l1(A, A * xp);
    REQUIRE(rp.optimal());
    CHECK(relative_error(rp.x, xp) < 1e-8);
}

TEST_CASE("scaling the data scales the solution") {
    Rng rng(33);
    for (int t = 0; t < 20; ++t) {
        const Matrix A = sample_gaussian_matrix(rng, 4, 8);
        Vector x0(8);
        for (int i = 0; i < 8; ++i) x0[i] = rng.uniform01() < 0.4 ? rng.uniform01() : 0.0;
        const Box box = Box::uniform(8, -1.0, 1.0);
        const Vector b = A * x0;
        const double beta = 0.25 + 3.0 * rng.uniform01();
        const SolveResult r1 = solve_box_bp(A, b, box, true);
        const SolveResult r2 = solve_box_bp(A, beta * b, box.scaled(beta), true);
        REQUIRE(r1.optimal());
        REQUIRE(r2.optimal());
        CHECK(r2.objective == doctest::Approx(beta * r1.objective).epsilon(1e-8));
        CHECK(r1.unique == r2.unique);
        if (r1.unique == Uniqueness::Unique) CHECK((r2.x - beta * r1.x).norm() < 1e-7);
    }
}

TEST_CASE("negative unipolar alphabets solve by reflection") {
    Rng rng(44);
    const Matrix A = sample_gaussian_matrix(rng, 5, 8);
    const Alphabet neg(-2, 0);
    Vector x0 = Vector::Zero(8);
    x0[1] = -2;
    x0[6] = -1;
    const SolveResult r = solve_alphabet(A, A * x0, neg, true);
    REQUIRE(r.optimal());
    const SolveResult direct = solve_box_bp(A, A * x0, Box::uniform(8, -2.0, 0.0), true);
    REQUIRE(direct.optimal());
    CHECK((r.x - direct.x).norm() < 1e-9);
    CHECK(r.unique == direct.unique);
    CHECK(r.x.maxCoeff() <= 1e-12);
}

TEST_CASE("positive vectors on a support share uniqueness with its indicator") {
    // 1_K unique for (P+) iff every positive vector supported on K is unique.
    Rng rng(55);
    int agree = 0, unique_count = 0;
    for (int t = 0; t < 40; ++t) {
        const int n = 5 + static_cast<int>(rng() % 4);
        const int m = 2 + static_cast<int>(rng() % static_cast<unsigned>(n - 2));
        const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(std::max(1, m - 1)));
        const Matrix A = sample_gaussian_matrix(rng, m, n);
        const auto K = random_subset(rng, n, k);
        const Vector one_k = testing::indicator(n, K);
        const SolveResult base = solve_positive_l1(A, A * one_k, true);
        REQUIRE(base.optimal());
        bool all_unique = true;
        for (int probe = 0; probe < 20; ++probe) {
            Vector x = Vector::Zero(n);
            for (int i : K) x[i] = 0.05 + 3.0 * rng.uniform01();
            const SolveResult r = solve_positive_l1(A, A * x, true);
            REQUIRE(r.optimal());
            const bool recovered = r.unique == Uniqueness::Unique && (r.x - x).cwiseAbs().maxCoeff() < 1e-6;
            all_unique = all_unique && recovered;
        }
        const bool base_recovered =
            base.unique == Uniqueness::Unique && (base.x - one_k).cwiseAbs().maxCoeff() < 1e-6;
        agree += base_recovered == all_unique;
        unique_count += base_recovered;
    }
    CHECK(agree == 40);
    CHECK(unique_count > 0);
    CHECK(unique_count < 40);
}

TEST_CASE("interior levels do not affect unipolar uniqueness") {
    // x0 = sum i 1_{K_i} over {0..L} is unique iff x_hat = interior values on
    // K_hat plus L on K_L is unique.
    Rng rng(66);
    int agree = 0;
    for (int t = 0; t < 30; ++t) {
        const int n = 6 + static_cast<int>(rng() % 3);
        const int m = 3 + static_cast<int>(rng() % 3);
        const int L = 2 + static_cast<int>(rng() % 2);
        const Matrix A = sample_gaussian_matrix(rng, m, n);
        const Box box = Box::uniform(n, 0.0, L);
        Vector x0 = Vector::Zero(n);
        const auto support = random_subset(rng, n, 1 + static_cast<int>(rng() % 3));
        for (int i : support) x0[i] = 1 + static_cast<int>(rng() % static_cast<unsigned>(L));
        const SolveResult r0 = solve_box_bp(A, A * x0, box, true);
        const bool u0 = r0.unique == Uniqueness::Unique && (r0.x - x0).cwiseAbs().maxCoeff() < 1e-6;
        bool all = true;
        for (int probe = 0; probe < 10; ++probe) {
            Vector xh = x0;
            for (int i : support) {
                if (x0[i] != L) xh[i] = 0.02 + (L - 0.04) * rng.uniform01();
            }
            const SolveResult r = solve_box_bp(A, A * xh, box, true);
            all = all && r.unique == Uniqueness::Unique && (r.x - xh).cwiseAbs().maxCoeff() < 1e-6;
        }
        agree += u0 == all;
    }
    CHECK(agree == 30);
}

TEST_CASE("mirrored binary program") {
    Rng rng(77);
    const Matrix A = sample_gaussian_matrix(rng, 6, 10);
    const Vector ones = Vector::Ones(10);
    const SolveResult all = solve_mirrored_binary(A, A * ones, true);
    REQUIRE(all.optimal());
    CHECK((all.x - ones).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(all.unique == Uniqueness::Unique);

    // b = 0: the mirrored problem asks for 1 from A y = A 1.
    const SolveResult direct = solve_box_bp(A, A * ones, unit_box(10), true);
    const SolveResult zero = solve_mirrored_binary(A, Vector::Zero(6), true);
    REQUIRE(zero.optimal());
    CHECK(zero.unique == direct.unique);
    if (direct.unique == Uniqueness::Unique && (direct.x - ones).norm() < 1e-8) {
        CHECK(zero.x.cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("automatic binary recovery picks the integral candidate") {
    Rng rng(88);
    SUBCASE("all ones is recovered from few measurements") {
        const Matrix A = sample_gaussian_matrix(rng, 3, 30);
        const Vector ones = Vector::Ones(30);
        const SolveResult r = recover_binary_auto(A, A * ones);
        REQUIRE(r.optimal());
        CHECK((r.x - ones).cwiseAbs().maxCoeff() < 1e-9);
    }
    SUBCASE("sparse signals follow the direct branch") {
        int same = 0;
        for (int t = 0; t < 10; ++t) {
            const Matrix A = sample_gaussian_matrix(rng, 30, 50);
            const Signal s = sample_signal(rng, Alphabet::binary(), SupportProfile(50, {{1, 5}}));
            const Vector b = A * s.values;
            const SolveResult a = recover_binary_auto(A, b);
            const SolveResult d = solve_box_bp(A, b, unit_box(50));
            same += (a.x - d.x).norm() < 1e-9;
            CHECK(relative_error(a.x, s.values) < 1e-6);
        }
        CHECK(same == 10);
    }
    SUBCASE("dense signals follow the mirrored branch") {
        for (int t = 0; t < 5; ++t) {
            const Matrix A = sample_gaussian_matrix(rng, 30, 50);
            const Signal s = sample_signal(rng, Alphabet::binary(), SupportProfile(50, {{1, 45}}));
            const SolveResult a = recover_binary_auto(A, A * s.values);
            CHECK(relative_error(a.x, s.values) < 1e-6);
        }
    }
}

TEST_CASE("rounding to the alphabet") {
    CHECK(round_to_alphabet(vec({0.49, 0.51}), Alphabet::binary()) == vec({0, 1}));
    CHECK(round_to_alphabet(vec({0.5}), Alphabet::binary()) == vec({0}));
    CHECK(round_to_alphabet(vec({-0.7, 0.2, 1.6}), Alphabet::ternary()) == vec({-1, 0, 1}));
    CHECK(round_to_alphabet(vec({-0.5, 1.5, -1.5, 7.0, -9.0}), Alphabet(-2, 3)) ==
          vec({0, 1, -1, 3, -2}));

    Rng rng(99);
    const Alphabet alpha(-2, 3);
    for (int t = 0; t < 1000; ++t) {
        Vector x0(6), xh(6);
        for (int i = 0; i < 6; ++i) {
            x0[i] = alpha.lower + static_cast<int>(rng() % static_cast<unsigned>(alpha.cardinality()));
            xh[i] = x0[i] + (rng.uniform01() - 0.5) * 0.999;
        }
        CHECK(round_to_alphabet(xh, alpha) == x0);
    }
}

TEST_CASE("denoise: large radius admits zero") {
    Rng rng(101);
    const Matrix A = sample_gaussian_matrix(rng, 8, 16);
    const Vector b = A * testing::indicator(16, {1, 4, 9});
    const SolveResult r = solve_box_bp_denoise(A, b, b.norm() * 1.01, unit_box(16));
    REQUIRE(r.optimal());
    CHECK(r.x.cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("denoise: zero radius delegates to the equality program") {
    Rng rng(102);
    const Matrix A = sample_gaussian_matrix(rng, 10, 20);
    const Vector b = A * testing::indicator(20, {0, 5, 7, 11});
    const SolveResult d = solve_box_bp_denoise(A, b, 0.0, unit_box(20));
    const SolveResult e = solve_box_bp(A, b, unit_box(20));
    REQUIRE(d.optimal());
    CHECK(std::abs(d.objective - e.objective) < 1e-6);
}

TEST_CASE("denoise: tiny radius is close to exact recovery") {
    Rng rng(103);
    for (int t = 0; t < 5; ++t) {
        const Matrix A = sample_gaussian_matrix(rng, 30, 50);
        const Signal s = sample_signal(rng, Alphabet::binary(), SupportProfile(50, {{1, 5}}));
        const Vector b = A * s.values;
        const SolveResult exact = solve_box_bp(A, b, unit_box(50), true);
        REQUIRE(exact.unique == Uniqueness::Unique);
        const SolveResult d = solve_box_bp_denoise(A, b, 1e-6, unit_box(50));
        REQUIRE(d.optimal());
        CHECK((d.x - exact.x).norm() < 1e-4);
        CHECK(d.equality_residual <= 1e-6 + 1e-6);
    }
}

TEST_CASE("denoise: agreement with a LASSO path oracle") {
    Rng rng(104);
    for (int t = 0; t < 10; ++t) {
        const int n = 4 + static_cast<int>(rng() % 6);
        const int m = 2 + static_cast<int>(rng() % 3);
        const Matrix A = sample_gaussian_matrix(rng, m, n);
        const bool bipolar = t % 2 == 1;
        const Box box = bipolar ? Box::uniform(n, -1, 1) : unit_box(n);
        Vector x0 = Vector::Zero(n);
        x0[0] = 1.0;
        if (bipolar) x0[1] = -1.0;
        const double eta = 0.05 + 0.2 * rng.uniform01();
        const Vector b = A * x0 + sample_sphere(rng, m, eta);
        const SolveResult r = solve_box_bp_denoise(A, b, eta, box);
        REQUIRE(r.optimal());
        CHECK(box.contains(r.x, 0.0));
        CHECK(r.equality_residual <= eta + 1e-6);
        const Vector ref = testing::denoise_by_lasso(A, b, eta, box.lower, box.upper);
        CAPTURE(t);
        CHECK(std::abs(r.objective - ref.lpNorm<1>()) < 1e-6);
    }
}

TEST_CASE("denoise: brute-force grid brackets the optimum for N = 3") {
    Rng rng(105);
    for (int t = 0; t < 3; ++t) {
        const Matrix A = sample_gaussian_matrix(rng, 2, 3);
        const Vector b = A * vec({1, 0, 1}) + sample_sphere(rng, 2, 0.2);
        const double eta = 0.2;
        const SolveResult r = solve_box_bp_denoise(A, b, eta, unit_box(3));
        REQUIRE(r.optimal());
        const int steps = 200;
        const double h = 1.0 / steps;
        const double slack = A.norm() * h * std::sqrt(3.0) / 2.0;
        double strict = kInf, relaxed = kInf;
        for (int i = 0; i <= steps; ++i) {
            for (int j = 0; j <= steps; ++j) {
                for (int k = 0; k <= steps; ++k) {
                    const Vector x = vec({i * h, j * h, k * h});
                    const double res = (A * x - b).norm();
                    const double obj = x.sum();
                    if (res <= eta) strict = std::min(strict, obj);
                    if (res <= eta + slack) relaxed = std::min(relaxed, obj);
                }
            }
        }
        CHECK(r.objective <= strict + 1e-7);
        CHECK(r.objective >= relaxed - 1.5 * h - 1e-7);
    }
}

TEST_CASE("denoise: an unreachable ball is infeasible") {
    const Matrix A = Matrix::Ones(1, 3);
    const SolveResult r = solve_box_bp_denoise(A, vec({10.0}), 1.0, unit_box(3));
    CHECK(r.status == SolveStatus::Infeasible);
    Matrix A2(2, 2);
    A2 << 1, 0, 1, 0;
    const SolveResult r2 = solve_box_bp_denoise(A2, vec({0.0, 5.0}), 0.5, unit_box(2));
    CHECK(r2.status == SolveStatus::Infeasible);
}
