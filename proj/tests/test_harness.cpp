#include "boxbp/harness.hpp"
#include "boxbp/statdim.hpp"

#include "doctest.h"

#include <cmath>
#include <map>
#include <sstream>

using namespace boxbp;

namespace {

std::vector<Rational> steps(int from, int to, int step, int den) {
    std::vector<Rational> out;
    for (int i = from; i <= to; i += step) out.push_back(Rational::parse(std::to_string(i) + "/" + std::to_string(den)));
    return out;
}

std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        for (std::size_t t = i; t <= j; ++t) r[idx[t]] = 0.5 * static_cast<double>(i + j) + 1.0;
        i = j + 1;
    }
    return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    const auto rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += rx[i] / n;
        my += ry[i] / n;
    }
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        rows.push_back(f);
    }
    return rows;
}

PhaseTable synthetic(const std::vector<std::tuple<int, int, int>>& kms, int trials) {
    PhaseTable t;
    for (auto [k, m, s] : kms) {
        PhaseCell c;
        c.k = k;
        c.m = m;
        c.trials = trials;
        c.successes = s;
        t.cells.push_back(c);
    }
    return t;
}

}  // namespace

TEST_CASE("rationals") {
    const Rational a = Rational::parse("0.02");
    CHECK(a.num == 1);
    CHECK(a.den == 50);
    CHECK(a.of(100) == 2);
    CHECK(Rational::parse("3/6").to_string() == "1/2");
    CHECK(Rational::parse("1").to_string() == "1");
    CHECK(Rational{1, 2}.of(5) == 3);
    CHECK(Rational{1, 3}.of(100) == 33);
    CHECK(Rational{2, 3}.of(100) == 67);
    CHECK_THROWS_AS(Rational::parse("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(Rational::parse("x"), std::invalid_argument);
    CHECK_THROWS_AS(Rational::parse("1/2/3"), std::invalid_argument);
    CHECK_THROWS_AS(Rational::parse(""), std::invalid_argument);
}

TEST_CASE("config JSON") {
    const auto c = PhaseGridConfig::from_json(R"({
        "N": 50, "alphabet": "0:2", "k_fractions": [0.1, "1/5", {"num": 3, "den": 10}],
        "m_fractions": {"from": "1/10", "to": 1, "step": 0.1},
        "level_ratio": 0.5, "trials": 4, "eta": 0.1, "rounding": true, "seed": 18446744073709551615,
        "success_tol": 1e-3, "program": "box"})");
    CHECK(c.N == 50);
    CHECK(c.alphabet == Alphabet(0, 2));
    CHECK(c.k_values() == std::vector<int>{5, 10, 15});
    CHECK(c.m_values().size() == 10);
    CHECK(c.m_values().back() == 50);
    CHECK(c.level_ratio.value() == 0.5);
    CHECK(c.seed == 18446744073709551615ULL);
    CHECK(c.rounding);
    const auto back = PhaseGridConfig::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());

    CHECK_THROWS_AS(PhaseGridConfig::from_json(R"({"N": 10, "bogus": 1})"), std::invalid_argument);
    CHECK_THROWS_AS(PhaseGridConfig::from_json(R"({"k_fractions": [1.5]})"), std::invalid_argument);
    CHECK_THROWS_AS(PhaseGridConfig::from_json(R"({"trials": 0})"), std::invalid_argument);
    CHECK_THROWS_AS(PhaseGridConfig::from_json(R"({"eta": -1})"), std::invalid_argument);
    CHECK_THROWS_AS(PhaseGridConfig::from_json(R"({"program": "mirrored", "alphabet": "-1:1"})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(PhaseGridConfig::from_json("{"), std::invalid_argument);
}

TEST_CASE("CSV layout and reproducibility across worker counts") {
    PhaseGridConfig c;
    c.N = 30;
    c.alphabet = Alphabet(-2, 2);
    c.level_ratio = 0.5;
    c.k_fractions = steps(1, 3, 1, 10);
    c.m_fractions = steps(3, 9, 3, 10);
    c.trials = 5;
    c.seed = 42;
    const std::string one = run_phase_grid(c, 1).to_csv();
    const std::string four = run_phase_grid(c, 4).to_csv();
    CHECK(one == four);
    const auto rows = csv_rows(one);
    REQUIRE(rows.size() == 1 + 9);
    CHECK(rows[0].size() == 12);
    std::string header;
    for (std::size_t i = 0; i < rows[0].size(); ++i) header += (i ? "," : "") + rows[0][i];
    CHECK(header == PhaseTable::kHeader);
    CHECK(rows[1][0] == "bf");
    CHECK(rows[1][2] == "3");
    CHECK(rows[1][3] == "k_hat=2;k_ext=1");
    CHECK(rows[1][11] == "42");

    c.seed = 43;
    CHECK(run_phase_grid(c, 1).to_csv() != one);
}

TEST_CASE("cells do not depend on the rest of the grid") {
    PhaseGridConfig c;
    c.N = 40;
    c.trials = 6;
    const PhaseTable a = run_cells(c, {{8, 20}});
    const PhaseTable b = run_cells(c, {{4, 12}, {8, 20}, {12, 30}});
    CHECK(a.cells[0].successes == b.find(8, 20)->successes);
    CHECK(a.cells[0].mean_rel_err == b.find(8, 20)->mean_rel_err);
}

TEST_CASE("binary cell well above the curve succeeds") {
    PhaseGridConfig c;
    c.N = 100;
    c.trials = 25;
    const PhaseTable t = run_cells(c, {{20, 60}});
    CHECK(delta_curve(CurveSpec::bin(100, 20)).delta < 60);
    CHECK(t.cells[0].success_rate() >= 0.95);
    CHECK(t.cells[0].failures == 0);
}

TEST_CASE("binary cell at the measurement bound succeeds with probability 1 - eps") {
    const double delta = delta_curve(CurveSpec::bin(100, 30)).delta;
    // 44.8 + 59.2 exceeds N here, so the count is capped at N.
    const int m = std::min(100, static_cast<int>(std::ceil(measurement_bound(delta, 100, 0.05))));
    PhaseGridConfig c;
    c.N = 100;
    c.trials = 50;
    CHECK(run_cells(c, {{30, m}}).cells[0].success_rate() >= 0.95);
}

TEST_CASE("ternary full support with 0.55 N measurements") {
    PhaseGridConfig c;
    c.N = 200;
    c.alphabet = Alphabet::ternary();
    c.trials = 20;
    CHECK(delta_curve(CurveSpec::ternary(200, 200)).delta == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(run_cells(c, {{200, 110}}).cells[0].success_rate() >= 0.9);
}

TEST_CASE("robustness grid with eta = 0 reproduces the phase grid") {
    PhaseGridConfig c;
    c.N = 40;
    c.k_fractions = steps(1, 3, 1, 10);
    c.m_fractions = steps(2, 8, 2, 10);
    c.trials = 4;
    CHECK(run_robustness_grid(c).to_csv() == run_phase_grid(c).to_csv());
}

TEST_CASE("huge noise makes zero feasible and recovery fails") {
    PhaseGridConfig c;
    c.N = 50;
    c.eta = 10.0;
    c.rounding = true;
    c.trials = 10;
    c.k_fractions = {Rational{1, 10}};
    c.m_fractions = {Rational{1, 2}};
    const PhaseTable t = run_robustness_grid(c);
    CHECK(t.cells[0].success_rate() <= 0.1);
    CHECK(t.cells[0].failures == 0);
}

TEST_CASE("noisy binary recovery with rounding at the noisy bound") {
    const double eta = 0.05;
    const int N = 60, k = 12;
    const double delta = delta_curve(CurveSpec::bin(N, k)).delta;
    const int m = static_cast<int>(std::min<long>(N, noisy_measurement_bound(delta, 0.05, 4 * eta)));
    PhaseGridConfig c;
    c.N = N;
    c.eta = eta;
    c.rounding = true;
    c.trials = 20;
    const PhaseTable t = run_cells(c, {{k, m}});
    CHECK(t.cells[0].success_rate() >= 0.9);
    CHECK(t.to_csv().find("# success: rounded estimate equals x0") != std::string::npos);
}

TEST_CASE("theory overlays") {
    const auto bin = csv_rows(emit_theory_overlay(CurveVariant::Bin, 1000));
    REQUIRE(bin.size() == 101);
    CHECK(bin[0][3] == "k_over_N");
    for (std::size_t i = 1; i < bin.size(); ++i) {
        const double f = std::stod(bin[i][3]);
        const double d = std::stod(bin[i][4]);
        if (f >= 0.5) CHECK(d == doctest::Approx(0.5).epsilon(1e-6));
        if (f < 0.5) CHECK(d < 0.5);
    }
    const auto ter = csv_rows(emit_theory_overlay(CurveVariant::BipolarTernary, 1000));
    for (std::size_t i = 1; i < ter.size(); ++i) {
        const double f = std::stod(ter[i][3]);
        if (f >= 2.0 / 3.0) CHECK(std::stod(ter[i][4]) == doctest::Approx(1.0 - f / 2.0).epsilon(1e-6));
    }
    const auto uf = csv_rows(emit_theory_overlay(CurveVariant::UnipolarFinite, 1000, 0.1));
    const auto pp = csv_rows(emit_theory_overlay(CurveVariant::PositiveL1, 1000));
    for (std::size_t i = 1; i < uf.size(); ++i) {
        const double u = std::stod(uf[i][4]);
        CHECK(u >= std::stod(bin[i][4]) - 1e-9);
        CHECK(u <= std::stod(pp[i][4]) + 1e-9);
    }
    CHECK_THROWS_AS(emit_theory_overlay(CurveVariant::Bin, 100, 1.5), std::invalid_argument);
}

TEST_CASE("transition location on synthetic tables") {
    const int T = 10;
    auto pts = empirical_transition_location(
        synthetic({{5, 10, 0}, {5, 20, 2}, {5, 30, 8}, {5, 40, 10}, {0, 10, 10}, {7, 10, 0}, {7, 20, 6},
                   {7, 30, 4}, {7, 40, 9}, {9, 10, 1}, {9, 20, 3}, {3, 10, 7}, {3, 20, 10}},
                  T));
    std::map<int, TransitionPoint> by_k;
    for (const auto& p : pts) by_k[p.k] = p;
    CHECK(by_k[0].flag == "trivial");
    CHECK(by_k[0].m_star == 0.0);
    CHECK(by_k[5].flag == "ok");
    CHECK(by_k[5].m_star == doctest::Approx(20.0 + 10.0 * 0.3 / 0.6));
    CHECK(by_k[7].flag == "nonmonotone");
    CHECK(by_k[7].m_star == doctest::Approx(10.0 + 10.0 * 0.5 / 0.6));
    CHECK(by_k[9].flag == "not_reached");
    CHECK(std::isnan(by_k[9].m_star));
    CHECK(by_k[3].flag == "starts_above");
    CHECK(by_k[3].m_star == 10.0);
    CHECK(transition_csv(pts).rfind("k,m_star,flag\n0,0,trivial\n", 0) == 0);
}

TEST_CASE("binary grid: monotone in m and transition near the curve") {
    PhaseGridConfig c;
    c.N = 100;
    c.k_fractions = {Rational{1, 10}, Rational{3, 10}, Rational{1, 2}};
    c.m_fractions = steps(5, 100, 5, 100);
    c.trials = 25;
    const PhaseTable t = run_phase_grid(c);
    for (int k : c.k_values()) {
        std::vector<double> ms, rates;
        for (const auto& cell : t.cells) {
            if (cell.k != k) continue;
            ms.push_back(cell.m);
            rates.push_back(cell.success_rate());
        }
        INFO("k = " << k);
        CHECK(spearman(ms, rates) >= 0.8);
    }
    for (const auto& p : empirical_transition_location(t)) {
        const double delta = delta_curve(CurveSpec::bin(100, p.k)).delta;
        INFO("k = " << p.k << " m* = " << p.m_star << " delta = " << delta);
        CHECK(std::abs(p.m_star - delta) <= 15.0);
    }
}

TEST_CASE("mirrored binary grid tracks the reflected curve") {
    PhaseGridConfig c;
    c.N = 100;
    c.program = GridProgram::MirroredAuto;
    c.k_fractions = {Rational{4, 5}};
    c.m_fractions = steps(5, 100, 5, 100);
    c.trials = 25;
    const PhaseTable t = run_phase_grid(c);
    const auto pts = empirical_transition_location(t);
    REQUIRE(pts.size() == 1);
    const double delta = delta_curve(CurveSpec::bin(100, 20)).delta;
    INFO("m* = " << pts[0].m_star << " delta = " << delta);
    CHECK(std::abs(pts[0].m_star - delta) <= 15.0);

    // Without mirroring the same supports need about N/2 measurements.
    c.program = GridProgram::Box;
    const auto direct = empirical_transition_location(run_phase_grid(c));
    CHECK(direct[0].m_star > pts[0].m_star + 10.0);
}

TEST_CASE("timing column is zero unless requested") {
    PhaseGridConfig c;
    c.N = 20;
    c.trials = 3;
    const PhaseTable off = run_cells(c, {{4, 10}});
    CHECK(off.cells[0].mean_runtime_ms == 0.0);
    CHECK(off.to_csv().find("timing=off") != std::string::npos);
    c.timing = true;
    CHECK(run_cells(c, {{4, 10}}).cells[0].mean_runtime_ms > 0.0);
}

TEST_CASE("invalid cells are rejected") {
    PhaseGridConfig c;
    c.N = 10;
    CHECK_THROWS_AS(run_cells(c, {{11, 5}}), std::invalid_argument);
    CHECK_THROWS_AS(run_cells(c, {{3, 0}}), std::invalid_argument);
}
