#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rmimo/optimizer.hpp"

using namespace rmimo;

namespace {

Scenario desk_scenario() {
    Scenario sc;
    sc.n_tx = 2;
    sc.n_rx = 2;
    sc.n_samples = 4;
    sc.energy = 8.0;
    sc.snr_db = -15.0;
    sc.interferers = {{0, -40.0, 30.0}, {0, 50.0, 30.0}};
    sc.sector = {0.0, 10.0};
    return sc;
}

MatrixXcd rank_one_init(int n, std::uint64_t seed) {
    ComplexGaussian rng(seed);
    VectorXcd w = rng.vector(n);
    w.normalize();
    return w * w.adjoint();
}

} // namespace

TEST_CASE("u_step: grid verification and E-monotonicity") {
    Scenario sc = desk_scenario();
    sc.interferers.resize(1);
    const MatrixXcd v0 = rank_one_init(sc.rx_dim(), 11);

    auto [x, t] = u_step(v0, sc);
    CHECK(t > 0.0);
    CHECK(std::real(x.trace()) ==
          doctest::Approx(sc.energy).epsilon(1e-10));
    CHECK(hermitian_eig(x).eigenvalues.minCoeff() > -1e-7 * sc.energy);

    const double grid = worst_case_sinr({x, v0}, sc);
    CHECK(grid >= t - 1e-5 * std::max(1.0, t));
    CHECK(std::abs(grid - t) <= std::max(1e-5, 3e-8) * t);

    Scenario big = sc;
    big.energy = 2.0 * sc.energy;
    auto [x2, t2] = u_step(v0, big);
    CHECK(t2 >= t - 1e-9);
}

TEST_CASE("v_step: monotone half-step and trace precondition") {
    const Scenario sc = desk_scenario();
    const MatrixXcd v0 = rank_one_init(sc.rx_dim(), 23);
    auto [x, t_u] = u_step(v0, sc);
    auto [v, t_v] = v_step(x, sc);
    CHECK(t_v >= t_u - 1e-6);
    const double grid = worst_case_sinr({x, v}, sc);
    CHECK(std::abs(grid - t_v) <= 1e-4 * t_v);

    CHECK_THROWS_AS(v_step(MatrixXcd(0.5 * x), sc), std::invalid_argument);
}

TEST_CASE("cyclic_design: monotone convergence on the desk scenario") {
    const Scenario sc = desk_scenario();
    auto [pair, rep] = cyclic_design(sc, rank_one_init(sc.rx_dim(), 3));
    REQUIRE(rep.terminal_status != TerminalStatus::solver_failure);
    REQUIRE(!rep.t_history.empty());
    for (std::size_t i = 1; i < rep.t_history.size(); ++i)
        CHECK(rep.t_history[i] >= rep.t_history[i - 1] - 1e-6);
    CHECK(rep.converged);
    CHECK(rep.iterations <= 150);

    const double grid = worst_case_sinr(pair, sc);
    CHECK(std::abs(grid - rep.t_history.back()) <=
          1e-4 * rep.t_history.back());
    CHECK(std::real(pair.x.trace()) ==
          doctest::Approx(sc.energy).epsilon(1e-8));
}

TEST_CASE("cyclic_design: rejects the known-angle case") {
    Scenario sc = desk_scenario();
    sc.sector.half_width_deg = 0.0;
    CHECK_THROWS_AS(cyclic_design(sc, rank_one_init(sc.rx_dim(), 1)),
                    std::invalid_argument);
}

TEST_CASE("cyclic_design: tiny sector approaches the matched ceiling") {
    Scenario sc = desk_scenario();
    sc.interferers.clear();
    sc.sector = {0.0, 0.5};
    auto [pair, rep] = cyclic_design(sc, rank_one_init(sc.rx_dim(), 7));
    REQUIRE(rep.terminal_status != TerminalStatus::solver_failure);
    const double ceiling_db = linear_to_db(
        sc.snr_linear() * sc.energy * sc.n_tx * sc.n_rx);
    const double final_db = linear_to_db(rep.t_history.back());
    CHECK(final_db <= ceiling_db + 1e-6);
    CHECK(final_db >= ceiling_db - 0.5);
}

TEST_CASE("worst_case_sinr: point case and grid bound") {
    Scenario sc = desk_scenario();
    sc.sector.half_width_deg = 0.0;
    ComplexGaussian rng(31);
    VectorXcd s = rng.vector(sc.tx_dim());
    s *= std::sqrt(sc.energy) / s.norm();
    const VectorXcd w = rng.vector(sc.rx_dim());
    const DesignPair pair{s * s.adjoint(), w * w.adjoint()};
    const double point = worst_case_sinr(pair, sc);
    CHECK(linear_to_db(point) ==
          doctest::Approx(sinr_vectors(s, w, 0.0, sc)).epsilon(1e-10));

    Scenario wide = desk_scenario();
    const double worst = worst_case_sinr(pair, wide);
    CHECK(worst <= worst_case_sinr(pair, wide, 1) + 1e-12);
}

TEST_CASE("spread_metric") {
    CHECK(spread_metric({1.0, 2.0, 3.0}) == doctest::Approx(1.0));
    CHECK(spread_metric({5.0}) == 0.0);
    CHECK_THROWS_AS(spread_metric({}), std::invalid_argument);
}

TEST_CASE("multi_start: single start has zero variation") {
    const Scenario sc = desk_scenario();
    const MultiStartResult res = multi_start(sc, 1, 99);
    CHECK(res.all_t.size() == 1);
    CHECK(res.variation == 0.0);
    CHECK(res.best_worst_case == doctest::Approx(res.all_t[0]));
}

TEST_CASE("nonrobust_design: matched-filter optimum without interference") {
    Scenario sc = desk_scenario();
    sc.interferers.clear();
    sc.sector.half_width_deg = 0.0;
    const NonrobustResult res = nonrobust_design(sc);
    const double expect =
        sc.snr_linear() * sc.energy * sc.n_tx * sc.n_rx;
    CHECK(db_to_linear(res.sinr_db) ==
          doctest::Approx(expect).epsilon(1e-6));
    for (std::size_t i = 1; i < res.sinr_history.size(); ++i)
        CHECK(res.sinr_history[i] >= res.sinr_history[i - 1] - 1e-9);
}

TEST_CASE("nonrobust_design: monotone with interference") {
    Scenario sc = desk_scenario();
    sc.sector.half_width_deg = 0.0;
    const NonrobustResult res = nonrobust_design(sc);
    CHECK(res.s.squaredNorm() == doctest::Approx(sc.energy).epsilon(1e-10));
    for (std::size_t i = 1; i < res.sinr_history.size(); ++i)
        CHECK(res.sinr_history[i] >= res.sinr_history[i - 1] - 1e-9);
    // the filter suppresses the interference: better than the naive matched
    // filter applied in the same scene
    const MatrixXcd a = target_operator(0.0, sc);
    const VectorXcd w_mf = a * res.s;
    CHECK(res.sinr_db >= sinr_vectors(res.s, w_mf, 0.0, sc) - 1e-9);
}
