#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rmimo/lifting.hpp"
#include "rmimo/model.hpp"

#include <numbers>

using namespace rmimo;

namespace {

constexpr double kPi = std::numbers::pi;

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

VectorXcd random_unit_energy(int n, double energy, std::uint64_t seed) {
    ComplexGaussian rng(seed);
    VectorXcd s = rng.vector(n);
    return std::sqrt(energy) * s / s.norm();
}

} // namespace

TEST_CASE("steering vectors") {
    const VectorXcd a0 = transmit_steering(0.0, 4);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(a0(i) - Complex(1, 0)) < 1e-15);

    const VectorXcd a30 = transmit_steering(30.0, 3);
    CHECK(std::abs(a30(0) - Complex(1, 0)) < 1e-12);
    CHECK(std::abs(a30(1) - Complex(0, 1)) < 1e-12);
    CHECK(std::abs(a30(2) - Complex(-1, 0)) < 1e-12);

    const VectorXcd am30 = receive_steering(-30.0, 2);
    CHECK(std::abs(am30(1) - Complex(0, -1)) < 1e-12);

    // unit modulus, exact squared norm
    const VectorXcd a = transmit_steering(17.3, 5);
    for (int i = 0; i < 5; ++i)
        CHECK(std::abs(a(i)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(a.squaredNorm() == doctest::Approx(5.0).epsilon(1e-14));

    CHECK_THROWS_AS(transmit_steering(90.0, 3), std::invalid_argument);
}

TEST_CASE("shift_matrix") {
    CHECK((shift_matrix(0, 4) - MatrixXd::Identity(4, 4)).norm() == 0.0);

    const MatrixXd j1 = shift_matrix(1, 3);
    MatrixXd expect = MatrixXd::Zero(3, 3);
    expect(1, 0) = 1.0;
    expect(2, 1) = 1.0;
    CHECK((j1 - expect).norm() == 0.0);

    const MatrixXd jm2 = shift_matrix(-2, 3);
    CHECK(jm2.sum() == 1.0);
    CHECK(jm2(0, 2) == 1.0);

    CHECK_THROWS_AS(shift_matrix(3, 3), std::out_of_range);
    CHECK_THROWS_AS(shift_matrix(-5, 3), std::out_of_range);

    // transpose identity J_r^T = J_{-r}
    for (int r = -2; r <= 2; ++r)
        CHECK((shift_matrix(r, 4).transpose() - shift_matrix(-r, 4)).norm() ==
              0.0);
}

TEST_CASE("target_operator structure") {
    Scenario sc;
    sc.n_tx = 1;
    sc.n_rx = 1;
    sc.n_samples = 1;
    CHECK(std::abs(target_operator(25.0, sc)(0, 0) - Complex(1, 0)) < 1e-15);

    Scenario sc2 = desk_scenario();
    const MatrixXcd a = target_operator(0.0, sc2);
    for (int n = 0; n < sc2.n_samples; ++n)
        CHECK((a.block(n * sc2.n_rx, n * sc2.n_tx, sc2.n_rx, sc2.n_tx) -
               MatrixXcd::Ones(sc2.n_rx, sc2.n_tx))
                  .norm() < 1e-14);
}

TEST_CASE("target_operator: bilinear form matches unvectorized model") {
    const Scenario sc = desk_scenario();
    const double theta = 12.5;
    const VectorXcd s = random_unit_energy(sc.tx_dim(), sc.energy, 11);
    const VectorXcd w = random_unit_energy(sc.rx_dim(), 1.0, 12);
    const Complex via_a = w.adjoint() * target_operator(theta, sc) * s;

    // trace form over the matrix-valued model: w^H A s = sum_n w_n^H a_r a_t^T s_n
    const VectorXcd ar = receive_steering(theta, sc.n_rx);
    const VectorXcd at = transmit_steering(theta, sc.n_tx);
    Complex direct = 0.0;
    for (int n = 0; n < sc.n_samples; ++n) {
        const VectorXcd sn = s.segment(n * sc.n_tx, sc.n_tx);
        const VectorXcd wn = w.segment(n * sc.n_rx, sc.n_rx);
        direct += Complex(wn.adjoint() * ar) * Complex(at.transpose() * sn);
    }
    CHECK(std::abs(via_a - direct) < 1e-12 * std::abs(direct));
}

TEST_CASE("interferer_operator") {
    const Scenario sc = desk_scenario();
    const Interferer at_zero{0, 13.0, 20.0};
    CHECK((interferer_operator(at_zero, sc) - target_operator(13.0, sc)).norm() <
          1e-14);

    CHECK_THROWS_AS(interferer_operator(Interferer{4, 0.0, 0.0}, sc),
                    std::out_of_range);
}

TEST_CASE("interferer_operator: convolution structure on impulse waveform") {
    // One-sample-delayed interferer contribution lands where J^T routes it.
    Scenario sc = desk_scenario();
    sc.n_samples = 2;
    const Interferer intf{1, 25.0, 0.0};
    const MatrixXcd b = interferer_operator(intf, sc);
    // impulse in the second waveform sample; the matrix model
    // Y = a_r a_t^T S J_1 routes it into the first received sample
    VectorXcd s = VectorXcd::Zero(sc.tx_dim());
    s(sc.n_tx) = std::sqrt(sc.energy);
    const VectorXcd y = b * s;
    const VectorXcd ar = receive_steering(25.0, sc.n_rx);
    const VectorXcd at = transmit_steering(25.0, sc.n_tx);
    const MatrixXcd ymat = ar * at.transpose() *
                           (MatrixXcd(sc.n_tx, 2) << VectorXcd::Zero(sc.n_tx),
                            s.segment(sc.n_tx, sc.n_tx))
                               .finished() *
                           shift_matrix(1, 2).cast<Complex>();
    VectorXcd yvec(sc.rx_dim());
    yvec << ymat.col(0), ymat.col(1);
    CHECK((y - yvec).norm() < 1e-12 * yvec.norm());
}

TEST_CASE("sinr_vectors: matched filter without interference") {
    Scenario sc = desk_scenario();
    sc.interferers.clear();
    // optimal s: principal eigenvector of A^H A scaled to energy E
    const MatrixXcd a = target_operator(0.0, sc);
    const auto eig = hermitian_eig(MatrixXcd(a.adjoint() * a));
    const VectorXcd s = std::sqrt(sc.energy) * eig.eigenvectors.col(0);
    const VectorXcd w = a * s;
    const double sinr = sinr_vectors(s, w, 0.0, sc);
    const double bound = linear_to_db(sc.snr_linear() * sc.energy * sc.n_tx * sc.n_rx);
    CHECK(sinr == doctest::Approx(bound).epsilon(1e-9));
}

TEST_CASE("sinr_vectors: scale and phase invariance") {
    const Scenario sc = desk_scenario();
    const VectorXcd s = random_unit_energy(sc.tx_dim(), sc.energy, 21);
    const VectorXcd w = random_unit_energy(sc.rx_dim(), 2.0, 22);
    const double base = sinr_vectors(s, w, 3.0, sc);
    CHECK(sinr_vectors(s, VectorXcd(2.7 * w), 3.0, sc) ==
          doctest::Approx(base).epsilon(1e-12));
    const Complex rot = std::polar(1.0, 0.77);
    CHECK(sinr_vectors(rot * s, rot * w, 3.0, sc) ==
          doctest::Approx(base).epsilon(1e-12));

    CHECK_THROWS_AS(sinr_vectors(s, VectorXcd::Zero(sc.rx_dim()), 3.0, sc),
                    std::invalid_argument);
}

TEST_CASE("sinr_vectors agrees with lifted evaluation through G") {
    const Scenario sc = desk_scenario();
    const SteeringLift lift = build_lift(sc.n_tx, sc.n_rx);
    for (int trial = 0; trial < 20; ++trial) {
        const VectorXcd s = random_unit_energy(sc.tx_dim(), sc.energy, 100 + trial);
        const VectorXcd w = random_unit_energy(sc.rx_dim(), 1.5, 200 + trial);
        const double theta = -35.0 + 70.0 * trial / 19.0;
        const MatrixXcd x = s * s.adjoint();
        const MatrixXcd v = w * w.adjoint();
        const MatrixXcd g = g_matrix(x, v, lift);
        const double nu = kPi * std::sin(theta * kPi / 180.0);
        const VectorXcd p = nu_vector(nu, lift.poly_len());
        const double num = std::real(Complex(p.adjoint() * g * p));
        const double lifted =
            linear_to_db(sc.snr_linear() * num / denominator(x, v, sc));
        CHECK(lifted == doctest::Approx(sinr_vectors(s, w, theta, sc))
                            .epsilon(1e-10));
    }
}

TEST_CASE("interference covariance identities") {
    Scenario sc = desk_scenario();
    SUBCASE("no interference gives zero") {
        Scenario sc0 = sc;
        sc0.interferers.clear();
        const MatrixXcd v = MatrixXcd::Identity(sc0.rx_dim(), sc0.rx_dim());
        CHECK(interference_cov_from_V(v, sc0).norm() == 0.0);
        const MatrixXcd x = MatrixXcd::Identity(sc0.tx_dim(), sc0.tx_dim());
        CHECK(interference_cov_from_X(x, sc0).norm() == 0.0);
    }
    SUBCASE("trace identity with vector forms") {
        for (int trial = 0; trial < 10; ++trial) {
            const VectorXcd s =
                random_unit_energy(sc.tx_dim(), sc.energy, 300 + trial);
            const VectorXcd w = random_unit_energy(sc.rx_dim(), 1.0, 400 + trial);
            const MatrixXcd x = s * s.adjoint();
            const MatrixXcd v = w * w.adjoint();
            const double lhs =
                std::real((interference_cov_from_V(v, sc) * x).trace());
            const double rhs = std::real(
                Complex(w.adjoint() * interference_cov_from_s(s, sc) * w));
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        }
    }
    SUBCASE("linearity in INR") {
        Scenario twice = sc;
        for (auto& k : twice.interferers) k.inr_db += linear_to_db(2.0);
        const MatrixXcd v =
            MatrixXcd::Identity(sc.rx_dim(), sc.rx_dim());
        CHECK((interference_cov_from_V(v, twice) -
               2.0 * interference_cov_from_V(v, sc))
                  .norm() < 1e-9);
    }
}

TEST_CASE("beampattern: bounded by 0 dB, peak at matched design") {
    Scenario sc = desk_scenario();
    sc.interferers.clear();
    const MatrixXcd a = target_operator(0.0, sc);
    const auto eig = hermitian_eig(MatrixXcd(a.adjoint() * a));
    const VectorXcd s = std::sqrt(sc.energy) * eig.eigenvectors.col(0);
    const VectorXcd w = a * s;
    std::vector<double> grid;
    for (int i = -80; i <= 80; i += 5) grid.push_back(i);
    grid.push_back(0.0);
    const auto bp = beampattern(s, w, grid, sc);
    for (double v : bp) CHECK(v <= 1e-9);
    CHECK(bp.back() == doctest::Approx(0.0).epsilon(1e-9));

    CHECK_THROWS_AS(beampattern(VectorXcd::Zero(sc.tx_dim()), w, grid, sc),
                    std::invalid_argument);
}

TEST_CASE("scenario validation") {
    Scenario sc = desk_scenario();
    CHECK_NOTHROW(sc.validate());
    Scenario bad = sc;
    bad.interferers[0].range_offset = 4;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = sc;
    bad.sector = {85.0, 10.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = sc;
    bad.energy = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
