#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "floq/berry.hpp"
#include "oracles.hpp"

using namespace floq::berry;
using floq::classical::FrequencyModel;
using floq::classical::make_classical_solution;
using floq::darboux::QuasiBasis;
using floq::elliptic::Lattice;
using doctest::Approx;
using cplx = std::complex<double>;

namespace {
const QuasiBasis& elliptic_basis() {
    static QuasiBasis basis(make_classical_solution(FrequencyModel::elliptic_model(
        oracle::kOmega0, Lattice(oracle::kLatticeP, oracle::kLatticeQ))));
    return basis;
}
}  // namespace

TEST_CASE("I_n: base values against the closed forms") {
    InFamily In(10);
    CHECK(In(0, 0.5) == Approx(oracle::kI0Half).epsilon(1e-14));
    // I_1(a) = 4 sqrt(pi) - 4a I_0(a)
    CHECK(In(1, 0.5) == Approx(4.0 * std::sqrt(std::numbers::pi) - 2.0 * oracle::kI0Half)
                            .epsilon(1e-13));
    CHECK(In(1, 0.5) == Approx(oracle::kI1Half).epsilon(1e-13));
    CHECK(In(2, 0.5) == Approx(oracle::kI2Half).epsilon(1e-12));
    CHECK(In(3, 0.5) == Approx(oracle::kI3Half).epsilon(1e-12));
}

TEST_CASE("I_n: recursion equals direct quadrature for n <= 10") {
    InFamily In(10);
    // Gauss-Legendre panels over [-12, 12]: the integrand decays like e^{-x^2}
    auto quad_In = [](int n, double a) {
        return floq::quad::composite(
            [&](double x) {
                std::vector<double> H(n + 1);
                floq::states::hermite_ladder(n, x, H);
                return H[n] * H[n] * std::exp(-x * x) / (x * x + a);
            },
            -12.0, 12.0, 48);
    };
    for (double a : {0.25, 0.5, 1.0, 2.0}) {
        for (int n = 0; n <= 10; ++n) {
            const double rec = In(n, a);
            const double qd = quad_In(n, a);
            CHECK(std::abs(rec - qd) / qd < 1e-8);
            CHECK(rec > 0.0);  // positive integrand
        }
    }
}

TEST_CASE("I_n: domain errors") {
    InFamily In(10);
    CHECK_THROWS_AS(In(0, -1.0), std::domain_error);
    CHECK_THROWS_AS(In(0, 0.0), std::domain_error);
    CHECK_THROWS_AS(InFamily(13), std::invalid_argument);  // int64 exactness guard
}

TEST_CASE("mean energy split: constant model has zero geometric part") {
    const auto sol = make_classical_solution(FrequencyModel::constant(0.5, 2.0));
    for (int n : {0, 3}) {
        const auto m = mean_energy_psi(n, 0.7, sol);
        CHECK(m.geometric == 0.0);
        // dynamical integrand reduces to the static mean energy (2n+1) w0
        CHECK(m.dynamical == Approx((2.0 * n + 1.0) * 0.5).epsilon(1e-13));
    }
}

TEST_CASE("mean energy integrand vs direct quadrature of <psi|i d_t psi>") {
    const auto& b = elliptic_basis();
    const double xmax = floq::states::default_xmax(b.sol, 3);
    for (int n : {0, 2}) {
        auto p = b.psi(n);
        for (int i = 0; i < 10; ++i) {
            const double t = 0.37 * i + 0.1;
            const auto m = mean_energy_psi(n, t, b.sol);
            const double numeric = mean_energy_numeric(p, t, xmax);
            CHECK(std::abs(numeric - (m.dynamical + m.geometric)) < 1e-6);
        }
    }
}

TEST_CASE("dynamical term integrates to E_n T over one period") {
    const auto& b = elliptic_basis();
    const double T = b.sol.period();
    const int n = 1;
    const double integral = floq::quad::composite(
        [&](double t) { return mean_energy_psi(n, t, b.sol).dynamical; }, 0.0, T, 64);
    CHECK(integral == Approx(floq::states::quasienergy(n, b.sol.delta()) * T).epsilon(1e-12));
}

TEST_CASE("beta0: constant model gives zero, elliptic benchmark -0.0149") {
    const auto flat = make_classical_solution(FrequencyModel::constant(0.5, 2.0));
    CHECK(std::abs(beta0(flat)) < 1e-14);

    const auto& b = elliptic_basis();
    const auto forms = beta0_forms(b.sol);
    CHECK(forms.primary == Approx(oracle::kBeta00).epsilon(1e-8));
    CHECK(forms.primary == Approx(-0.0149).epsilon(5e-4 / 0.0149));
    // two integral forms agree (integration by parts, gamma periodic)
    CHECK(std::abs(forms.primary - forms.by_parts) < 1e-8);
    // beta_0^0 <= 0 always
    CHECK(forms.primary < 0.0);
}

TEST_CASE("beta_n ladders: original and transformed") {
    InFamily In(10);
    const double b00 = oracle::kBeta00;
    CHECK(beta_n(1, System::original, b00, In) == Approx(3.0 * b00).epsilon(1e-14));
    // n = 0 transformed: beta00 (3 - (2/3) I_0(1/2)/sqrt(pi)); the
    // Hermite-normalized I is what the numeric oracle confirms
    const double expect =
        b00 * (3.0 - 2.0 / 3.0 * oracle::kI0Half / std::sqrt(std::numbers::pi));
    CHECK(beta_n(0, System::transformed_k2, b00, In) == Approx(expect).epsilon(1e-12));
    CHECK(beta_n(0, System::transformed_k2, b00, In) == Approx(-0.0316245).epsilon(1e-4));
    // constant model: every beta vanishes
    CHECK(beta_n(2, System::original, 0.0, In) == 0.0);
    CHECK(beta_n(2, System::transformed_k2, 0.0, In) == 0.0);
}

TEST_CASE("transformed mean-energy correction matches the I_n closed form pointwise") {
    const auto& b = elliptic_basis();
    InFamily In(6);
    const double xmax = floq::states::default_xmax(b.sol, 4);
    for (int n : {0, 1}) {
        auto psi = b.psi(n);
        floq::darboux::PhiK2 phi(b, n);
        for (double t : {0.41, 1.3, 2.2, 3.1, 3.7}) {
            const double lhs = mean_energy_numeric(phi, t, xmax) -
                               mean_energy_numeric(psi, t, xmax);
            const double g = b.sol.gamma(t);
            const double gd = b.sol.gamma_dot(t);
            const double gdd = b.sol.gamma_ddot(t);
            const double lg2 = (gdd * g - gd * gd) / (g * g);
            const double rhs = -(1.0 - In.normalized(n, 0.5) / (n + 3.0)) * g * lg2;
            CHECK(std::abs(lhs - rhs) < 1e-5);
        }
    }
}

TEST_CASE("berry_numeric on psi_n reproduces the closed-form split") {
    const auto& b = elliptic_basis();
    const double xmax = floq::states::default_xmax(b.sol, 3);
    for (int n : {0, 1}) {
        auto p = b.psi(n);
        const auto rep = berry_numeric(p, b.sol, n, System::original, xmax);
        const double expect_beta = (2.0 * n + 1.0) * oracle::kBeta00;
        CHECK(rep.beta == Approx(expect_beta).epsilon(1e-4 / std::abs(expect_beta)));
        CHECK(rep.chi == Approx(rep.dynamical + rep.beta));
        CHECK(rep.dynamical ==
              Approx(-floq::states::quasienergy(n, b.sol.delta()) * b.sol.period())
                  .epsilon(1e-12));
    }
}

TEST_CASE("berry_numeric on phi_n matches the transformed closed form to 1e-4") {
    const auto& b = elliptic_basis();
    InFamily In(6);
    const double xmax = floq::states::default_xmax(b.sol, 5);
    const double b00 = beta0(b.sol);
    for (int n : {0, 2}) {
        floq::darboux::PhiK2 phi(b, n);
        const auto rep = berry_numeric(phi, b.sol, n, System::transformed_k2, xmax);
        CHECK(std::abs(rep.beta - beta_n(n, System::transformed_k2, b00, In)) < 1e-4);
    }
}

TEST_CASE("berry_numeric on the created state: phase consistent with E = -5 delta/2") {
    const auto& b = elliptic_basis();
    floq::darboux::CreatedState v(b, 2);
    const double xmax = floq::states::default_xmax(b.sol, 6);
    const auto rep = berry_numeric(v, b.sol, -1, System::transformed_k2, xmax);
    // chi = -E T + beta with E = -5 delta / 2; beta is a small correction
    CHECK(rep.dynamical == Approx(2.5 * b.sol.delta() * b.sol.period()).epsilon(1e-12));
    CHECK(std::abs(rep.beta) < 0.1);
    CHECK(rep.chi == Approx(rep.dynamical + rep.beta));
}

TEST_CASE("beta is insensitive to a constant phase rotation of eps") {
    // gamma-only dependence: rebuild the solution from a rotated raw envelope
    // via the user-model path and compare beta0
    const auto& b = elliptic_basis();
    const auto model = b.sol.model();
    const auto user = FrequencyModel::user(
        [model](double t) { return model.omega_sq(t); }, model.period());
    const auto sol2 = make_classical_solution(user);
    CHECK(beta0(sol2) == Approx(beta0(b.sol)).epsilon(1e-7));
}
