#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "floq/classical.hpp"
#include "oracles.hpp"

using namespace floq::classical;
using floq::elliptic::Lattice;
using doctest::Approx;
using cplx = std::complex<double>;

namespace {
FrequencyModel paper_model() {
    return FrequencyModel::elliptic_model(oracle::kOmega0,
                                          Lattice(oracle::kLatticeP, oracle::kLatticeQ));
}
}  // namespace

TEST_CASE("monodromy of the constant model: eigenvalues e^{+-2 i w0 T}") {
    const double om0 = 0.5, T = 2.0;
    const auto m = integrate_classical(FrequencyModel::constant(om0, T), 1e-12);
    CHECK(m.trace() == Approx(2.0 * std::cos(2.0 * om0 * T)).epsilon(1e-10));
    CHECK(m.determinant() == Approx(1.0).epsilon(1e-10));
    // closed form: y1 = cos(2 w0 t), y2 = sin(2 w0 t)/(2 w0)
    CHECK(m(0, 1) == Approx(std::sin(2.0 * om0 * T) / (2.0 * om0)).epsilon(1e-10));
}

TEST_CASE("monodromy of the elliptic benchmark: unit determinant, stable trace") {
    const auto m = integrate_classical(paper_model(), 1e-12);
    CHECK(std::abs(m.determinant() - 1.0) < 1e-10);
    CHECK(std::abs(m.trace()) < 2.0);
    CHECK(m.trace() == Approx(oracle::kMonodromyTrace).epsilon(1e-8));
}

TEST_CASE("classify_stability on constructed monodromies") {
    Monodromy stable;
    stable << 0.6, 0.8, -0.8, 0.6;  // trace 1.2, det 1
    CHECK(classify_stability(stable) == Stability::stable);

    Monodromy unstable;
    unstable << 2.0, 0.5, 0.0, 0.5;  // trace 2.5, det 1
    CHECK(classify_stability(unstable) == Stability::unstable);

    Monodromy boundary;
    boundary << 1.0 + 5e-13, 0.0, 0.0, 1.0 - 5e-13;  // trace within 1e-9 band of 2
    CHECK(classify_stability(boundary) == Stability::mixed);

    Monodromy bad;
    bad << 2.0, 0.0, 0.0, 2.0;  // det 4
    CHECK_THROWS_AS(classify_stability(bad), std::invalid_argument);
}

TEST_CASE("floquet_exponent: constant case is 2 w0 (principal)") {
    const double om0 = 0.5, T = 2.0;
    const auto m = integrate_classical(FrequencyModel::constant(om0, T), 1e-12);
    const auto fe = floquet_exponent(m, T);
    CHECK_FALSE(fe.degenerate);
    CHECK(fe.delta == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("floquet_exponent: identity monodromy is degenerate delta = 0") {
    const auto fe = floquet_exponent(Monodromy::Identity(), 2.0);
    CHECK(fe.degenerate);
    CHECK(fe.delta == 0.0);
}

TEST_CASE("floquet_exponent: unstable monodromy throws") {
    Monodromy m;
    m << 2.0, 0.5, 0.0, 0.5;
    CHECK_THROWS_AS(floquet_exponent(m, 2.0), std::domain_error);
}

TEST_CASE("two-route delta: monodromy vs closed-form winding, 1e-6") {
    const auto sol = make_classical_solution(paper_model());
    const double T = sol.period();
    const double w = std::fmod(sol.delta(), 2.0 * std::numbers::pi / T);
    const double principal = std::min(w, 2.0 * std::numbers::pi / T - w);
    CHECK(std::abs(principal - sol.delta_principal()) < 1e-6);
    CHECK(sol.delta() == Approx(oracle::kDeltaWinding).epsilon(1e-10));
}

TEST_CASE("normalize_wronskian: constant-model algebra") {
    const double om0 = 0.7;
    // raw pair e^{2 i w0 t}: W = 4 i w0, scale = 1/sqrt(8 w0)
    const cplx e0(1.0, 0.0), ed0(0.0, 2.0 * om0);
    const auto nw = normalize_wronskian(e0, ed0);
    CHECK_FALSE(nw.conjugated);
    CHECK(nw.scale == Approx(1.0 / std::sqrt(8.0 * om0)).epsilon(1e-14));
}

TEST_CASE("normalize_wronskian: conjugate swap and error paths") {
    const auto nw = normalize_wronskian(cplx(1.0, 0.0), cplx(0.0, -1.0));  // W = -2i
    CHECK(nw.conjugated);
    // real-proportional pair: W = 0
    CHECK_THROWS_AS(normalize_wronskian(cplx(1.0, 0.0), cplx(0.5, 0.0)), std::invalid_argument);
}

TEST_CASE("constant solution: eps, gamma, delta closed forms") {
    const double om0 = 0.5, T = 2.0;
    const auto sol = make_classical_solution(FrequencyModel::constant(om0, T));
    CHECK(sol.delta() == Approx(2.0 * om0).epsilon(1e-12));
    CHECK(sol.gamma(0.3) == Approx(1.0 / (8.0 * om0)).epsilon(1e-14));
    CHECK(sol.gamma_dot(0.3) == 0.0);
    const cplx expect = std::polar(1.0 / std::sqrt(8.0 * om0), 2.0 * om0 * 0.9);
    CHECK(std::abs(sol.eps(0.9) - expect) < 1e-14);
}

TEST_CASE("elliptic solution: Wronskian i/2 at 20 sample times") {
    const auto sol = make_classical_solution(paper_model());
    for (int i = 0; i < 20; ++i) {
        const double t = -2.0 + 0.43 * i;
        const cplx e = sol.eps(t), ed = sol.eps_dot(t);
        const cplx w = ed * std::conj(e) - e * std::conj(ed);
        CHECK(std::abs(w - cplx(0.0, 0.5)) < 1e-10);
    }
}

TEST_CASE("elliptic solution: benchmark values") {
    const auto sol = make_classical_solution(paper_model());
    CHECK(sol.gamma(0.0) == Approx(oracle::kGamma0).epsilon(1e-12));
    CHECK(sol.eps(0.0).real() == Approx(oracle::kEps0).epsilon(1e-12));
    CHECK(std::abs(sol.eps(0.0).imag()) < 1e-13);
    CHECK(std::abs(sol.eps(1.3) - oracle::kEps13) < 1e-12);
    CHECK(sol.stability() == Stability::stable);
}

TEST_CASE("elliptic solution: gamma periodic, positive; Floquet factor") {
    const auto sol = make_classical_solution(paper_model());
    const double T = sol.period();
    for (int i = 0; i < 12; ++i) {
        const double t = 0.37 * i - 1.0;
        CHECK(sol.gamma(t) > 0.0);
        CHECK(sol.gamma(t + T) == Approx(sol.gamma(t)).epsilon(1e-10));
        const cplx fl = sol.eps(t + T) / sol.eps(t);
        CHECK(std::abs(fl - std::polar(1.0, sol.delta() * T)) < 1e-10);
    }
}

TEST_CASE("gamma_dot and gamma_ddot are consistent with finite differences") {
    const auto sol = make_classical_solution(paper_model());
    const double h = 1e-4;
    for (double t : {0.21, 1.9, 3.3}) {
        const double fd1 = (sol.gamma(t + h) - sol.gamma(t - h)) / (2.0 * h);
        CHECK(sol.gamma_dot(t) == Approx(fd1).epsilon(1e-6));
        const double fd2 = (sol.gamma(t + h) - 2.0 * sol.gamma(t) + sol.gamma(t - h)) / (h * h);
        CHECK(sol.gamma_ddot(t) == Approx(fd2).epsilon(1e-5));
    }
}

TEST_CASE("user-model path reproduces the constant closed form") {
    const double om0 = 0.5, T = 2.0;
    const auto user = FrequencyModel::user([om0](double) { return om0 * om0; }, T);
    const auto sol = make_classical_solution(user);
    const auto ref = make_classical_solution(FrequencyModel::constant(om0, T));
    CHECK(sol.delta() == Approx(ref.delta()).epsilon(1e-10));
    for (double t : {0.0, 0.5, 1.7, 3.4, -1.2}) {
        CHECK(sol.gamma(t) == Approx(ref.gamma(t)).epsilon(1e-9));
        // envelopes agree up to a constant phase
        const cplx r = sol.eps(t) / ref.eps(t);
        const cplx r0 = sol.eps(0.0) / ref.eps(0.0);
        CHECK(std::abs(r - r0) < 1e-8);
    }
}

TEST_CASE("user-model path reproduces the elliptic closed form") {
    const auto model = paper_model();
    const auto user = FrequencyModel::user([model](double t) { return model.omega_sq(t); },
                                           model.period());
    const auto sol = make_classical_solution(user);
    const auto ref = make_classical_solution(model);
    CHECK(sol.delta() == Approx(ref.delta()).epsilon(1e-9));
    for (double t : {0.3, 1.1, 2.6, 3.9}) {
        CHECK(sol.gamma(t) == Approx(ref.gamma(t)).epsilon(1e-8));
        CHECK(sol.gamma_dot(t) == Approx(ref.gamma_dot(t)).epsilon(1e-6));
    }
}

TEST_CASE("unstable model is rejected with a clean error") {
    // parametric resonance: forcing at twice the natural frequency
    const double om0 = 0.5;
    const double T = std::numbers::pi;
    const auto model = FrequencyModel::user(
        [om0](double t) { return om0 * om0 * (1.0 + 0.8 * std::cos(2.0 * t)); }, T);
    const auto m = integrate_classical(model, 1e-10);
    CHECK(classify_stability(m) == Stability::unstable);
    CHECK_THROWS_AS(make_classical_solution(model), std::domain_error);
}

TEST_CASE("frequency model invariants: periodicity and positivity checks") {
    const auto model = paper_model();
    const double T = model.period();
    CHECK(T == Approx(4.0));
    for (int i = 0; i < 16; ++i) {
        const double t = -3.0 + 0.41 * i;
        CHECK(model.omega_sq(t + T) == Approx(model.omega_sq(t)).epsilon(1e-12));
        CHECK(model.omega_sq(t) > 0.0);
    }
    CHECK_THROWS_AS(FrequencyModel::constant(-1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(FrequencyModel::user(nullptr, 2.0), std::invalid_argument);
}
