#include "floq/classical.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "floq/quadrature.hpp"

namespace floq::classical {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kStabilityBand = 1e-9;
using State4 = std::array<double, 4>;
}  // namespace

FrequencyModel FrequencyModel::constant(double omega0, double period) {
    if (!(omega0 > 0.0) || !(period > 0.0)) {
        throw std::invalid_argument("constant model: omega0 and period must be positive");
    }
    FrequencyModel m;
    m.v_ = Constant{omega0, period};
    return m;
}

FrequencyModel FrequencyModel::elliptic_model(double omega0, const elliptic::Lattice& lat) {
    auto cell = std::make_shared<const elliptic::WeierstrassCell>(lat);
    auto params = elliptic::solve_d(omega0, *cell);
    // omega^2 ranges over [omega0^2 - e2/2, omega0^2 - e3/2] on the real line
    const double min_w2 = omega0 * omega0 - cell->e2() / 2.0;
    if (!(min_w2 > 0.0)) {
        throw std::invalid_argument("elliptic model: omega(t)^2 not positive on the real line");
    }
    FrequencyModel m;
    m.v_ = Elliptic{params, std::move(cell)};
    return m;
}

FrequencyModel FrequencyModel::user(std::function<double(double)> omega_sq, double period) {
    if (!omega_sq || !(period > 0.0)) {
        throw std::invalid_argument("user model: callable and positive period required");
    }
    FrequencyModel m;
    m.v_ = User{std::move(omega_sq), period};
    return m;
}

double FrequencyModel::omega_sq(double t) const {
    if (const auto* c = as_constant()) return c->omega0 * c->omega0;
    if (const auto* e = as_elliptic()) {
        return e->params.omega0 * e->params.omega0 -
               0.5 * e->cell->wp(t + e->params.shift).real();
    }
    return as_user()->omega_sq(t);
}

double FrequencyModel::period() const {
    if (const auto* c = as_constant()) return c->period;
    if (const auto* e = as_elliptic()) return e->cell->lattice().real_period;
    return as_user()->period;
}

Monodromy integrate_classical(const FrequencyModel& model, double tol) {
    namespace ode = boost::numeric::odeint;
    auto sys = [&](const State4& y, State4& dy, double t) {
        const double w = 4.0 * model.omega_sq(t);
        dy[0] = y[1];
        dy[1] = -w * y[0];
        dy[2] = y[3];
        dy[3] = -w * y[2];
    };
    State4 y{1.0, 0.0, 0.0, 1.0};
    const double T = model.period();
    auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<State4>>(tol, tol);
    try {
        ode::integrate_adaptive(stepper, sys, y, 0.0, T, T / 1024.0);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("integrate_classical: integrator failure: ") +
                                 e.what());
    }
    Monodromy m;
    m << y[0], y[2], y[1], y[3];
    return m;
}

Stability classify_stability(const Monodromy& m) {
    const double det = m.determinant();
    if (std::abs(det - 1.0) > 1e-6) {
        throw std::invalid_argument("classify_stability: det(monodromy) != 1");
    }
    const double tr = std::abs(m.trace());
    if (std::abs(tr - 2.0) < kStabilityBand) return Stability::mixed;
    return tr < 2.0 ? Stability::stable : Stability::unstable;
}

FloquetExponent floquet_exponent(const Monodromy& m, double period) {
    if (std::abs(m.determinant() - 1.0) > 1e-6) {
        throw std::invalid_argument("floquet_exponent: det(monodromy) != 1");
    }
    if ((m - Monodromy::Identity()).cwiseAbs().maxCoeff() < kStabilityBand) {
        return {0.0, true};
    }
    const double tr = m.trace();
    if (std::abs(tr) >= 2.0 - kStabilityBand) {
        if (std::abs(tr) <= 2.0 + kStabilityBand) {
            return {tr > 0.0 ? 0.0 : kPi / period, true};
        }
        throw std::domain_error("floquet_exponent: unstable monodromy, no real exponent");
    }
    // eigenvalues e^{+-i theta}, theta in (0, pi)
    return {std::acos(tr / 2.0) / period, false};
}

WronskianNorm normalize_wronskian(complex eps_raw, complex eps_dot_raw) {
    const complex w = eps_dot_raw * std::conj(eps_raw) - eps_raw * std::conj(eps_dot_raw);
    const double scale = std::abs(eps_raw) * std::abs(eps_dot_raw);
    if (std::abs(w) < 1e-12 * std::max(1.0, scale)) {
        throw std::invalid_argument(
            "normalize_wronskian: Wronskian vanishes (not a complex Floquet pair)");
    }
    if (std::abs(w.real()) > 1e-9 * std::abs(w)) {
        throw std::invalid_argument("normalize_wronskian: Wronskian not purely imaginary");
    }
    return {1.0 / std::sqrt(2.0 * std::abs(w.imag())), w.imag() < 0.0};
}

// ---------------------------------------------------------------------------

struct ClassicalSolution::Impl {
    FrequencyModel model;
    double T = 0.0;
    double delta_w = 0.0;    // winding representative
    double delta_p = 0.0;    // principal monodromy representative
    Stability stab = Stability::stable;
    Monodromy mono = Monodromy::Identity();

    virtual ~Impl() = default;
    virtual complex eps(double t) const = 0;
    virtual complex eps_dot(double t) const = 0;
    virtual double gamma(double t) const = 0;
    virtual double gamma_dot(double t) const = 0;

    double gamma_ddot(double t) const {
        const complex ed = eps_dot(t);
        return 2.0 * std::norm(ed) - 8.0 * model.omega_sq(t) * gamma(t);
    }
};

complex ClassicalSolution::eps(double t) const { return impl_->eps(t); }
complex ClassicalSolution::eps_dot(double t) const { return impl_->eps_dot(t); }
double ClassicalSolution::gamma(double t) const { return impl_->gamma(t); }
double ClassicalSolution::gamma_dot(double t) const { return impl_->gamma_dot(t); }
double ClassicalSolution::gamma_ddot(double t) const { return impl_->gamma_ddot(t); }
double ClassicalSolution::omega_sq(double t) const { return impl_->model.omega_sq(t); }
double ClassicalSolution::period() const { return impl_->T; }
double ClassicalSolution::delta() const { return impl_->delta_w; }
double ClassicalSolution::delta_principal() const { return impl_->delta_p; }
Stability ClassicalSolution::stability() const { return impl_->stab; }
const Monodromy& ClassicalSolution::monodromy() const { return impl_->mono; }
const FrequencyModel& ClassicalSolution::model() const { return impl_->model; }

namespace {

struct ConstantImpl final : ClassicalSolution::Impl {
    double om0 = 0.0;

    complex eps(double t) const override {
        return std::polar(1.0 / std::sqrt(8.0 * om0), 2.0 * om0 * t);
    }
    complex eps_dot(double t) const override { return complex(0.0, 2.0 * om0) * eps(t); }
    double gamma(double) const override { return 1.0 / (8.0 * om0); }
    double gamma_dot(double) const override { return 0.0; }
};

struct EllipticImpl final : ClassicalSolution::Impl {
    std::shared_ptr<const elliptic::WeierstrassCell> cell;
    elliptic::EllipticEnvelopeParams par;
    double scale = 1.0;
    bool conj = false;
    double gfac = 0.0;   // scale^2 |sigma(d)|^2 e^{2 eta3 d}: gamma = gfac (wp(t+s) - wp(d))
    double wp_d = 0.0;

    complex eps(double t) const override {
        const complex v = scale * elliptic::epsilon_elliptic(t, par, *cell);
        return conj ? std::conj(v) : v;
    }
    complex eps_dot(double t) const override {
        const complex v = scale * elliptic::epsilon_elliptic(t, par, *cell) *
                          elliptic::epsilon_elliptic_dlog(t, par, *cell);
        return conj ? std::conj(v) : v;
    }
    double gamma(double t) const override {
        return gfac * (cell->wp(t + par.shift).real() - wp_d);
    }
    double gamma_dot(double t) const override {
        return gfac * cell->wp_prime(t + par.shift).real();
    }
};

struct TableImpl final : ClassicalSolution::Impl {
    // checkpoints of the real fundamental system over [0, T]
    int K = 0;
    double h = 0.0;
    std::vector<Eigen::Vector4d> nodes;    // y1, y1', y2, y2'
    std::vector<Eigen::Vector2d> second;   // y1'', y2''
    complex w0, w1;                        // Floquet eigenvector combination
    double scale = 1.0;
    bool conj = false;

    // cubic Hermite for value and slope on the checkpoint grid
    void raw(double t, complex& e, complex& ed) const {
        int j = static_cast<int>(t / h);
        if (j >= K) j = K - 1;
        if (j < 0) j = 0;
        const double s = (t - j * h) / h;
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s),
                     h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
        auto hermite = [&](double fa, double fb, double da, double db) {
            return h00 * fa + h * h10 * da + h01 * fb + h * h11 * db;
        };
        const auto &a = nodes[j], &b = nodes[j + 1];
        const auto &sa = second[j], &sb = second[j + 1];
        const double y1 = hermite(a[0], b[0], a[1], b[1]);
        const double y2 = hermite(a[2], b[2], a[3], b[3]);
        const double y1p = hermite(a[1], b[1], sa[0], sb[0]);
        const double y2p = hermite(a[3], b[3], sa[1], sb[1]);
        e = w0 * y1 + w1 * y2;
        ed = w0 * y1p + w1 * y2p;
    }

    void eval(double t, complex& e, complex& ed) const {
        const double w = std::floor(t / T);
        raw(t - w * T, e, ed);
        const complex fl = std::polar(1.0, delta_w * T * w);  // rho^w, winding branch
        e *= fl;
        ed *= fl;
        if (conj) {
            e = std::conj(e);
            ed = std::conj(ed);
        }
        e *= scale;
        ed *= scale;
    }

    complex eps(double t) const override {
        complex e, ed;
        eval(t, e, ed);
        return e;
    }
    complex eps_dot(double t) const override {
        complex e, ed;
        eval(t, e, ed);
        return ed;
    }
    double gamma(double t) const override { return std::norm(eps(t)); }
    double gamma_dot(double t) const override {
        complex e, ed;
        eval(t, e, ed);
        return 2.0 * (ed * std::conj(e)).real();
    }
};

double winding_delta(const ClassicalSolution::Impl& impl) {
    quad::Cumulative cum([&impl](double t) { return 1.0 / (4.0 * impl.gamma(t)); }, impl.T, 512);
    return cum.over_period() / impl.T;
}

}  // namespace

ClassicalSolution make_classical_solution(const FrequencyModel& model, double tol) {
    const double T = model.period();
    Monodromy mono = integrate_classical(model, tol);
    const Stability stab = classify_stability(mono);
    if (stab != Stability::stable) {
        throw std::domain_error(
            "make_classical_solution: model is not stable; no Floquet pair with Wronskian i/2");
    }
    const FloquetExponent fe = floquet_exponent(mono, T);

    if (const auto* c = model.as_constant()) {
        auto impl = std::make_shared<ConstantImpl>();
        impl->model = model;
        impl->T = T;
        impl->om0 = c->omega0;
        impl->mono = mono;
        impl->stab = stab;
        impl->delta_p = fe.delta;
        impl->delta_w = winding_delta(*impl);
        return ClassicalSolution(impl);
    }

    if (const auto* e = model.as_elliptic()) {
        auto impl = std::make_shared<EllipticImpl>();
        impl->model = model;
        impl->T = T;
        impl->cell = e->cell;
        impl->par = e->params;
        impl->mono = mono;
        impl->stab = stab;
        impl->delta_p = fe.delta;
        const complex e0 = elliptic::epsilon_elliptic(0.0, impl->par, *impl->cell);
        const complex ed0 = e0 * elliptic::epsilon_elliptic_dlog(0.0, impl->par, *impl->cell);
        const WronskianNorm nw = normalize_wronskian(e0, ed0);
        impl->scale = nw.scale;
        impl->conj = nw.conjugated;
        impl->wp_d = impl->cell->wp(impl->par.d).real();
        // sigma(w+v) sigma(w-v) = sigma(w)^2 sigma(v)^2 (wp(v) - wp(w)) gives
        // gamma in closed form through wp on the shifted line.
        const complex sd = impl->cell->sigma(impl->par.d);
        const complex g0 =
            std::norm(sd) * std::exp(2.0 * impl->cell->eta3() * impl->par.d);
        impl->gfac = nw.scale * nw.scale * g0.real();
        impl->delta_w = winding_delta(*impl);
        return ClassicalSolution(impl);
    }

    // user model: dense checkpoints of the real fundamental system
    namespace ode = boost::numeric::odeint;
    auto impl = std::make_shared<TableImpl>();
    impl->model = model;
    impl->T = T;
    impl->mono = mono;
    impl->stab = stab;
    impl->delta_p = fe.delta;
    impl->K = 4096;
    impl->h = T / impl->K;
    impl->nodes.resize(impl->K + 1);
    impl->second.resize(impl->K + 1);

    auto sys = [&model](const State4& y, State4& dy, double t) {
        const double w = 4.0 * model.omega_sq(t);
        dy[0] = y[1];
        dy[1] = -w * y[0];
        dy[2] = y[3];
        dy[3] = -w * y[2];
    };
    std::vector<double> times(impl->K + 1);
    for (int j = 0; j <= impl->K; ++j) times[j] = j * impl->h;
    State4 y{1.0, 0.0, 0.0, 1.0};
    auto stepper = ode::make_dense_output(tol, tol, ode::runge_kutta_dopri5<State4>());
    int idx = 0;
    ode::integrate_times(stepper, sys, y, times.begin(), times.end(), impl->h / 8.0,
                         [&](const State4& yy, double tt) {
                             impl->nodes[idx] = Eigen::Vector4d(yy[0], yy[1], yy[2], yy[3]);
                             const double w = 4.0 * model.omega_sq(tt);
                             impl->second[idx] = Eigen::Vector2d(-w * yy[0], -w * yy[2]);
                             ++idx;
                         });

    // complex Floquet combination: eigenvector of the monodromy for the
    // upper-half-plane multiplier
    const double tr = mono.trace();
    const double s = std::sqrt(std::max(0.0, 1.0 - tr * tr / 4.0));
    const complex rho(tr / 2.0, s);
    if (std::abs(mono(0, 1)) > std::abs(mono(1, 0))) {
        impl->w0 = mono(0, 1);
        impl->w1 = rho - mono(0, 0);
    } else {
        impl->w0 = rho - mono(1, 1);
        impl->w1 = mono(1, 0);
    }
    complex e0, ed0;
    impl->raw(0.0, e0, ed0);
    const WronskianNorm nw = normalize_wronskian(e0, ed0);
    impl->scale = nw.scale;
    impl->conj = nw.conjugated;
    impl->delta_w = winding_delta(*impl);
    return ClassicalSolution(impl);
}

}  // namespace floq::classical
