#include "floq/berry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "floq/quadrature.hpp"

namespace floq::berry {

namespace {
constexpr double kSqrtPi = 1.7724538509055160273;
using darboux::IntPoly;

IntPoly add(const IntPoly& a, const IntPoly& b) {
    IntPoly r;
    r.c.assign(std::max(a.c.size(), b.c.size()), 0);
    for (std::size_t j = 0; j < a.c.size(); ++j) r.c[j] += a.c[j];
    for (std::size_t j = 0; j < b.c.size(); ++j) r.c[j] += b.c[j];
    return r;
}
IntPoly scale(std::int64_t s, const IntPoly& a) {
    IntPoly r = a;
    for (auto& v : r.c) v *= s;
    return r;
}
IntPoly shift_up(const IntPoly& a) {  // multiply by the variable
    IntPoly r;
    r.c.assign(a.c.size() + 1, 0);
    for (std::size_t j = 0; j < a.c.size(); ++j) r.c[j + 1] = a.c[j];
    return r;
}
}  // namespace

InFamily::InFamily(int nmax) {
    if (nmax < 0 || nmax > 12) {
        throw std::invalid_argument("InFamily: exact int64 coefficients support n <= 12");
    }
    P_.resize(nmax + 1);
    Q_.resize(nmax + 1);
    Q_[0].c = {1};
    P_[0].c = {0};
    if (nmax >= 1) {
        Q_[1].c = {0, -4};
        P_[1].c = {4};
    }
    for (int n = 2; n <= nmax; ++n) {
        const IntPoly& Qm = Q_[n - 1];
        const IntPoly& Pm = P_[n - 1];
        const std::int64_t w = 4ll * (n - 1) * (n - 1);
        // I_n = -2 I_{n-1} + 4(n-1)^2 I_{n-2} - 4a I'_{n-1}
        // 4a I'_{n-1} = (4a Q' + 4a Q - 2 Q) I0 + (4a P' - 4 Q) sqrt(pi)
        Q_[n] = add(add(scale(-2, Qm), scale(w, Q_[n - 2])),
                    add(scale(-4, shift_up(Qm.derivative())),
                        add(scale(-4, shift_up(Qm)), scale(2, Qm))));
        P_[n] = add(add(scale(-2, Pm), scale(w, P_[n - 2])),
                    add(scale(-4, shift_up(Pm.derivative())), scale(4, Qm)));
    }
}

double InFamily::I0(double a) {
    if (!(a > 0.0)) throw std::domain_error("I_n(a): a must be positive");
    return std::numbers::pi / std::sqrt(a) * std::exp(a) * std::erfc(std::sqrt(a));
}

double InFamily::operator()(int n, double a) const {
    if (n < 0 || n >= int(P_.size())) throw std::invalid_argument("InFamily: n out of range");
    if (!(a > 0.0)) throw std::domain_error("I_n(a): a must be positive");
    return Q_[n].eval(a) * I0(a) + P_[n].eval(a) * kSqrtPi;
}

double InFamily::normalized(int n, double a) const {
    double hermite_norm = kSqrtPi;  // 2^n n! sqrt(pi)
    for (int j = 1; j <= n; ++j) hermite_norm *= 2.0 * j;
    return (*this)(n, a) / hermite_norm;
}

MeanEnergySplit mean_energy_psi(int n, double t, const ClassicalSolution& sol) {
    const double g = sol.gamma(t);
    const double gd = sol.gamma_dot(t);
    const double gdd = sol.gamma_ddot(t);
    const double lg2 = (gdd * g - gd * gd) / (g * g);  // (ln gamma)''
    MeanEnergySplit r;
    r.dynamical = (2.0 * n + 1.0) / (8.0 * g);
    r.geometric = -0.5 * g * (2.0 * n + 1.0) * lg2;
    return r;
}

MeanEnergySplit mean_energy_phi(int n, double t, const ClassicalSolution& sol,
                                const InFamily& In) {
    MeanEnergySplit r = mean_energy_psi(n, t, sol);
    const double g = sol.gamma(t);
    const double gd = sol.gamma_dot(t);
    const double gdd = sol.gamma_ddot(t);
    const double lg2 = (gdd * g - gd * gd) / (g * g);
    r.geometric += -(1.0 - In.normalized(n, 0.5) / (n + 3.0)) * g * lg2;
    return r;
}

Beta0 beta0_forms(const ClassicalSolution& sol, int panels) {
    const double T = sol.period();
    Beta0 b;
    b.primary = -0.5 * quad::composite(
                           [&](double t) {
                               const double gd = sol.gamma_dot(t);
                               return gd * gd / sol.gamma(t);
                           },
                           0.0, T, panels);
    b.by_parts = 0.5 * quad::composite(
                           [&](double t) {
                               const double g = sol.gamma(t);
                               const double gd = sol.gamma_dot(t);
                               const double gdd = sol.gamma_ddot(t);
                               return (gdd * g - gd * gd) / g;
                           },
                           0.0, T, panels);
    return b;
}

double beta_n(int n, System system, double beta00, const InFamily& In) {
    const double base = (2.0 * n + 1.0) * beta00;
    if (system == System::original) return base;
    return base + 2.0 * (1.0 - In.normalized(n, 0.5) / (n + 3.0)) * beta00;
}

double mean_energy_numeric(const WaveFunction& f, double t, double xmax, int panels) {
    const auto integrand = [&](double x) {
        return (std::conj(f.value(x, t)) * complex(0.0, 1.0) * f.dt(x, t)).real();
    };
    return quad::composite(integrand, -xmax, xmax, panels);
}

BerryReport berry_numeric(const WaveFunction& f, const ClassicalSolution& sol, int n,
                          System system, double xmax, int t_panels, int x_panels) {
    const double T = sol.period();
    const double E = f.quasienergy();
    const double delta = sol.delta();
    const double chi = -quad::composite(
        [&](double t) { return mean_energy_numeric(f, t, xmax, x_panels); }, 0.0, T, t_panels);
    // The analytic dynamical integrand E/(4 delta gamma) integrates to E T
    // exactly (the winding identity delta T = int dt/(4 gamma)).
    const double dynamical = -E * T;
    BerryReport r;
    r.n = n;
    r.chi = chi;
    r.dynamical = dynamical;
    r.beta = chi - dynamical;
    r.system = system;
    (void)delta;
    return r;
}

}  // namespace floq::berry
