#include "floq/states.hpp"

#include <cmath>
#include <numbers>

namespace floq::states {

namespace {
constexpr double kPi = std::numbers::pi;

double normalization(int n) {
    // N_n = (2^{n+1} n! sqrt(2 pi))^{-1/2}
    double f = 1.0;
    for (int j = 2; j <= n; ++j) f *= j;
    return 1.0 / std::sqrt(std::pow(2.0, n + 1) * f * std::sqrt(2.0 * kPi));
}
}  // namespace

PhaseTracker::PhaseTracker(const ClassicalSolution& sol, int segments)
    : arg0_(std::arg(sol.eps(0.0))),
      cum_([sol](double t) { return 1.0 / (4.0 * sol.gamma(t)); }, sol.period(), segments) {}

StateFrame StateFrame::at(const ClassicalSolution& sol, const PhaseTracker& ph, double t) {
    StateFrame f;
    f.t = t;
    f.eps = sol.eps(t);
    f.eps_dot = sol.eps_dot(t);
    f.gamma = sol.gamma(t);
    f.gamma_dot = sol.gamma_dot(t);
    f.theta = ph.arg_eps(t);
    f.s8g = std::sqrt(8.0 * f.gamma);
    return f;
}

void hermite_ladder(int nmax, double z, std::span<double> out) {
    out[0] = 1.0;
    if (nmax >= 1) out[1] = 2.0 * z;
    for (int n = 1; n < nmax; ++n) {
        out[n + 1] = 2.0 * z * out[n] - 2.0 * n * out[n - 1];
    }
}

std::vector<complex> psi_batch(const StateFrame& f, int nmax, double x) {
    const double z = x / f.s8g;
    std::vector<double> H(nmax + 1);
    hermite_ladder(nmax, z, H);
    // common factor: e^{i gdot z^2} gamma^{-1/4} e^{-z^2/2}, then per-n
    // (conj(eps)/eps)^{n/2+1/4} = e^{-2i theta (n/2+1/4)} and N_n H_n
    const complex common =
        std::polar(std::pow(f.gamma, -0.25) * std::exp(-0.5 * z * z), f.gamma_dot * z * z);
    const complex step = std::polar(1.0, -f.theta);  // extra e^{-i theta} per level
    complex phase = std::polar(1.0, -0.5 * f.theta);
    std::vector<complex> out(nmax + 1);
    double nf = 1.0;  // n!
    for (int n = 0; n <= nmax; ++n) {
        if (n > 1) nf *= n;
        const double Nn = 1.0 / std::sqrt(std::pow(2.0, n + 1) * nf * std::sqrt(2.0 * kPi));
        out[n] = phase * common * (Nn * H[n]);
        phase *= step;
    }
    return out;
}

complex psi(const StateFrame& f, int n, double x) {
    const double z = x / f.s8g;
    std::vector<double> H(n + 1);
    hermite_ladder(n, z, H);
    const complex common =
        std::polar(std::pow(f.gamma, -0.25) * std::exp(-0.5 * z * z), f.gamma_dot * z * z);
    return std::polar(1.0, -2.0 * f.theta * (0.5 * n + 0.25)) * common * normalization(n) * H[n];
}

complex dx_psi(const StateFrame& f, int n, double x) {
    const auto ps = psi_batch(f, n + 1, x);
    const complex lo = (n >= 1) ? std::conj(f.eps_dot) * std::sqrt(double(n)) * ps[n - 1]
                                : complex(0.0);
    return complex(0.0, 1.0) * (lo + f.eps_dot * std::sqrt(double(n + 1)) * ps[n + 1]);
}

complex dxx_psi(const StateFrame& f, int n, double x) {
    const auto ps = psi_batch(f, n + 2, x);
    complex acc = f.eps_dot * std::conj(f.eps_dot) * double(2 * n + 1) * ps[n];
    if (n >= 2) {
        acc += std::conj(f.eps_dot) * std::conj(f.eps_dot) * std::sqrt(double(n) * (n - 1)) *
               ps[n - 2];
    }
    acc += f.eps_dot * f.eps_dot * std::sqrt(double(n + 1) * (n + 2)) * ps[n + 2];
    return -acc;
}

double quasienergy(int n, double delta) { return (n + 0.5) * delta; }

double quasienergy_mod(double energy, double period) {
    const double unit = 2.0 * kPi / period;
    double r = std::fmod(energy, unit);
    if (r < 0.0) r += unit;
    return r;
}

double g_eigenvalue(int n) { return (2.0 * n + 1.0) / 8.0; }

LadderResult ladder_apply(Ladder dir, int n) {
    if (dir == Ladder::lower) {
        if (n == 0) return {0.0, 0};  // annihilation, not an error
        return {std::sqrt(double(n)) / 2.0, n - 1};
    }
    return {std::sqrt(double(n + 1)) / 2.0, n + 1};
}

complex apply_lowering(const StateFrame& f, complex value, complex dvalue, double x) {
    return f.eps * dvalue - complex(0.0, 0.5) * f.eps_dot * x * value;
}

complex apply_raising(const StateFrame& f, complex value, complex dvalue, double x) {
    return -std::conj(f.eps) * dvalue + complex(0.0, 0.5) * std::conj(f.eps_dot) * x * value;
}

PsiState::PsiState(ClassicalSolution sol, std::shared_ptr<const PhaseTracker> ph, int n)
    : sol_(std::move(sol)), ph_(std::move(ph)), n_(n) {
    if (n < 0) throw std::invalid_argument("PsiState: n must be nonnegative");
}

complex PsiState::value(double x, double t) const { return psi(frame(t), n_, x); }
complex PsiState::dx(double x, double t) const { return dx_psi(frame(t), n_, x); }
complex PsiState::dxx(double x, double t) const { return dxx_psi(frame(t), n_, x); }
double PsiState::quasienergy() const { return states::quasienergy(n_, sol_.delta()); }

double norm_l2(const WaveFunction& f, double t, double xmax, int panels) {
    const double v = quad::composite(
        [&](double x) { return std::norm(f.value(x, t)); }, -xmax, xmax, panels);
    return std::sqrt(v);
}

complex inner_product(const WaveFunction& f, const WaveFunction& g, double t, double xmax,
                      int panels) {
    return quad::composite(
        [&](double x) { return std::conj(f.value(x, t)) * g.value(x, t); }, -xmax, xmax, panels);
}

double default_xmax(const ClassicalSolution& sol, int nmax) {
    double gmax = 0.0;
    const double T = sol.period();
    for (int j = 0; j < 64; ++j) gmax = std::max(gmax, sol.gamma(j * T / 64.0));
    return std::sqrt(2.0 * (nmax + 40.0)) * std::sqrt(8.0 * gmax);
}

}  // namespace floq::states
