#include "floq/darboux.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace floq::darboux {

namespace {

// Exact rational accumulation for the J construction (small k only).
struct Frac {
    std::int64_t num = 0, den = 1;

    void reduce() {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(std::abs(num), den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
    Frac operator+(Frac o) const {
        Frac r{num * o.den + o.num * den, den * o.den};
        r.reduce();
        return r;
    }
    Frac operator*(Frac o) const {
        Frac r{num * o.num, den * o.den};
        r.reduce();
        return r;
    }
};

std::vector<IntPoly> hermite_polys(int kmax) {
    std::vector<IntPoly> H(kmax + 1);
    H[0].c = {1};
    if (kmax >= 1) H[1].c = {0, 2};
    for (int n = 1; n < kmax; ++n) {
        IntPoly next;
        next.c.assign(n + 2, 0);
        for (std::size_t j = 0; j < H[n].c.size(); ++j) next.c[j + 1] += 2 * H[n].c[j];
        for (std::size_t j = 0; j < H[n - 1].c.size(); ++j) next.c[j] -= 2 * n * H[n - 1].c[j];
        H[n + 1] = next;
    }
    return H;
}

}  // namespace

IntPoly make_J(int k) {
    if (k < 0 || k > 10) throw std::invalid_argument("make_J: k in [0, 10] supported exactly");
    const auto H = hermite_polys(k);
    std::vector<Frac> acc(2 * k + 1, Frac{0, 1});
    std::int64_t kfact = 1;
    for (int j = 2; j <= k; ++j) kfact *= j;
    std::int64_t pow2 = 1, jfact = 1;
    for (int j = 0; j <= k; ++j) {
        if (j > 0) {
            pow2 *= 2;
            jfact *= j;
        }
        Frac w{kfact, pow2 * jfact};
        w.reduce();
        // H_j^2
        for (std::size_t a = 0; a < H[j].c.size(); ++a) {
            for (std::size_t b = 0; b < H[j].c.size(); ++b) {
                acc[a + b] = acc[a + b] + w * Frac{H[j].c[a] * H[j].c[b], 1};
            }
        }
    }
    IntPoly out;
    out.c.resize(acc.size());
    for (std::size_t j = 0; j < acc.size(); ++j) {
        if (acc[j].den != 1) throw std::logic_error("make_J: non-integer coefficient");
        out.c[j] = acc[j].num;
    }
    while (out.c.size() > 1 && out.c.back() == 0) out.c.pop_back();
    return out;
}

IntPoly make_q(int k) {
    if (k < 0 || k > 20) throw std::invalid_argument("make_q: k in [0, 20]");
    IntPoly qm, q;
    qm.c = {1};        // q_0
    q.c = {0, 1};      // q_1 = w
    if (k == 0) return qm;
    for (int n = 1; n < k; ++n) {
        IntPoly next;
        next.c.assign(q.c.size() + 1, 0);
        for (std::size_t j = 0; j < q.c.size(); ++j) next.c[j + 1] += q.c[j];
        for (std::size_t j = 0; j < qm.c.size(); ++j) next.c[j] += n * qm.c[j];
        qm = q;
        q = next;
    }
    return q;
}

QEval eval_q(const IntPoly& p, double z) {
    const double w = std::sqrt(2.0) * z;
    const IntPoly dp = p.derivative();
    const IntPoly ddp = dp.derivative();
    return {p.eval(w), std::sqrt(2.0) * dp.eval(w), 2.0 * ddp.eval(w)};
}

complex hermite_iz(int k, double z) {
    static const complex ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const IntPoly q = make_q(k);
    return ipow[k % 4] * std::pow(2.0, 0.5 * k) * q.eval(std::sqrt(2.0) * z);
}

// ---------------------------------------------------------------------------

UnphysicalU::UnphysicalU(const QuasiBasis& basis, int k)
    : basis_(basis), k_(k), q_(make_q(k)), dq_(q_.derivative()), ddq_(dq_.derivative()) {
    if (k < 0) throw std::invalid_argument("UnphysicalU: k >= 0");
    if (k % 2 == 0 && !q_.all_nonnegative()) {
        throw std::logic_error("UnphysicalU: even-k q polynomial lost positivity");
    }
}

complex UnphysicalU::value(double x, double t) const {
    const StateFrame f = basis_.frame(t);
    const double z = x / f.s8g;
    const double w = std::sqrt(2.0) * z;
    static const complex ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const complex hk = ipow[k_ % 4] * std::pow(2.0, 0.5 * k_) * q_.eval(w);
    const complex expo = (complex(0.0, f.gamma_dot) + 0.5) * z * z;
    return std::pow(f.gamma, -0.25) * std::polar(1.0, (k_ + 0.5) * f.theta) * hk * std::exp(expo);
}

complex UnphysicalU::dx_log(double x, const StateFrame& f) const {
    const double z = x / f.s8g;
    const double w = std::sqrt(2.0) * z;
    const double lq = std::sqrt(2.0) * dq_.eval(w) / q_.eval(w);  // d/dz ln q_k
    return (lq + (complex(0.0, 2.0 * f.gamma_dot) + 1.0) * z) / f.s8g;
}

complex UnphysicalU::dxx_log(double x, const StateFrame& f) const {
    const double z = x / f.s8g;
    const double w = std::sqrt(2.0) * z;
    const double qv = q_.eval(w), q1 = dq_.eval(w), q2 = ddq_.eval(w);
    const double lq2 = 2.0 * (q2 * qv - q1 * q1) / (qv * qv);  // d^2/dz^2 ln q_k
    return (lq2 + complex(1.0, 2.0 * f.gamma_dot)) / (f.s8g * f.s8g);
}

complex UnphysicalU::dx(double x, double t) const {
    const StateFrame f = basis_.frame(t);
    return value(x, t) * dx_log(x, f);
}

complex UnphysicalU::dxx(double x, double t) const {
    const StateFrame f = basis_.frame(t);
    const complex dl = dx_log(x, f);
    return value(x, t) * (dl * dl + dxx_log(x, f));
}

double UnphysicalU::quasienergy() const { return -(k_ + 0.5) * basis_.sol.delta(); }

// ---------------------------------------------------------------------------

double potential_created_A(int l, const StateFrame& f, double x) {
    if (l == 0) return 1.0 / (4.0 * f.gamma);
    static thread_local int cached_l = -1;
    static thread_local IntPoly q2l_p, q2lm1_p, q2lm2_p;
    if (cached_l != l) {
        q2l_p = make_q(2 * l);
        q2lm1_p = make_q(2 * l - 1);
        q2lm2_p = make_q(2 * l - 2);
        cached_l = l;
    }
    const double w = std::sqrt(2.0) * x / f.s8g;
    const double q2l = q2l_p.eval(w);
    const double r1 = q2lm2_p.eval(w) / q2l, r2 = q2lm1_p.eval(w) / q2l;
    return (1.0 + 4.0 * l * (2 * l - 1) * r1 - 8.0 * l * l * r2 * r2) / (4.0 * f.gamma);
}

double potential_deleted_A(int k, const StateFrame& f, double x) {
    const double z = x / f.s8g;
    static thread_local int cached_k = -1;
    static thread_local IntPoly J, dJ, ddJ;
    if (cached_k != k) {
        J = make_J(k);
        dJ = J.derivative();
        ddJ = dJ.derivative();
        cached_k = k;
    }
    const double jv = J.eval(z), j1 = dJ.eval(z), j2 = ddJ.eval(z);
    return (j2 / jv - (j1 / jv) * (j1 / jv) - 2.0) / (4.0 * f.gamma);
}

std::function<double(double, double)> make_V0(const QuasiBasis& basis) {
    auto sol = basis.sol;
    return [sol](double x, double t) { return sol.omega_sq(t) * x * x; };
}

std::function<double(double, double)> make_V1(const QuasiBasis& basis, int l) {
    QuasiBasis b = basis;
    return [b, l](double x, double t) {
        const StateFrame f = b.frame(t);
        return b.sol.omega_sq(t) * x * x - potential_created_A(l, f, x);
    };
}

std::function<double(double, double)> make_V2(const QuasiBasis& basis, int k) {
    QuasiBasis b = basis;
    return [b, k](double x, double t) {
        const StateFrame f = b.frame(t);
        return b.sol.omega_sq(t) * x * x - potential_deleted_A(k, f, x);
    };
}

PotentialRowFn make_V0_rows(const QuasiBasis& basis) {
    auto sol = basis.sol;
    return [sol](double t, const Eigen::VectorXd& xs, Eigen::VectorXd& out) {
        const double w2 = sol.omega_sq(t);
        out = w2 * xs.array().square();
    };
}

PotentialRowFn make_V1_rows(const QuasiBasis& basis, int l) {
    QuasiBasis b = basis;
    return [b, l](double t, const Eigen::VectorXd& xs, Eigen::VectorXd& out) {
        const StateFrame f = b.frame(t);
        const double w2 = b.sol.omega_sq(t);
        out.resize(xs.size());
        for (Eigen::Index i = 0; i < xs.size(); ++i) {
            out[i] = w2 * xs[i] * xs[i] - potential_created_A(l, f, xs[i]);
        }
    };
}

PotentialRowFn make_V2_rows(const QuasiBasis& basis, int k) {
    QuasiBasis b = basis;
    return [b, k](double t, const Eigen::VectorXd& xs, Eigen::VectorXd& out) {
        const StateFrame f = b.frame(t);
        const double w2 = b.sol.omega_sq(t);
        out.resize(xs.size());
        for (Eigen::Index i = 0; i < xs.size(); ++i) {
            out[i] = w2 * xs[i] * xs[i] - potential_deleted_A(k, f, xs[i]);
        }
    };
}

// ---------------------------------------------------------------------------

LApplied::LApplied(std::shared_ptr<const UnphysicalU> u, std::function<double(double)> L1,
                   std::shared_ptr<const WaveFunction> state)
    : u_(std::move(u)), L1_(std::move(L1)), state_(std::move(state)) {}

complex LApplied::value(double x, double t) const {
    const StateFrame f = u_->basis().frame(t);
    return L1_(t) * (-state_->dx(x, t) + u_->dx_log(x, f) * state_->value(x, t));
}

complex LApplied::dx(double x, double t) const {
    const StateFrame f = u_->basis().frame(t);
    return L1_(t) * (-state_->dxx(x, t) + u_->dxx_log(x, f) * state_->value(x, t) +
                     u_->dx_log(x, f) * state_->dx(x, t));
}

std::function<double(double)> make_L1_quadrature(std::shared_ptr<const UnphysicalU> u,
                                                 double x_probe) {
    auto cum = std::make_shared<quad::Cumulative>(
        [u, x_probe](double t) {
            const StateFrame f = u->basis().frame(t);
            return 2.0 * u->dxx_log(x_probe, f).imag();
        },
        u->period(), 256);
    return [cum](double t) { return std::exp((*cum)(t)); };
}

complex apply_L_adjoint(const UnphysicalU& u, double L1, const WaveFunction& state, double x,
                        double t) {
    const StateFrame f = u.basis().frame(t);
    return L1 * (state.dx(x, t) + std::conj(u.dx_log(x, f)) * state.value(x, t));
}

// ---------------------------------------------------------------------------

PhiK2::PhiK2(const QuasiBasis& basis, int n) : basis_(basis), n_(n) {
    if (n < 0) throw std::invalid_argument("PhiK2: n >= 0");
}

complex PhiK2::value(double x, double t) const {
    const StateFrame f = basis_.frame(t);
    const double z = x / f.s8g;
    const auto ps = states::psi_batch(f, n_ + 1, x);
    const double g = std::sqrt(2.0) * z / (z * z + 0.5);
    return (std::sqrt(n_ + 1.0) * std::polar(1.0, f.theta) * ps[n_ + 1] + g * ps[n_]) /
           std::sqrt(n_ + 3.0);
}

complex PhiK2::dx(double x, double t) const {
    const StateFrame f = basis_.frame(t);
    const double z = x / f.s8g;
    const double den = z * z + 0.5;
    const double g = std::sqrt(2.0) * z / den;
    const double dg = std::sqrt(2.0) * (0.5 - z * z) / (den * den) / f.s8g;
    return (std::sqrt(n_ + 1.0) * std::polar(1.0, f.theta) * states::dx_psi(f, n_ + 1, x) +
            dg * states::psi(f, n_, x) + g * states::dx_psi(f, n_, x)) /
           std::sqrt(n_ + 3.0);
}

complex PhiK2::dxx(double x, double t) const {
    const StateFrame f = basis_.frame(t);
    const double z = x / f.s8g;
    const double den = z * z + 0.5;
    const double g = std::sqrt(2.0) * z / den;
    const double dg = std::sqrt(2.0) * (0.5 - z * z) / (den * den) / f.s8g;
    const double ddg = std::sqrt(2.0) * (2.0 * z * z * z - 3.0 * z) / (den * den * den) /
                       (f.s8g * f.s8g);
    return (std::sqrt(n_ + 1.0) * std::polar(1.0, f.theta) * states::dxx_psi(f, n_ + 1, x) +
            ddg * states::psi(f, n_, x) + 2.0 * dg * states::dx_psi(f, n_, x) +
            g * states::dxx_psi(f, n_, x)) /
           std::sqrt(n_ + 3.0);
}

double PhiK2::quasienergy() const { return states::quasienergy(n_, basis_.sol.delta()); }

// ---------------------------------------------------------------------------

CreatedState::CreatedState(const QuasiBasis& basis, int k)
    : u_(std::make_shared<UnphysicalU>(basis, k)) {
    if (k % 2 != 0) throw std::invalid_argument("CreatedState: k must be even (nodeless u_k)");
    norm_const_ = raw_norm(0.0);
}

double CreatedState::raw_norm(double t) const {
    const QuasiBasis& b = u_->basis();
    const double xmax = states::default_xmax(b.sol, u_->k() + 4);
    const double v = quad::composite(
        [&](double x) {
            const complex uv = u_->value(x, t);
            return 1.0 / (b.sol.gamma(t) * std::norm(uv));
        },
        -xmax, xmax, 24);
    return std::sqrt(v);
}

complex CreatedState::value(double x, double t) const {
    const double L1 = std::sqrt(u_->basis().sol.gamma(t));
    return 1.0 / (L1 * std::conj(u_->value(x, t))) / norm_const_;
}

complex CreatedState::dx(double x, double t) const {
    const StateFrame f = u_->basis().frame(t);
    return -value(x, t) * std::conj(u_->dx_log(x, f));
}

complex CreatedState::dxx(double x, double t) const {
    const StateFrame f = u_->basis().frame(t);
    const complex dl = std::conj(u_->dx_log(x, f));
    return value(x, t) * (dl * dl - std::conj(u_->dxx_log(x, f)));
}

double CreatedState::quasienergy() const { return u_->quasienergy(); }

// ---------------------------------------------------------------------------

DeleteChainState::DeleteChainState(const QuasiBasis& basis, int k, int n)
    : basis_(basis), k_(k), n_(n) {
    if (k < 1) throw std::invalid_argument("DeleteChainState: k >= 1");
    if (n == k || n == k + 1) {
        throw std::invalid_argument("DeleteChainState: levels k and k+1 are deleted");
    }
    if (n < 0) throw std::invalid_argument("DeleteChainState: n >= 0");
    norm_const_ = raw_norm(0.0);
}

complex DeleteChainState::raw(double x, double t, complex* deriv) const {
    const StateFrame f = basis_.frame(t);
    const int top = std::max(k_ + 1, n_) + 3;
    const auto ps = states::psi_batch(f, top, x);

    const complex c = f.eps_dot;
    const complex cb = std::conj(c);
    auto d1 = [&](int m) {
        complex lo = (m >= 1) ? cb * std::sqrt(double(m)) * ps[m - 1] : complex(0.0);
        return complex(0.0, 1.0) * (lo + c * std::sqrt(double(m + 1)) * ps[m + 1]);
    };
    auto d2 = [&](int m) {
        complex acc = c * cb * double(2 * m + 1) * ps[m];
        if (m >= 2) acc += cb * cb * std::sqrt(double(m) * (m - 1)) * ps[m - 2];
        acc += c * c * std::sqrt(double(m + 1) * (m + 2)) * ps[m + 2];
        return -acc;
    };
    auto d3 = [&](int m) {
        // derivative of the d2 combination, term by term through d1
        complex acc = c * cb * double(2 * m + 1) * d1(m);
        if (m >= 2) acc += cb * cb * std::sqrt(double(m) * (m - 1)) * d1(m - 2);
        acc += c * c * std::sqrt(double(m + 1) * (m + 2)) * d1(m + 2);
        return -acc;
    };

    const int a = k_, b = k_ + 1, m = n_;
    const complex f0 = ps[a], f1 = ps[b], f2 = ps[m];
    const complex p0 = d1(a), p1 = d1(b), p2 = d1(m);
    const complex s0 = d2(a), s1 = d2(b), s2 = d2(m);
    const complex W2 = f0 * p1 - p0 * f1;
    const complex W3 =
        f0 * (p1 * s2 - p2 * s1) - f1 * (p0 * s2 - p2 * s0) + f2 * (p0 * s1 - p1 * s0);
    const double g = f.gamma;
    if (deriv) {
        const complex t0 = d3(a), t1 = d3(b), t2 = d3(m);
        // d/dx det[f; f'; f''] = det[f; f'; f''']; d/dx W2 = f0 s1 - s0 f1
        const complex W3p =
            f0 * (p1 * t2 - p2 * t1) - f1 * (p0 * t2 - p2 * t0) + f2 * (p0 * t1 - p1 * t0);
        const complex W2p = f0 * s1 - s0 * f1;
        *deriv = g * (W3p * W2 - W3 * W2p) / (W2 * W2);
    }
    return g * W3 / W2;
}

double DeleteChainState::raw_norm(double t) const {
    const double xmax = states::default_xmax(basis_.sol, std::max(k_ + 1, n_) + 2);
    const double v = quad::composite(
        [&](double x) { return std::norm(raw(x, t, nullptr)); }, -xmax, xmax, 24);
    return std::sqrt(v);
}

complex DeleteChainState::value(double x, double t) const {
    return raw(x, t, nullptr) / norm_const_;
}

complex DeleteChainState::dx(double x, double t) const {
    complex deriv;
    raw(x, t, &deriv);
    return deriv / norm_const_;
}

double DeleteChainState::quasienergy() const {
    return states::quasienergy(n_, basis_.sol.delta());
}

// ---------------------------------------------------------------------------

DarbouxSpec make_darboux_spec(const QuasiBasis& basis, Mode mode, int k) {
    DarbouxSpec spec;
    spec.mode = mode;
    spec.k = k;
    auto sol = basis.sol;
    spec.L1 = [sol](double t) { return std::sqrt(sol.gamma(t)); };
    if (mode == Mode::create) {
        if (k % 2 != 0) throw std::invalid_argument("create mode requires even k");
        spec.u = std::make_shared<UnphysicalU>(basis, k);
        QuasiBasis b = basis;
        const int l = k / 2;
        spec.A = [b, l](double x, double t) {
            return potential_created_A(l, b.frame(t), x);
        };
        spec.new_level = -(k + 0.5) * basis.sol.delta();
    } else {
        if (k < 1) throw std::invalid_argument("delete mode requires k >= 1");
        QuasiBasis b = basis;
        spec.A = [b, k](double x, double t) {
            return potential_deleted_A(k, b.frame(t), x);
        };
        spec.deleted_levels = {k, k + 1};
    }
    return spec;
}

double reality_condition_residual(const UnphysicalU& u, double x, double t) {
    const StateFrame f = u.basis().frame(t);
    const double h = 1e-5 * f.s8g;
    auto im2 = [&](double xx) { return u.dxx_log(xx, f); };
    const complex d3 =
        (im2(x - 2 * h) - 8.0 * im2(x - h) + 8.0 * im2(x + h) - im2(x + 2 * h)) / (12.0 * h);
    // d_x^3 ln(u/conj u) = 2i Im(d_x^3 ln u)
    return 2.0 * std::abs(d3.imag());
}

}  // namespace floq::darboux
