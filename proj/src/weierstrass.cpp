#include "floq/weierstrass.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace floq::elliptic {

namespace {
constexpr double kPi = std::numbers::pi;

bool converged(double term, double acc, double eps, int& streak) {
    if (std::abs(term) <= eps * std::abs(acc)) {
        return ++streak >= 2;
    }
    streak = 0;
    return false;
}
}  // namespace

WeierstrassCell::WeierstrassCell(const Lattice& lat, double series_eps)
    : lat_(lat), eps_(series_eps), om1_(lat.real_period / 2.0),
      om3_(0.0, lat.imag_period_magnitude / 2.0) {
    const double P = lat_.real_period, Q = lat_.imag_period_magnitude;
    const double lnq = -kPi * Q / P;
    q_ = std::exp(lnq);

    for (int j = 0; j < kMaxTerms; ++j) {
        const double w = std::exp(lnq * (j + 0.5) * (j + 0.5));  // q^{(j+1/2)^2}
        const double sgn = (j % 2 == 0) ? 1.0 : -1.0;
        const double fac = 2.0 * j + 1.0;
        c1_[j] = 2.0 * sgn * w;
        c1p_[j] = 2.0 * sgn * fac * w;
        c2_[j] = 2.0 * w;
        c2p_[j] = 2.0 * fac * w;
    }

    // theta zero-values; q < e^{-pi/ratio} so these converge in a few terms
    double t1p = 0.0, t1ppp = 0.0, t2 = 0.0, t3 = 1.0, t4 = 1.0;
    int s1 = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0;
    bool d1 = false, d2 = false, d3 = false, d4 = false, d5 = false;
    for (int j = 0; j < kMaxTerms && !(d1 && d2 && d3 && d4 && d5); ++j) {
        const double fac = 2.0 * j + 1.0;
        if (!d1) {
            t1p += c1p_[j];
            d1 = converged(c1p_[j], t1p, eps_, s1);
        }
        if (!d2) {
            const double add = -c1p_[j] * fac * fac;  // theta_1''' term
            t1ppp += add;
            d2 = converged(add, t1ppp, eps_, s2);
        }
        if (!d3) {
            t2 += c2_[j];
            d3 = converged(c2_[j], t2, eps_, s3);
        }
        const double qj2 = (j >= 1) ? std::exp(lnq * double(j) * double(j)) : 0.0;
        if (!d4 && j >= 1) {
            const double add = 2.0 * qj2;
            t3 += add;
            d4 = converged(add, t3, eps_, s4);
        }
        if (!d5 && j >= 1) {
            const double add = 2.0 * ((j % 2 == 0) ? qj2 : -qj2);
            t4 += add;
            d5 = converged(add, t4, eps_, s5);
        }
    }
    if (!(d1 && d2 && d3 && d4 && d5)) {
        throw std::runtime_error("WeierstrassCell: theta constant series did not converge");
    }
    t1p0_ = t1p;
    t2z_ = t2;
    t3z_ = t3;
    t4z_ = t4;

    const double rfac = kPi * kPi / (3.0 * P * P);
    const double t2q = t2 * t2 * t2 * t2, t4q = t4 * t4 * t4 * t4;
    e1_ = rfac * (t2q + 2.0 * t4q);
    e2_ = rfac * (t2q - t4q);
    e3_ = -rfac * (2.0 * t2q + t4q);
    g2_ = -4.0 * (e1_ * e2_ + e1_ * e3_ + e2_ * e3_);
    g3_ = 4.0 * e1_ * e2_ * e3_;

    eta1_ = -kPi * kPi * t1ppp / (6.0 * P * t1p);
    // Legendre relation eta1*w3 - eta3*w1 = i pi / 2
    eta3_ = (eta1_ * om3_ - complex(0.0, kPi / 2.0)) / om1_;

    const double c = kPi * t3z_ * t4z_ / P;
    pfac_ = c * c;
}

WeierstrassCell::Reduced WeierstrassCell::reduce(complex z) const {
    const double alpha = z.real() / lat_.real_period;
    const double beta = z.imag() / lat_.imag_period_magnitude;
    const long m = std::lround(std::floor(alpha + 0.5));
    const long n = std::lround(std::floor(beta + 0.5));
    complex zr(z.real() - double(m) * lat_.real_period,
               z.imag() - double(n) * lat_.imag_period_magnitude);
    return {zr, m, n};
}

double WeierstrassCell::pole_distance(complex z) const {
    return std::abs(reduce(z).z);
}

WeierstrassCell::ThetaSet WeierstrassCell::thetas(complex v) const {
    // Running sin/cos of (2j+1)v by angle-addition, as in the usual theta
    // evaluation loops.
    const complex S = std::sin(v), C = std::cos(v);
    const complex S2 = 2.0 * S * C, C2 = C * C - S * S;
    complex Sn = S, Cn = C;
    ThetaSet r{0.0, 0.0, 0.0, 0.0};
    int s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    bool d1 = false, d2 = false, d3 = false, d4 = false;
    for (int j = 0; j < kMaxTerms; ++j) {
        if (d1 && d2 && d3 && d4) break;
        if (!d1) {
            const complex add = c1_[j] * Sn;
            r.t1 += add;
            d1 = converged(std::abs(add), std::abs(r.t1), eps_, s1);
        }
        if (!d2) {
            const complex add = c1p_[j] * Cn;
            r.t1p += add;
            d2 = converged(std::abs(add), std::abs(r.t1p), eps_, s2);
        }
        if (!d3) {
            const complex add = c2_[j] * Cn;
            r.t2 += add;
            d3 = converged(std::abs(add), std::abs(r.t2), eps_, s3);
        }
        if (!d4) {
            const complex add = -c2p_[j] * Sn;
            r.t2p += add;
            d4 = converged(std::abs(add), std::abs(r.t2p), eps_, s4);
        }
        const complex ns = Sn * C2 + Cn * S2;
        const complex nc = Cn * C2 - Sn * S2;
        Sn = ns;
        Cn = nc;
    }
    if (!(d1 && d2 && d3 && d4)) {
        throw std::runtime_error("WeierstrassCell: theta series did not converge");
    }
    return r;
}

complex WeierstrassCell::wp(complex z) const {
    const auto red = reduce(z);
    if (std::abs(red.z) < 1e-12 * lat_.real_period) throw PoleError(std::abs(red.z));
    const complex v = kPi * red.z / lat_.real_period;
    const auto th = thetas(v);
    const complex ratio = th.t2 / th.t1;
    return e1_ + pfac_ * ratio * ratio;
}

complex WeierstrassCell::wp_prime(complex z) const {
    const auto red = reduce(z);
    if (std::abs(red.z) < 1e-12 * lat_.real_period) throw PoleError(std::abs(red.z));
    const complex v = kPi * red.z / lat_.real_period;
    const auto th = thetas(v);
    const complex dv = kPi / lat_.real_period;
    return 2.0 * pfac_ * th.t2 * (th.t2p * th.t1 - th.t1p * th.t2) / (th.t1 * th.t1 * th.t1) * dv;
}

complex WeierstrassCell::zeta(complex z) const {
    const auto red = reduce(z);
    if (std::abs(red.z) < 1e-12 * lat_.real_period) throw PoleError(std::abs(red.z));
    const complex v = kPi * red.z / lat_.real_period;
    const auto th = thetas(v);
    complex val = eta1_ * red.z / om1_ + (kPi / lat_.real_period) * th.t1p / th.t1;
    return val + 2.0 * double(red.m) * eta1_ + 2.0 * double(red.n) * eta3_;
}

complex WeierstrassCell::sigma(complex z) const {
    const auto red = reduce(z);
    const complex v = kPi * red.z / lat_.real_period;
    const auto th = thetas(v);
    const double P = lat_.real_period;
    complex val = (P / kPi) * std::exp(eta1_ * red.z * red.z / P) * th.t1 / t1p0_;
    if (red.m == 0 && red.n == 0) return val;
    // sigma(u + 2m w1 + 2n w3) = (-1)^{m+n+mn} exp[(2m eta1 + 2n eta3)(u + m w1 + n w3)] sigma(u)
    const complex eta = 2.0 * double(red.m) * eta1_ + 2.0 * double(red.n) * eta3_;
    const complex mid = red.z + double(red.m) * om1_ + double(red.n) * om3_;
    const double sgn = ((red.m + red.n + red.m * red.n) % 2 == 0) ? 1.0 : -1.0;
    return sgn * std::exp(eta * mid) * val;
}

std::pair<double, double> lattice_invariants(double real_period, double imag_period_magnitude,
                                             double series_eps) {
    WeierstrassCell cell(Lattice(real_period, imag_period_magnitude), series_eps);
    return {cell.g2(), cell.g3()};
}

namespace {

// Bisection for a continuous monotone function on [a, b] with f(a), f(b) of
// opposite sign.
double bisect(const std::function<double(double)>& f, double a, double b, double tol) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) {
        throw std::runtime_error("solve_d: target not bracketed on edge");
    }
    for (int it = 0; it < 200 && (b - a) > tol * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

EllipticEnvelopeParams solve_d(double omega0, const WeierstrassCell& cell, double tol) {
    const double target = -4.0 * omega0 * omega0;
    const double P = cell.lattice().real_period;
    const double Q = cell.lattice().imag_period_magnitude;
    complex d;
    bool stable = false;

    if (target <= cell.e3()) {
        // imaginary axis: wp(iy) runs from -inf (y -> 0) up to e3 at y = Q/2
        double a = Q / 4.0;
        while (cell.wp(complex(0.0, a)).real() > target) a *= 0.5;
        const double y = bisect(
            [&](double yy) { return cell.wp(complex(0.0, yy)).real() - target; }, a, Q / 2.0, tol);
        d = complex(0.0, y);
        stable = true;
    } else if (target <= cell.e2()) {
        // top edge Im = Q/2: wp in [e3, e2]
        const double x = bisect(
            [&](double xx) { return cell.wp(complex(xx, Q / 2.0)).real() - target; }, 0.0, P / 2.0,
            tol);
        d = complex(x, Q / 2.0);
    } else if (target <= cell.e1()) {
        // right edge Re = P/2: wp in [e2, e1], e2 at y = Q/2
        const double y = bisect(
            [&](double yy) { return cell.wp(complex(P / 2.0, yy)).real() - target; }, 1e-9 * Q,
            Q / 2.0, tol);
        d = complex(P / 2.0, y);
    } else {
        // real axis: wp >= e1, diverging toward 0
        double a = P / 4.0;
        while (cell.wp(complex(a, 0.0)).real() < target) a *= 0.5;
        const double x =
            bisect([&](double xx) { return cell.wp(complex(xx, 0.0)).real() - target; }, a, P / 2.0,
                   tol);
        d = complex(x, 0.0);
    }

    // Newton polish on the located edge
    for (int it = 0; it < 8; ++it) {
        const complex f = cell.wp(d) - target;
        if (std::abs(f) < tol * std::max(1.0, std::abs(target))) break;
        d -= f / cell.wp_prime(d);
    }
    const complex check = cell.wp(d) - target;
    if (std::abs(check) > 100.0 * tol * std::max(1.0, std::abs(target))) {
        throw std::runtime_error("solve_d: no root at requested tolerance");
    }

    EllipticEnvelopeParams par;
    par.omega0 = omega0;
    par.d = d;
    par.zeta_d = cell.zeta(d);
    par.shift = complex(0.0, Q / 2.0);
    par.stable_branch = stable;
    return par;
}

complex epsilon_elliptic(double t, const EllipticEnvelopeParams& par,
                         const WeierstrassCell& cell) {
    const complex num = cell.sigma(t + par.shift + par.d);
    const complex den = cell.sigma(t + par.shift);
    if (std::abs(den) == 0.0) throw PoleError(0.0);
    return num / den * std::exp(-t * par.zeta_d);
}

complex epsilon_elliptic_dlog(double t, const EllipticEnvelopeParams& par,
                              const WeierstrassCell& cell) {
    return cell.zeta(t + par.shift + par.d) - cell.zeta(t + par.shift) - par.zeta_d;
}

}  // namespace floq::elliptic
