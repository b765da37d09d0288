#ifndef FLOQ_QUADRATURE_HPP
#define FLOQ_QUADRATURE_HPP

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace floq::quad {

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr std::array<double, 8> kGl16X = {
    0.09501250983763744, 0.28160355077925891, 0.45801677765722739, 0.61787624440264375,
    0.75540440835500303, 0.86563120238783174, 0.94457502307323258, 0.98940093499164993};
inline constexpr std::array<double, 8> kGl16W = {
    0.18945061045506850, 0.18260341504492359, 0.16915651939500254, 0.14959598881657673,
    0.12462897125553387, 0.09515851168249278, 0.06225352393864789, 0.02715245941175409};

template <typename F>
auto gl16(F&& f, double a, double b) -> decltype(f(a)) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    decltype(f(a)) acc{};
    for (int i = 0; i < 8; ++i) {
        acc += kGl16W[i] * (f(c + h * kGl16X[i]) + f(c - h * kGl16X[i]));
    }
    return h * acc;
}

template <typename F>
auto composite(F&& f, double a, double b, int panels) -> decltype(f(a)) {
    decltype(f(a)) acc{};
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        acc += gl16(f, a + p * h, a + (p + 1) * h);
    }
    return acc;
}

/// Cumulative integral F(t) = int_0^t f of a smooth function, with uniform
/// anchors over [0, T] and a Gauss tail from the nearest anchor.  If f is
/// T-periodic the evaluation extends to all t through F(t + T) = F(t) + F(T).
class Cumulative {
  public:
    Cumulative() = default;
    Cumulative(std::function<double(double)> f, double period, int segments = 512)
        : f_(std::move(f)), T_(period), seg_(segments), anchors_(segments + 1, 0.0) {
        const double h = T_ / seg_;
        for (int j = 0; j < seg_; ++j) {
            anchors_[j + 1] = anchors_[j] + gl16(f_, j * h, (j + 1) * h);
        }
    }

    double over_period() const { return anchors_.back(); }

    double operator()(double t) const {
        const double w = std::floor(t / T_);
        const double t0 = t - w * T_;
        const double h = T_ / seg_;
        int j = static_cast<int>(t0 / h);
        if (j >= seg_) j = seg_ - 1;
        return w * anchors_.back() + anchors_[j] + gl16(f_, j * h, t0);
    }

  private:
    std::function<double(double)> f_;
    double T_ = 1.0;
    int seg_ = 0;
    std::vector<double> anchors_;
};

}  // namespace floq::quad

#endif
