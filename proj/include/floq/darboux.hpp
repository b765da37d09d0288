#ifndef FLOQ_DARBOUX_HPP
#define FLOQ_DARBOUX_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "floq/states.hpp"

namespace floq::darboux {

using complex = std::complex<double>;
using states::PhaseTracker;
using states::PsiState;
using states::StateFrame;
using states::WaveFunction;
using classical::ClassicalSolution;

/// Integer-coefficient polynomial (Horner evaluation, exact derivative).
struct IntPoly {
    std::vector<std::int64_t> c;  // c[j] * v^j

    double eval(double v) const {
        double acc = 0.0;
        for (std::size_t j = c.size(); j-- > 0;) acc = acc * v + double(c[j]);
        return acc;
    }
    IntPoly derivative() const {
        IntPoly d;
        for (std::size_t j = 1; j < c.size(); ++j) d.c.push_back(std::int64_t(j) * c[j]);
        if (d.c.empty()) d.c.push_back(0);
        return d;
    }
    bool all_nonnegative() const {
        for (auto v : c)
            if (v < 0) return false;
        return !c.empty() && c[0] > 0;
    }
};

/// J_k(z) = sum_{j<=k} k!/(2^j j!) H_j(z)^2: positive on the real line (a sum
/// of squares with positive weights), degree 2k, integer coefficients.
IntPoly make_J(int k);

/// q_k written in w = sqrt(2) z: q_0 = 1, q_1 = w, q_{k+1} = w q_k + k q_{k-1}
/// (so q_k(z) = (-i)^k 2^{-k/2} H_k(iz)).  Even-k members have nonnegative
/// coefficients and positive constant term, hence no real zeros.
IntPoly make_q(int k);

/// Evaluate q_k and z-derivatives at z (chain rule through w = sqrt(2) z).
struct QEval {
    double q, dq, ddq;
};
QEval eval_q(const IntPoly& p, double z);

/// Hermite H_k(i z) = i^k 2^{k/2} q_k(z); real up to the i^k factor.
complex hermite_iz(int k, double z);

/// Quasienergy basis handle: the classical solution, its phase tracker, and
/// psi_n factories.
struct QuasiBasis {
    ClassicalSolution sol;
    std::shared_ptr<const PhaseTracker> tracker;

    explicit QuasiBasis(ClassicalSolution s)
        : sol(s), tracker(std::make_shared<PhaseTracker>(s)) {}

    PsiState psi(int n) const { return PsiState(sol, tracker, n); }
    StateFrame frame(double t) const { return StateFrame::at(sol, *tracker, t); }
};

/// Unphysical (growing) solution u_k of the initial equation:
/// u_k = gamma^{-1/4} (eps/conj(eps))^{k/2+1/4} H_k(iz) e^{(i gamma' + 1/2) z^2},
/// Floquet rate E = -delta(k+1/2).  Nodeless for even k.
class UnphysicalU final : public WaveFunction {
  public:
    UnphysicalU(const QuasiBasis& basis, int k);

    complex value(double x, double t) const override;
    complex dx(double x, double t) const override;
    complex dxx(double x, double t) const override;
    double quasienergy() const override;
    double period() const override { return basis_.sol.period(); }

    /// d/dx ln u and d^2/dx^2 ln u (analytic; pole-free for even k).
    complex dx_log(double x, const StateFrame& f) const;
    complex dxx_log(double x, const StateFrame& f) const;

    int k() const { return k_; }
    const QuasiBasis& basis() const { return basis_; }

  private:
    QuasiBasis basis_;
    int k_;
    IntPoly q_, dq_, ddq_;
};

/// A_1^{(2l)}: potential difference of the creation transform seeded by u_{2l}
/// (x-independent shift 1/(4 gamma) for l = 0).
double potential_created_A(int l, const StateFrame& f, double x);

/// A_2^{(k)}: potential difference of the two-step deletion chain through
/// (psi_k, psi_{k+1}); pole-free since J_k > 0.
double potential_deleted_A(int k, const StateFrame& f, double x);

/// V(x,t) evaluators: V0 = omega^2 x^2, V1 = V0 - A1^{(2l)}, V2 = V0 - A2^{(k)}.
std::function<double(double, double)> make_V0(const QuasiBasis& basis);
std::function<double(double, double)> make_V1(const QuasiBasis& basis, int l);
std::function<double(double, double)> make_V2(const QuasiBasis& basis, int k);

/// Row forms for propagation loops: the per-time envelope work is hoisted out
/// of the x sweep.
using PotentialRowFn = std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>;
PotentialRowFn make_V0_rows(const QuasiBasis& basis);
PotentialRowFn make_V1_rows(const QuasiBasis& basis, int l);
PotentialRowFn make_V2_rows(const QuasiBasis& basis, int k);

/// First-order intertwiner L = L1(t) [ -d_x + (d_x ln u) . ] applied to a
/// state.  For the u_k family and for u = psi_k, L1 = sqrt(gamma) up to a
/// constant; a quadrature-based L1 (normalized L1(0) = 1) is available for
/// generic transformation functions.
class LApplied final : public WaveFunction {
  public:
    LApplied(std::shared_ptr<const UnphysicalU> u, std::function<double(double)> L1,
             std::shared_ptr<const WaveFunction> state);

    complex value(double x, double t) const override;
    complex dx(double x, double t) const override;
    double quasienergy() const override { return state_->quasienergy(); }
    double period() const override { return state_->period(); }

  private:
    std::shared_ptr<const UnphysicalU> u_;
    std::function<double(double)> L1_;
    std::shared_ptr<const WaveFunction> state_;
};

/// L1(t) = exp[ 2 int_0^t Im(d_x^2 ln u)(x_probe, s) ds ], the general reality
/// normalization (integration constant fixed by L1(0) = 1).  The integrand is
/// x-independent when the reality condition holds; x_probe only picks the
/// evaluation point.
std::function<double(double)> make_L1_quadrature(std::shared_ptr<const UnphysicalU> u,
                                                 double x_probe);

/// Adjoint intertwiner L+ = L1(t) [ d_x + (d_x ln conj(u)) . ] applied to a
/// state of the transformed equation.
complex apply_L_adjoint(const UnphysicalU& u, double L1, const WaveFunction& state, double x,
                        double t);

/// Closed-form transformed states for the k = 2 creation case:
/// phi_n = (n+3)^{-1/2} [ sqrt(n+1) e^{i theta} psi_{n+1} + sqrt(2) z/(z^2+1/2) psi_n ].
class PhiK2 final : public WaveFunction {
  public:
    PhiK2(const QuasiBasis& basis, int n);

    complex value(double x, double t) const override;
    complex dx(double x, double t) const override;
    complex dxx(double x, double t) const override;
    double quasienergy() const override;
    double period() const override { return basis_.sol.period(); }
    int level() const { return n_; }

  private:
    QuasiBasis basis_;
    int n_;
};

/// Created bound state v = 1/(L1 conj(u_k)), quasienergy -delta(k+1/2),
/// normalized to unit L2 norm (constant fixed at t = 0; time independence of
/// the norm is a conservation law).
class CreatedState final : public WaveFunction {
  public:
    CreatedState(const QuasiBasis& basis, int k);

    complex value(double x, double t) const override;
    complex dx(double x, double t) const override;
    complex dxx(double x, double t) const override;
    double quasienergy() const override;
    double period() const override { return u_->period(); }

    double raw_norm(double t) const;  // before normalization, for conservation tests

  private:
    std::shared_ptr<const UnphysicalU> u_;
    double norm_const_;
};

/// Doubly transformed state of the deletion chain (k, k+1), evaluated through
/// the second-order Wronskian (Crum) representation
///   chain_n = gamma(t) W(psi_k, psi_{k+1}, psi_n) / W(psi_k, psi_{k+1}),
/// which is identical to composing the two first-order maps but stays finite
/// across the zeros of the intermediate psi_k (W_2 > 0 on the real line by the
/// Turan inequality).  The composed time factor sqrt(gamma)*sqrt(gamma) is
/// what both first-order reality normalizations produce.
class DeleteChainState final : public WaveFunction {
  public:
    DeleteChainState(const QuasiBasis& basis, int k, int n);

    complex value(double x, double t) const override;
    complex dx(double x, double t) const override;
    double quasienergy() const override;
    double period() const override { return basis_.sol.period(); }

    double raw_norm(double t) const;

  private:
    complex raw(double x, double t, complex* deriv) const;

    QuasiBasis basis_;
    int k_, n_;
    double norm_const_;
};

enum class Mode { del, create };

/// Assembled transformation record.
struct DarbouxSpec {
    Mode mode;
    int k;  // delete: chain (k, k+1); create: even k = 2l
    std::shared_ptr<const UnphysicalU> u;           // create mode transformation function
    std::function<double(double)> L1;               // sqrt(gamma) for both families here
    std::function<double(double, double)> A;        // potential difference
    std::optional<double> new_level;                // create: -delta(k+1/2)
    std::vector<int> deleted_levels;                // delete: {k, k+1}
};

DarbouxSpec make_darboux_spec(const QuasiBasis& basis, Mode mode, int k);

/// |d_x^3 ln(u/conj u)| at (x, t): the reality condition of the transform.
/// Uses one finite difference of the analytic d_x^2 ln u.
double reality_condition_residual(const UnphysicalU& u, double x, double t);

}  // namespace floq::darboux

#endif
