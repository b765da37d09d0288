#ifndef FLOQ_BERRY_HPP
#define FLOQ_BERRY_HPP

#include <vector>

#include "floq/darboux.hpp"
#include "floq/states.hpp"

namespace floq::berry {

using complex = std::complex<double>;
using classical::ClassicalSolution;
using states::WaveFunction;

enum class System { original, transformed_k2 };

struct BerryReport {
    int n;
    double chi;        // total phase over one period
    double dynamical;  // -E_n T
    double beta;       // geometric part: chi = dynamical + beta
    System system;
};

/// I_n(a) = int H_n(x)^2 e^{-x^2} / (x^2 + a) dx, represented exactly as
/// I_n = Q_n(a) I_0(a) + P_n(a) sqrt(pi) with integer polynomials, so that the
/// recursion's I'_{n-1} term is differentiated symbolically:
///   4a I'_{n} = (4a Q' + 4a Q - 2Q) I_0 + (4a P' - 4Q) sqrt(pi).
/// Coefficients stay within int64 for n <= 12 (max ~3e14); larger n throws.
class InFamily {
  public:
    explicit InFamily(int nmax);

    double operator()(int n, double a) const;
    /// I_n(a) / (2^n n! sqrt(pi)): the Hermite-normalized value that enters
    /// the transformed-state expectation formulas.
    double normalized(int n, double a) const;
    int nmax() const { return int(P_.size()) - 1; }

    static double I0(double a);  // (pi/sqrt a) e^a erfc(sqrt a)

  private:
    std::vector<darboux::IntPoly> P_, Q_;
};

struct MeanEnergySplit {
    double dynamical;  // (2n+1)/(8 gamma): integrates to E_n T over a period
    double geometric;  // -(gamma/2)(2n+1) (ln gamma)''
};

/// Closed-form <psi_n | i d/dt psi_n> split into its two structural terms;
/// (ln gamma)'' is computed from gamma'' = 2|eps'|^2 - 8 omega^2 gamma, never
/// by differencing.
MeanEnergySplit mean_energy_psi(int n, double t, const ClassicalSolution& sol);

/// Same split for the k = 2 transformed states phi_n: the dynamical term is
/// unchanged and the geometric integrand picks up the extra term
/// -(1 - In.normalized(n, 1/2)/(n+3)) gamma (ln gamma)'', reflecting
/// <phi|x^2|phi> - <psi|x^2|psi> = 8 gamma (1 - In.normalized/(n+3))
/// (verified against direct quadrature; the normalized I is essential).
MeanEnergySplit mean_energy_phi(int n, double t, const ClassicalSolution& sol,
                                const InFamily& In);

struct Beta0 {
    double primary;   // -1/2 int gamma'^2 / gamma dt
    double by_parts;  // +1/2 int gamma (ln gamma)'' dt (equal for periodic gamma)
};
Beta0 beta0_forms(const ClassicalSolution& sol, int panels = 64);
inline double beta0(const ClassicalSolution& sol) { return beta0_forms(sol).primary; }

double beta_n(int n, System system, double beta00, const InFamily& In);

/// <f | i d/dt f>(t) by x-quadrature with finite-difference d/dt.
double mean_energy_numeric(const WaveFunction& f, double t, double xmax, int panels = 24);

/// Brute-force phase accounting over one period: chi = -int <f|i df/dt> dt,
/// with the dynamical integrand E/(4 delta gamma) taken analytically (it
/// integrates to exactly E T) and the remainder attributed to the geometric
/// part.
BerryReport berry_numeric(const WaveFunction& f, const ClassicalSolution& sol, int n,
                          System system, double xmax, int t_panels = 24, int x_panels = 24);

}  // namespace floq::berry

#endif
