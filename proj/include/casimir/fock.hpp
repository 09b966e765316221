#ifndef CASIMIR_FOCK_HPP
#define CASIMIR_FOCK_HPP

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "casimir/errors.hpp"
#include "casimir/params.hpp"

namespace casimir {

using cplx = std::complex<double>;

// Truncated single-mode Fock space, levels |0> ... |dim-1>. All algebraic
// checks restricted to a subspace use the lowest half of the levels (the
// "guarded subspace"); the top half absorbs truncation leakage.
struct HilbertSpace {
    int dim;

    explicit HilbertSpace(int d) : dim(d) {
        if (d < 2) throw InvalidParams("Hilbert space dimension must be >= 2");
    }
    int guard() const { return dim / 2; }
    bool operator==(const HilbertSpace&) const = default;
};

// Dense complex square matrix on a truncated Fock space. Dense storage is
// deliberate: dim stays at a few hundred here.
class Operator {
  public:
    Operator(HilbertSpace space, Eigen::MatrixXcd m);

    static Operator zero(HilbertSpace space);
    static Operator identity(HilbertSpace space);

    const HilbertSpace& space() const { return space_; }
    int dim() const { return space_.dim; }
    const Eigen::MatrixXcd& matrix() const { return m_; }

    Operator adjoint() const { return Operator(space_, m_.adjoint()); }
    double hermiticity_defect() const;
    bool is_hermitian(double tol = 1e-12) const { return hermiticity_defect() <= tol; }

    Operator& operator+=(const Operator& o);
    Operator& operator-=(const Operator& o);
    friend Operator operator+(Operator a, const Operator& b) { return a += b; }
    friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
    friend Operator operator*(const Operator& a, const Operator& b);
    friend Operator operator*(cplx s, const Operator& a) { return Operator(a.space_, s * a.m_); }
    friend Operator operator*(double s, const Operator& a) { return Operator(a.space_, s * a.m_); }

  private:
    HilbertSpace space_;
    Eigen::MatrixXcd m_;
};

// Normalized pure state; Euclidean norm must be 1 within 1e-10.
class StateVector {
  public:
    StateVector(HilbertSpace space, Eigen::VectorXcd amplitudes);

    const HilbertSpace& space() const { return space_; }
    const Eigen::VectorXcd& amplitudes() const { return v_; }

  private:
    HilbertSpace space_;
    Eigen::VectorXcd v_;
};

// Hermitian (1e-10), unit-trace (1e-10), positive-semidefinite (min eigenvalue
// >= -1e-10) state. Construction validates; nothing is clamped silently.
class DensityMatrix {
  public:
    DensityMatrix(HilbertSpace space, Eigen::MatrixXcd m);

    const HilbertSpace& space() const { return space_; }
    int dim() const { return space_.dim; }
    const Eigen::MatrixXcd& matrix() const { return m_; }

    double hermiticity_defect() const;
    double min_eigenvalue() const;
    double purity() const; // Tr rho^2

    static DensityMatrix pure(const StateVector& psi);
    static DensityMatrix vacuum(HilbertSpace space);

  private:
    HilbertSpace space_;
    Eigen::MatrixXcd m_;
};

// --- ladder operators ------------------------------------------------------

// <n-1| a |n> = sqrt(n)
Operator annihilation(HilbertSpace space);
Operator creation(HilbertSpace space);
Operator number_operator(HilbertSpace space);

// --- squeeze machinery ------------------------------------------------------

// S(r) = exp[r (a^2 - a+^2)/4] via scaling-and-squaring matrix exponential of
// the truncated generator. Exactly unitary on the truncated space (the
// generator is anti-Hermitian); throws TruncationTooSmall if the guarded
// unitarity defect somehow exceeds 1e-9.
Operator squeeze(HilbertSpace space, double r);

// |r,n> = S(r)|n>. Requires n < dim/2 and a converged amplitude tail.
StateVector squeezed_number_state(HilbertSpace space, double r, int n);

// b = cosh(r/2) a + sinh(r/2) a+ and its adjoint, built by the linear
// combination (the Bogoliubov route, not conjugation by S).
std::pair<Operator, Operator> bogoliubov_pair(HilbertSpace space, double r);

// (1+N)^-1 sum_n (N/(1+N))^n |r,n><r,n|; the squeezed vacuum at N = 0.
DensityMatrix squeezed_thermal_state(HilbertSpace space, double r, double N);

// --- Hamiltonians -----------------------------------------------------------

// H_eff = (eps*omega0/4)(a+^2 + a^2) + (K/2) n
Operator effective_hamiltonian(HilbertSpace space, const SystemParams& p);

// H_S = Omega (b+ b + 1/2) - K/4, assembled from bogoliubov_pair. Equal to
// H_eff away from the truncation edge.
Operator pseudo_hamiltonian(HilbertSpace space, const DerivedParams& p);

// --- functionals ------------------------------------------------------------

cplx expectation(const DensityMatrix& rho, const Operator& O);

// sum_{j >= k} <j|rho|j>
double tail_mass(const DensityMatrix& rho, int k);
double tail_mass(const Eigen::MatrixXcd& rho, int k);

// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

// Smallest dimension from {32,48,64,96,...,512} whose squeezed thermal state
// keeps tail_mass at 3/4*dim below 1e-10. Throws TruncationTooSmall if even
// 512 fails.
int auto_dimension(double r, double N);

namespace detail {
// Unvalidated S(r) diag(thermal) S(r)+ used by auto_dimension and tests.
Eigen::MatrixXcd squeezed_thermal_matrix(int dim, double r, double N);
} // namespace detail

} // namespace casimir

#endif
