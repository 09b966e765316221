#include "casimir/fock.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace casimir {

namespace {

void check_same_space(const HilbertSpace& a, const HilbertSpace& b, const char* what) {
    if (!(a == b))
        throw DimensionMismatch(std::string(what) + ": operands live on different spaces");
}

} // namespace

// --- Operator ----------------------------------------------------------------

Operator::Operator(HilbertSpace space, Eigen::MatrixXcd m) : space_(space), m_(std::move(m)) {
    if (m_.rows() != space_.dim || m_.cols() != space_.dim)
        throw DimensionMismatch("operator matrix does not match its space");
}

Operator Operator::zero(HilbertSpace space) {
    return Operator(space, Eigen::MatrixXcd::Zero(space.dim, space.dim));
}

Operator Operator::identity(HilbertSpace space) {
    return Operator(space, Eigen::MatrixXcd::Identity(space.dim, space.dim));
}

double Operator::hermiticity_defect() const {
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

Operator& Operator::operator+=(const Operator& o) {
    check_same_space(space_, o.space_, "operator+");
    m_ += o.m_;
    return *this;
}

Operator& Operator::operator-=(const Operator& o) {
    check_same_space(space_, o.space_, "operator-");
    m_ -= o.m_;
    return *this;
}

Operator operator*(const Operator& a, const Operator& b) {
    check_same_space(a.space_, b.space_, "operator*");
    return Operator(a.space_, a.m_ * b.m_);
}

// --- StateVector ---------------------------------------------------------------

StateVector::StateVector(HilbertSpace space, Eigen::VectorXcd amplitudes)
    : space_(space), v_(std::move(amplitudes)) {
    if (v_.size() != space_.dim)
        throw DimensionMismatch("state vector does not match its space");
    if (std::abs(v_.norm() - 1.0) > 1e-10)
        throw InvalidParams("state vector is not normalized");
}

// --- DensityMatrix ---------------------------------------------------------------

DensityMatrix::DensityMatrix(HilbertSpace space, Eigen::MatrixXcd m)
    : space_(space), m_(std::move(m)) {
    if (m_.rows() != space_.dim || m_.cols() != space_.dim)
        throw DimensionMismatch("density matrix does not match its space");
    if (hermiticity_defect() > 1e-10)
        throw InvalidParams("density matrix is not Hermitian");
    if (std::abs(m_.trace().real() - 1.0) > 1e-10 || std::abs(m_.trace().imag()) > 1e-10)
        throw InvalidParams("density matrix trace is not 1");
    if (min_eigenvalue() < -1e-10)
        throw InvalidParams("density matrix has a negative eigenvalue");
}

double DensityMatrix::hermiticity_defect() const {
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
    return DensityMatrix(psi.space(), psi.amplitudes() * psi.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::vacuum(HilbertSpace space) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(space.dim, space.dim);
    m(0, 0) = 1.0;
    return DensityMatrix(space, std::move(m));
}

// --- ladder operators ------------------------------------------------------

Operator annihilation(HilbertSpace space) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(space.dim, space.dim);
    for (int n = 1; n < space.dim; ++n) m(n - 1, n) = std::sqrt(double(n));
    return Operator(space, std::move(m));
}

Operator creation(HilbertSpace space) { return annihilation(space).adjoint(); }

Operator number_operator(HilbertSpace space) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(space.dim, space.dim);
    for (int n = 0; n < space.dim; ++n) m(n, n) = double(n);
    return Operator(space, std::move(m));
}

// --- squeeze ----------------------------------------------------------------

Operator squeeze(HilbertSpace space, double r) {
    if (!std::isfinite(r)) throw InvalidParams("squeeze parameter must be finite");
    const Operator a = annihilation(space);
    Eigen::MatrixXcd gen = (r / 4.0) * (a.matrix() * a.matrix() -
                                        a.matrix().adjoint() * a.matrix().adjoint());
    Eigen::MatrixXcd S = gen.exp();
    const int g = space.guard();
    const double defect = (S.adjoint() * S - Eigen::MatrixXcd::Identity(space.dim, space.dim))
                              .topLeftCorner(g, g)
                              .cwiseAbs()
                              .maxCoeff();
    if (defect > 1e-9)
        throw TruncationTooSmall("squeeze operator unitarity defect " + std::to_string(defect));
    return Operator(space, std::move(S));
}

StateVector squeezed_number_state(HilbertSpace space, double r, int n) {
    if (n < 0 || n >= space.guard())
        throw TruncationTooSmall("squeezed number state needs n < dim/2");
    const Operator S = squeeze(space, r);
    Eigen::VectorXcd v = S.matrix().col(n);
    const int k = 3 * space.dim / 4;
    if (v.tail(space.dim - k).squaredNorm() > 1e-10)
        throw TruncationTooSmall("squeezed number state amplitude tail not converged");
    v /= v.norm();
    return StateVector(space, std::move(v));
}

std::pair<Operator, Operator> bogoliubov_pair(HilbertSpace space, double r) {
    if (!std::isfinite(r)) throw InvalidParams("squeeze parameter must be finite");
    const Operator a = annihilation(space);
    Operator b(space, std::cosh(r / 2.0) * a.matrix() + std::sinh(r / 2.0) * a.matrix().adjoint());
    Operator bd = b.adjoint();
    return {std::move(b), std::move(bd)};
}

namespace detail {

Eigen::MatrixXcd squeezed_thermal_matrix(int dim, double r, double N) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(dim);
    if (N == 0.0) {
        p(0) = 1.0;
    } else {
        const double q = N / (1.0 + N);
        double w = 1.0 / (1.0 + N);
        for (int n = 0; n < dim; ++n) {
            p(n) = w;
            w *= q;
        }
    }
    const Eigen::MatrixXcd S = squeeze(HilbertSpace(dim), r).matrix();
    return S * p.cast<cplx>().asDiagonal() * S.adjoint();
}

} // namespace detail

DensityMatrix squeezed_thermal_state(HilbertSpace space, double r, double N) {
    if (N < 0) throw InvalidParams("thermal occupancy must be >= 0");
    if (N > 0) {
        // geometric tail beyond the guard subspace must be negligible
        const double tail = std::pow(N / (1.0 + N), space.guard());
        if (tail > 1e-12)
            throw TruncationTooSmall("thermal tail " + std::to_string(tail) +
                                     " beyond the guard subspace");
    }
    return DensityMatrix(space, detail::squeezed_thermal_matrix(space.dim, r, N));
}

// --- Hamiltonians -----------------------------------------------------------

Operator effective_hamiltonian(HilbertSpace space, const SystemParams& p) {
    p.validate();
    const Operator a = annihilation(space);
    const Eigen::MatrixXcd& am = a.matrix();
    Eigen::MatrixXcd h = (p.pump() / 4.0) * (am.adjoint() * am.adjoint() + am * am) +
                         (p.K / 2.0) * (am.adjoint() * am);
    return Operator(space, std::move(h));
}

Operator pseudo_hamiltonian(HilbertSpace space, const DerivedParams& p) {
    const double Omega = require_bounded(p.Omega, "Omega");
    const double r = require_bounded(p.r, "r");
    auto [b, bd] = bogoliubov_pair(space, r);
    Eigen::MatrixXcd h = Omega * (bd.matrix() * b.matrix() +
                                  0.5 * Eigen::MatrixXcd::Identity(space.dim, space.dim)) -
                         (p.K / 4.0) * Eigen::MatrixXcd::Identity(space.dim, space.dim);
    return Operator(space, std::move(h));
}

// --- functionals ------------------------------------------------------------

cplx expectation(const DensityMatrix& rho, const Operator& O) {
    check_same_space(rho.space(), O.space(), "expectation");
    // Tr(rho O) without forming the product
    return (O.matrix().transpose().cwiseProduct(rho.matrix())).sum();
}

double tail_mass(const Eigen::MatrixXcd& rho, int k) {
    if (k < 0 || k >= rho.rows()) throw InvalidParams("tail index out of range");
    double s = 0;
    for (int j = k; j < rho.rows(); ++j) s += rho(j, j).real();
    return s;
}

double tail_mass(const DensityMatrix& rho, int k) { return tail_mass(rho.matrix(), k); }

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    check_same_space(rho.space(), sigma.space(), "fidelity");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix());
    Eigen::VectorXd w = es.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXcd sq =
        es.eigenvectors() * w.cwiseSqrt().cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es2(sq * sigma.matrix() * sq,
                                                        Eigen::EigenvaluesOnly);
    const double root_sum = es2.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return root_sum * root_sum;
}

int auto_dimension(double r, double N) {
    static constexpr int candidates[] = {32, 48, 64, 96, 128, 160, 192, 256, 320, 384, 448, 512};
    for (int dim : candidates) {
        const Eigen::MatrixXcd rho = detail::squeezed_thermal_matrix(dim, r, N);
        if (tail_mass(rho, 3 * dim / 4) < 1e-10) return dim;
    }
    throw TruncationTooSmall("no dimension up to 512 converges the squeezed thermal tail");
}

} // namespace casimir
