#pragma once

#include <Eigen/Dense>

#include "hypervol/types.hpp"

namespace hypervol {

template <class S>
using DenseMatrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
using MatrixR = DenseMatrix<Real>;
using MatrixC = DenseMatrix<Complex>;
using VectorR = Eigen::VectorXd;
using VectorC = Eigen::VectorXcd;

// Symmetric (n+1)x(n+1) scalar matrix with unit diagonal. n is the dimension
// index: a simplex in X^n has n+1 vertices and this is its Gram matrix of
// pairwise inner products (cos / cosh of edge lengths on the real chambers).
template <class S>
class GramMatrix {
public:
    // Identity matrix of dimension index n.
    explicit GramMatrix(int n) {
        if (n < 0) throw std::invalid_argument("GramMatrix: n must be >= 0");
        m_ = DenseMatrix<S>::Identity(n + 1, n + 1);
    }

    // Validates shape, symmetry and unit diagonal, then symmetrizes exactly.
    static GramMatrix from_entries(DenseMatrix<S> m, double tol = 1e-9) {
        if (m.rows() != m.cols() || m.rows() < 1)
            throw std::invalid_argument("GramMatrix: entries must be square and non-empty");
        const double scale = 1.0 + m.cwiseAbs().maxCoeff();
        for (int j = 0; j < m.rows(); ++j) {
            if (std::abs(m(j, j) - S(1)) > tol * scale)
                throw std::invalid_argument("GramMatrix: diagonal entry != 1 at " + std::to_string(j));
            for (int k = j + 1; k < m.cols(); ++k)
                if (std::abs(m(j, k) - m(k, j)) > tol * scale)
                    throw std::invalid_argument("GramMatrix: asymmetry at (" + std::to_string(j) +
                                                "," + std::to_string(k) + ")");
        }
        GramMatrix g(int(m.rows()) - 1);
        g.m_ = ((m + m.transpose()) / S(2)).eval();
        g.m_.diagonal().setConstant(S(1));
        return g;
    }

    int dim() const { return int(m_.rows()) - 1; }
    int size() const { return int(m_.rows()); }

    S at(int j, int k) const { return m_(j, k); }

    // Sets both (j,k) and (k,j); the diagonal is immutable.
    void set(int j, int k, S v) {
        if (j == k) throw std::invalid_argument("GramMatrix: diagonal is fixed at 1");
        m_(j, k) = v;
        m_(k, j) = v;
    }

    const DenseMatrix<S>& entries() const { return m_; }

    DenseMatrix<S> submatrix(const IndexSet& I, const IndexSet& J) const {
        DenseMatrix<S> out(I.size(), J.size());
        for (size_t a = 0; a < I.size(); ++a)
            for (size_t b = 0; b < J.size(); ++b) out(a, b) = m_(I[a], J[b]);
        return out;
    }

    GramMatrix principal(const IndexSet& I) const {
        if (!is_valid_index_set(I, size()) || I.empty())
            throw std::invalid_argument("GramMatrix::principal: bad index set");
        GramMatrix g(int(I.size()) - 1);
        g.m_ = submatrix(I, I);
        return g;
    }

    double scale() const { return 1.0 + m_.cwiseAbs().maxCoeff(); }

private:
    DenseMatrix<S> m_;
};

using GramR = GramMatrix<Real>;
using GramC = GramMatrix<Complex>;

inline GramC to_complex(const GramR& C) {
    return GramC::from_entries(C.entries().cast<Complex>());
}

// ---------------------------------------------------------------------------
// Minors
// ---------------------------------------------------------------------------

// Minor with rows I and columns J (both strictly increasing). The principal
// case I == J gives D_I; the full case gives D. Empty sets give 1.
template <class S>
S minor_det(const GramMatrix<S>& C, const IndexSet& I, const IndexSet& J) {
    if (I.size() != J.size())
        throw std::invalid_argument("minor_det: |I| != |J|");
    if (!is_valid_index_set(I, C.size()) || !is_valid_index_set(J, C.size()))
        throw std::invalid_argument("minor_det: index sets must be strictly increasing subsets of {0..n}");
    if (I.empty()) return S(1);
    if (I.size() == 1) return C.at(I[0], J[0]);
    return C.submatrix(I, J).determinant();
}

template <class S>
S principal_minor(const GramMatrix<S>& C, const IndexSet& I) {
    return minor_det(C, I, I);
}

template <class S>
S principal_minor_by_mask(const GramMatrix<S>& C, std::uint32_t mask) {
    return principal_minor(C, set_of(mask));
}

// All 2^(n+1) principal minors, indexed by subset bitmask.
template <class S>
std::vector<S> all_principal_minors(const GramMatrix<S>& C) {
    const std::uint32_t total = 1u << C.size();
    std::vector<S> d(total);
    for (std::uint32_t m = 0; m < total; ++m) d[m] = principal_minor_by_mask(C, m);
    return d;
}

// D*D_I - (D_{I'}*D_{I''} - D_{I',I''}^2) for |I| = n-1, where I' and I'' are
// the two n-element supersets of I. Zero for every symmetric matrix (Jacobi's
// identity for complementary minors); the return value is the rounding
// residual.
template <class S>
S jacobi_residual(const GramMatrix<S>& C, const IndexSet& I) {
    const int n = C.dim();
    if (int(I.size()) != n - 1)
        throw std::invalid_argument("jacobi_residual: need |I| = n-1");
    if (!is_valid_index_set(I, C.size()))
        throw std::invalid_argument("jacobi_residual: bad index set");
    std::uint32_t mask = mask_of(I);
    IndexSet missing = set_of(~mask & ((1u << C.size()) - 1u));
    IndexSet Ip = set_of(mask | (1u << missing[0]));
    IndexSet Ipp = set_of(mask | (1u << missing[1]));
    IndexSet full = set_of((1u << C.size()) - 1u);
    S D = principal_minor(C, full);
    S DI = principal_minor(C, I);
    S Dp = principal_minor(C, Ip);
    S Dpp = principal_minor(C, Ipp);
    S Dx = minor_det(C, Ip, Ipp);
    return D * DI - (Dp * Dpp - Dx * Dx);
}

// Directional derivative of det along E: d/dt det(M + tE) at t = 0,
// evaluated as the sum over rows of det(M with one row replaced by E's row).
// Robust for singular M, unlike the trace formula.
template <class S>
S det_directional(const DenseMatrix<S>& M, const DenseMatrix<S>& E) {
    const int m = int(M.rows());
    if (m == 0) return S(0);
    if (m == 1) return E(0, 0);
    S sum(0);
    DenseMatrix<S> W = M;
    for (int r = 0; r < m; ++r) {
        W.row(r) = E.row(r);
        sum += W.determinant();
        W.row(r) = M.row(r);
    }
    return sum;
}

// ---------------------------------------------------------------------------
// Domain classification and chamber geometry
// ---------------------------------------------------------------------------

// Classifies a real Gram matrix against the two simplex chambers. tol <= 0
// selects the default band 1e-9 * ||C||_F. Within the band the answer is
// OnHypersurface and genuinely indeterminate.
DomainClass classify_domain(const GramR& C, double tol = -1.0);

// Complex matrices classify as NonReal unless the imaginary part vanishes.
DomainClass classify_domain(const GramC& C, double tol = -1.0);

// The matrix C^lambda exhibiting a transverse intersection of the full
// determinant locus D = 0 with exactly one further component D_I = 0 (sign
// sigma resolves the linear factor when |I| = 2; it is free for |I| >= 3).
// Canonical form assumes I = {0..k-1}; the index-set overload relabels.
GramR witness_matrix(int n, int k, int sigma);
GramR witness_matrix(int n, const IndexSet& I, int sigma);

// Bilinear form of the vector model: Euclidean dot for the sphere, Minkowski
// x0*y0 - sum x_i*y_i for hyperbolic space.
double bilinear(Space space, const VectorR& a, const VectorR& b);

// Gram matrix of unit-norm model points (hyperbolic points must be on the
// upper sheet). The matrix size equals the number of points.
GramR gram_from_vertices(const std::vector<VectorR>& points, Space space, double tol = 1e-8);

// Recovers vertices from a chamber matrix in canonical gauge: first vertex at
// (1,0,...,0), vertex j supported on coordinates 0..j with positive leading
// new coordinate (signature-aware triangular factorization).
std::vector<VectorR> vertices_from_gram(const GramR& C, Space space);

}  // namespace hypervol
