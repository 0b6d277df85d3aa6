#include "hypervol/gram.hpp"

#include <algorithm>
#include <cmath>

namespace hypervol {

DomainClass classify_domain(const GramR& C, double tol) {
    if (tol <= 0.0) tol = 1e-9 * C.entries().norm();
    const int size = C.size();
    DomainClass out;

    // Hypersurface membership is tested component by component: the linear
    // factors 1 +/- c_jk for pairs, D_I for |I| >= 3.
    for (int j = 0; j < size; ++j) {
        for (int k = j + 1; k < size; ++k) {
            double c = C.at(j, k);
            if (std::abs(1.0 + c) <= tol) out.components.push_back({{j, k}, +1});
            if (std::abs(1.0 - c) <= tol) out.components.push_back({{j, k}, -1});
        }
    }
    const std::uint32_t total = 1u << size;
    std::vector<double> D(total, 1.0);
    for (std::uint32_t m = 0; m < total; ++m) {
        if (set_size(m) < 2) continue;
        D[m] = principal_minor_by_mask(C, m);
        if (set_size(m) >= 3 && std::abs(D[m]) <= tol)
            out.components.push_back({set_of(m), 0});
    }
    if (!out.components.empty()) {
        std::sort(out.components.begin(), out.components.end());
        out.kind = ChamberKind::OnHypersurface;
        return out;
    }

    bool spherical = true;
    for (std::uint32_t m = 0; m < total && spherical; ++m)
        if (set_size(m) >= 2 && D[m] <= tol) spherical = false;
    if (spherical) {
        out.kind = ChamberKind::SphericalSimplex;
        return out;
    }

    bool hyperbolic = true;
    for (int j = 0; j < size && hyperbolic; ++j)
        for (int k = j + 1; k < size; ++k)
            if (C.at(j, k) <= 1.0 + tol) {
                hyperbolic = false;
                break;
            }
    for (std::uint32_t m = 0; m < total && hyperbolic; ++m) {
        if (set_size(m) < 2) continue;
        double sign = (set_size(m) % 2 == 0) ? 1.0 : -1.0;
        if (sign * D[m] >= -tol) hyperbolic = false;
    }
    if (hyperbolic) {
        out.kind = ChamberKind::HyperbolicSimplex;
        return out;
    }

    out.kind = ChamberKind::OtherReal;
    return out;
}

DomainClass classify_domain(const GramC& C, double tol) {
    if (C.entries().imag().cwiseAbs().maxCoeff() > 0.0)
        return DomainClass{ChamberKind::NonReal, {}};
    return classify_domain(GramR::from_entries(C.entries().real()), tol);
}

GramR witness_matrix(int n, int k, int sigma) {
    if (k < 2 || k >= n)
        throw std::invalid_argument("witness_matrix: need 2 <= k < n");
    if (sigma != 1 && sigma != -1)
        throw std::invalid_argument("witness_matrix: sigma must be +1 or -1");
    GramR C(n);
    const double s = double(sigma);
    for (int j = 1; j <= k - 1; ++j) C.set(0, j, -s / std::sqrt(double(k - 1)));
    for (int j = k; j <= n - 1; ++j) C.set(0, j, 2.0);
    C.set(1, n, 1.0 / std::sqrt(1.0 - 1.0 / (4.0 * double(k - 1) * double(n - k))));
    return C;
}

GramR witness_matrix(int n, const IndexSet& I, int sigma) {
    if (!is_valid_index_set(I, n + 1))
        throw std::invalid_argument("witness_matrix: bad index set");
    const int k = int(I.size());
    if (k < 2 || k >= n)
        throw std::invalid_argument("witness_matrix: need 2 <= |I| < n");
    GramR canon = witness_matrix(n, k, sigma);
    // Order-preserving relabeling: I occupies positions 0..k-1, the complement
    // positions k..n.
    std::vector<int> perm(n + 1);
    int pos = 0;
    for (int i : I) perm[pos++] = i;
    std::uint32_t mask = mask_of(I);
    for (int i = 0; i <= n; ++i)
        if (!((mask >> i) & 1u)) perm[pos++] = i;
    GramR C(n);
    for (int a = 0; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b) C.set(perm[a], perm[b], canon.at(a, b));
    return C;
}

double bilinear(Space space, const VectorR& a, const VectorR& b) {
    if (a.size() != b.size() || a.size() < 1)
        throw std::invalid_argument("bilinear: size mismatch");
    if (space == Space::Sphere) return a.dot(b);
    double v = a(0) * b(0);
    for (int i = 1; i < a.size(); ++i) v -= a(i) * b(i);
    return v;
}

GramR gram_from_vertices(const std::vector<VectorR>& points, Space space, double tol) {
    if (points.empty()) throw std::invalid_argument("gram_from_vertices: no points");
    const auto dim = points[0].size();
    for (const auto& p : points) {
        if (p.size() != dim)
            throw std::invalid_argument("gram_from_vertices: inconsistent coordinate sizes");
        double norm = bilinear(space, p, p);
        if (std::abs(norm - 1.0) > tol)
            throw std::invalid_argument("gram_from_vertices: point not on the unit quadric, <x,x> = " +
                                        std::to_string(norm));
        if (space == Space::Hyperbolic && p(0) <= 0.0)
            throw std::invalid_argument("gram_from_vertices: hyperbolic point not on the upper sheet");
    }
    GramR C(int(points.size()) - 1);
    for (size_t j = 0; j < points.size(); ++j)
        for (size_t k = j + 1; k < points.size(); ++k)
            C.set(int(j), int(k), bilinear(space, points[j], points[k]));
    return C;
}

std::vector<VectorR> vertices_from_gram(const GramR& C, Space space) {
    const auto cls = classify_domain(C);
    if (space == Space::Sphere && cls.kind != ChamberKind::SphericalSimplex)
        throw std::invalid_argument("vertices_from_gram: matrix is not in the spherical chamber (" +
                                    to_string(cls.kind) + ")");
    if (space == Space::Hyperbolic && cls.kind != ChamberKind::HyperbolicSimplex)
        throw std::invalid_argument("vertices_from_gram: matrix is not in the hyperbolic chamber (" +
                                    to_string(cls.kind) + ")");

    const int size = C.size();
    std::vector<VectorR> x(size, VectorR::Zero(size));
    x[0](0) = 1.0;
    if (space == Space::Sphere) {
        Eigen::LLT<MatrixR> llt(C.entries());
        if (llt.info() != Eigen::Success)
            throw std::invalid_argument("vertices_from_gram: Cholesky failed (not positive definite)");
        MatrixR L = llt.matrixL();
        for (int j = 0; j < size; ++j) x[j] = L.row(j).transpose();
        return x;
    }
    // Hyperbolic: triangular frame with Minkowski pivots (+,-,...,-). Row j is
    // supported on coordinates 0..j.
    for (int j = 1; j < size; ++j) {
        VectorR a = VectorR::Zero(size);
        a(0) = C.at(j, 0);
        for (int i = 1; i < j; ++i) {
            double dot = a(0) * x[i](0);
            for (int l = 1; l < i; ++l) dot -= a(l) * x[i](l);
            // <x_j, x_i> = dot - a(i) x[i](i) = c_ji
            a(i) = (dot - C.at(j, i)) / x[i](i);
        }
        double q = a(0) * a(0) - 1.0;
        for (int l = 1; l < j; ++l) q -= a(l) * a(l);
        if (q < 0.0) {
            if (q < -1e-12 * C.scale())
                throw std::invalid_argument("vertices_from_gram: factorization pivot failed at vertex " +
                                            std::to_string(j));
            q = 0.0;
        }
        a(j) = std::sqrt(q);
        x[j] = a;
    }
    return x;
}

}  // namespace hypervol
