#include "hypervol/simplex_volume.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>

#include <json.hpp>

#include "hypervol/detail/dopri.hpp"

namespace hypervol {

namespace {

// True if classify_domain(C) lands in the chamber of `space`.
bool in_chamber(const GramR& C, Space space, double tol = -1.0) {
    const auto cls = classify_domain(C, tol);
    return (space == Space::Sphere) ? cls.kind == ChamberKind::SphericalSimplex
                                    : cls.kind == ChamberKind::HyperbolicSimplex;
}

std::string chamber_violation_message(const GramR& C, Space space) {
    const auto cls = classify_domain(C);
    if (cls.kind == ChamberKind::OnHypersurface)
        return "minor " + cls.components.front().label() + " vanishes within tolerance";
    const double tol = 1e-9 * C.entries().norm();
    const std::uint32_t total = 1u << C.size();
    for (std::uint32_t m = 0; m < total; ++m) {
        if (set_size(m) < 2) continue;
        double D = principal_minor_by_mask(C, m);
        if (space == Space::Sphere) {
            if (D <= tol) return "principal minor D" + index_set_label(set_of(m)) + " = " +
                                 std::to_string(D) + " is not positive";
        } else {
            double sign = (set_size(m) % 2 == 0) ? 1.0 : -1.0;
            if (sign * D >= -tol)
                return "principal minor D" + index_set_label(set_of(m)) + " = " + std::to_string(D) +
                       " has the wrong sign for the hyperbolic chamber";
        }
    }
    if (space == Space::Hyperbolic)
        for (int j = 0; j < C.size(); ++j)
            for (int k = j + 1; k < C.size(); ++k)
                if (C.at(j, k) <= 1.0)
                    return "entry c(" + std::to_string(j) + "," + std::to_string(k) +
                           ") <= 1 violates the hyperbolic chamber";
    return "matrix is outside the chamber";
}

// cos/sin of the dihedral angle without domain classification.
void dihedral_cos_sin(const GramR& C, const IndexSet& I, Space space, double& cos_a,
                      double& sin_a) {
    const int n = C.dim();
    std::uint32_t mask = mask_of(I);
    IndexSet missing = set_of(~mask & ((1u << C.size()) - 1u));
    IndexSet Ip = set_of(mask | (1u << missing[0]));
    IndexSet Ipp = set_of(mask | (1u << missing[1]));
    double D = principal_minor(C, set_of((1u << C.size()) - 1u));
    double DI = principal_minor(C, I);
    double Dp = principal_minor(C, Ip);
    double Dpp = principal_minor(C, Ipp);
    double Dx = minor_det(C, Ip, Ipp);
    double denom = Dp * Dpp;
    double num = D * DI;
    if (denom <= 0.0 || num < 0.0)
        throw std::domain_error("dihedral_angle: minors have non-chamber signs (D*D_I = " +
                                std::to_string(num) + ", D_{I'}*D_{I''} = " + std::to_string(denom) + ")");
    double s_pow = (space == Space::Hyperbolic && (n - 1) % 2 == 1) ? -1.0 : 1.0;
    cos_a = s_pow * Dx / std::sqrt(denom);
    sin_a = std::sqrt(num / denom);
}

// (n-2)-volume of the face spanned by I, real chamber values.
double face_volume(const GramR& C, const IndexSet& I, Space space, double tol) {
    if (I.size() <= 1) return 1.0;
    GramR F = C.principal(I);
    if (I.size() == 2) {
        double c = F.at(0, 1);
        return space == Space::Hyperbolic ? std::acosh(c) : std::acos(c);
    }
    if (I.size() == 3) {
        double a0, a1, a2, s;
        dihedral_cos_sin(F, {0}, space, a0, s);
        dihedral_cos_sin(F, {1}, space, a1, s);
        dihedral_cos_sin(F, {2}, space, a2, s);
        double sum = std::acos(std::clamp(a0, -1.0, 1.0)) + std::acos(std::clamp(a1, -1.0, 1.0)) +
                     std::acos(std::clamp(a2, -1.0, 1.0));
        return epsilon_of(space) * (sum - std::numbers::pi);
    }
    return volume(F, space, tol).value;
}

// Triangular hyperbolic factorization without the chamber gate; negative
// pivots within `slack` are clamped to zero so boundary matrices recover a
// flat simplex instead of failing.
std::vector<VectorR> hyperbolic_vertices_lenient(const GramR& C, double slack) {
    const int size = C.size();
    std::vector<VectorR> x(size, VectorR::Zero(size));
    x[0](0) = 1.0;
    for (int j = 1; j < size; ++j) {
        VectorR a = VectorR::Zero(size);
        a(0) = C.at(j, 0);
        for (int i = 1; i < j; ++i) {
            double dot = a(0) * x[i](0);
            for (int l = 1; l < i; ++l) dot -= a(l) * x[i](l);
            if (x[i](i) == 0.0)
                throw std::domain_error("vertex recovery: zero pivot inside a degenerate face");
            a(i) = (dot - C.at(j, i)) / x[i](i);
        }
        double q = a(0) * a(0) - 1.0;
        for (int l = 1; l < j; ++l) q -= a(l) * a(l);
        if (q < 0.0) {
            if (q < -slack)
                throw std::domain_error("vertex recovery: matrix is not realizable in hyperbolic space");
            q = 0.0;
        }
        a(j) = std::sqrt(q);
        x[j] = a;
    }
    return x;
}

}  // namespace

GramR regular_simplex_gram(int n, double edge, Space space) {
    if (n < 1) throw std::invalid_argument("regular_simplex_gram: n must be >= 1");
    if (edge <= 0.0) throw std::invalid_argument("regular_simplex_gram: edge must be positive");
    double c = space == Space::Hyperbolic ? std::cosh(edge) : std::cos(edge);
    GramR C(n);
    for (int j = 0; j <= n; ++j)
        for (int k = j + 1; k <= n; ++k) C.set(j, k, c);
    if (space == Space::Sphere && !in_chamber(C, space))
        throw std::domain_error("regular_simplex_gram: spherical Gram matrix is not positive definite at edge " +
                                std::to_string(edge));
    return C;
}

DihedralAngle dihedral_angle(const GramR& C, const IndexSet& I, Space space) {
    const int n = C.dim();
    if (int(I.size()) != n - 1 || !is_valid_index_set(I, C.size()))
        throw std::invalid_argument("dihedral_angle: need a valid index set with |I| = n-1");
    if (!in_chamber(C, space))
        throw std::domain_error("dihedral_angle: " + chamber_violation_message(C, space));
    double c, s;
    dihedral_cos_sin(C, I, space, c, s);
    return DihedralAngle{I, std::atan2(s, c)};
}

VolumeResult volume_closed_low_dim(const GramR& C, Space space) {
    const int n = C.dim();
    if (n != 1 && n != 2)
        throw std::invalid_argument("volume_closed_low_dim: only n = 1, 2");
    if (!in_chamber(C, space))
        throw std::domain_error("volume_closed_low_dim: " + chamber_violation_message(C, space));
    if (n == 1) {
        double c = C.at(0, 1);
        double v = space == Space::Hyperbolic ? std::acosh(c) : std::acos(c);
        return {v, VolumeMethod::ClosedForm, 0.0};
    }
    double sum = 0.0;
    for (int j = 0; j <= 2; ++j) {
        double c, s;
        dihedral_cos_sin(C, {j}, space, c, s);
        sum += std::atan2(s, c);
    }
    return {epsilon_of(space) * (sum - std::numbers::pi), VolumeMethod::ClosedForm, 0.0};
}

VolumeResult volume_oracle_quadrature(const GramR& C, Space space, double target_err, Exec exec) {
    const int n = C.dim();
    if (n < 1 || n > 4)
        throw std::invalid_argument("volume_oracle_quadrature: n must be 1..4");
    const auto cls = classify_domain(C);
    const ChamberKind want =
        space == Space::Sphere ? ChamberKind::SphericalSimplex : ChamberKind::HyperbolicSimplex;
    if (cls.kind != want && cls.kind != ChamberKind::OnHypersurface)
        throw std::domain_error("volume_oracle_quadrature: " + chamber_violation_message(C, space));

    std::vector<VectorR> chart(n + 1);
    if (space == Space::Hyperbolic) {
        auto x = hyperbolic_vertices_lenient(C, 1e-10 * C.scale());
        for (int i = 0; i <= n; ++i) chart[i] = x[i].tail(n) / x[i](0);
    } else {
        auto x = vertices_from_gram(C, space);
        MatrixR V(n + 1, n + 1);
        for (int i = 0; i <= n; ++i) V.col(i) = x[i];
        // Gnomonic pole: the direction w with <v_i, w> = 1 for all vertices
        // strictly supports the simplex cone.
        VectorR w = V.transpose().fullPivLu().solve(VectorR::Ones(n + 1));
        VectorR pole = w.normalized();
        Eigen::HouseholderQR<MatrixR> qr(pole);
        MatrixR Q = qr.householderQ();
        if (Q.col(0).dot(pole) < 0.0) Q = -Q;
        for (int i = 0; i <= n; ++i) {
            VectorR y = Q.transpose() * x[i];
            if (y(0) <= 0.0)
                throw std::domain_error("volume_oracle_quadrature: vertex outside the gnomonic hemisphere");
            chart[i] = y.tail(n) / y(0);
        }
    }

    const double power = -0.5 * double(n + 1);
    const double sgn = space == Space::Hyperbolic ? -1.0 : 1.0;
    auto density = [power, sgn](const double* u, int dim) {
        double r2 = 0.0;
        for (int c = 0; c < dim; ++c) r2 += u[c] * u[c];
        return std::pow(1.0 + sgn * r2, power);
    };

    QuadratureOptions opt;
    opt.target_err = target_err;
    opt.exec = exec;
    QuadratureResult q = integrate_over_simplex(chart, density, opt);
    if (!q.converged)
        throw NumericError("volume_oracle_quadrature: refinement budget exhausted (estimate " +
                               std::to_string(q.value) + ", error " + std::to_string(q.error_estimate) + ")",
                           q.value);
    return {q.value, VolumeMethod::Quadrature, q.error_estimate};
}

double volume_form(const GramR& C, const MatrixR& E, Space space) {
    const int n = C.dim();
    if (n < 2) throw std::invalid_argument("volume_form: n must be >= 2");
    const double face_tol = 1e-10;
    const std::uint32_t full = (1u << C.size()) - 1u;
    IndexSet full_set = set_of(full);
    double D = principal_minor(C, full_set);

    // Principal minors and derivatives with one index removed.
    std::vector<double> Dj(n + 1), dDj(n + 1);
    for (int j = 0; j <= n; ++j) {
        IndexSet Ij = set_of(full & ~(1u << j));
        MatrixR sub = C.submatrix(Ij, Ij);
        MatrixR dsub(Ij.size(), Ij.size());
        for (size_t a = 0; a < Ij.size(); ++a)
            for (size_t b = 0; b < Ij.size(); ++b) dsub(a, b) = E(Ij[a], Ij[b]);
        Dj[j] = sub.determinant();
        dDj[j] = det_directional(sub, dsub);
    }

    const double s_pow = (space == Space::Hyperbolic && (n - 1) % 2 == 1) ? -1.0 : 1.0;
    double sum = 0.0;
    for (int a = 0; a <= n; ++a) {
        for (int b = a + 1; b <= n; ++b) {
            IndexSet I = set_of(full & ~(1u << a) & ~(1u << b));
            IndexSet Ip = set_of(full & ~(1u << b));
            IndexSet Ipp = set_of(full & ~(1u << a));
            double DI = principal_minor(C, I);
            double num = D * DI;
            if (num < 0.0 || Dj[b] * Dj[a] <= 0.0)
                throw std::domain_error("volume_form: " + chamber_violation_message(C, space));
            MatrixR sub = C.submatrix(Ip, Ipp);
            MatrixR dsub(Ip.size(), Ipp.size());
            for (size_t r = 0; r < Ip.size(); ++r)
                for (size_t c = 0; c < Ipp.size(); ++c) dsub(r, c) = E(Ip[r], Ipp[c]);
            double Dx = sub.determinant();
            double dDx = det_directional(sub, dsub);
            double alpha_dot =
                s_pow / std::sqrt(num) * (Dx * (dDj[b] / Dj[b] + dDj[a] / Dj[a]) / 2.0 - dDx);
            sum += face_volume(C, I, space, face_tol) * alpha_dot;
        }
    }
    return epsilon_of(space) / double(n - 1) * sum;
}

double schlafli_integrate(const std::vector<GramR>& waypoints, Space space, double tol) {
    if (waypoints.size() < 1) throw std::invalid_argument("schlafli_integrate: empty path");
    const int n = waypoints.front().dim();
    if (n < 2) throw std::invalid_argument("schlafli_integrate: n must be >= 2");
    for (const auto& W : waypoints)
        if (W.dim() != n) throw std::invalid_argument("schlafli_integrate: mixed dimensions");

    const size_t nseg = waypoints.size() - 1;
    if (nseg == 0) return 0.0;
    const double seg_budget = tol / double(nseg);
    using Vec1 = Eigen::Matrix<double, 1, 1>;

    double total = 0.0;
    for (size_t s = 0; s < nseg; ++s) {
        const MatrixR A = waypoints[s].entries();
        const MatrixR E = waypoints[s + 1].entries() - A;
        if (E.cwiseAbs().maxCoeff() == 0.0) continue;

        for (int i = 0; i <= 16; ++i) {
            GramR C = GramR::from_entries(A + (double(i) / 16.0) * E);
            if (!in_chamber(C, space))
                throw std::domain_error("schlafli_integrate: path exits the chamber at segment " +
                                        std::to_string(s) + ", t = " + std::to_string(i / 16.0) +
                                        ": " + chamber_violation_message(C, space));
        }

        auto f = [&](double t, const Vec1&) -> Vec1 {
            GramR C = GramR::from_entries(A + t * E);
            Vec1 out;
            out(0) = volume_form(C, E, space);
            return out;
        };

        double t = 0.0, h = 0.25;
        Vec1 y;
        y(0) = 0.0;
        while (1.0 - t > 1e-15) {
            h = std::min(h, 1.0 - t);
            Vec1 ynew, err;
            detail::dopri5_step(f, t, y, h, ynew, err);
            double e = std::abs(err(0));
            if (e <= seg_budget * h) {
                t += h;
                y = ynew;
                double grow = (e > 0.0) ? 0.9 * std::pow(seg_budget * h / e, 0.2) : 5.0;
                h *= std::clamp(grow, 1.0, 5.0);
            } else {
                if (h <= 1e-12)
                    throw NumericError("schlafli_integrate: step size underflow", total + y(0));
                h *= std::clamp(0.9 * std::pow(seg_budget * h / e, 0.2), 0.1, 0.9);
            }
        }
        total += y(0);
    }
    return total;
}

std::vector<GramR> chamber_path(const GramR& from, const GramR& to, Space space) {
    const int n = from.dim();
    auto valid = [&](const std::vector<GramR>& wps, std::string* why) {
        for (size_t s = 0; s + 1 < wps.size(); ++s) {
            MatrixR A = wps[s].entries();
            MatrixR E = wps[s + 1].entries() - A;
            for (int i = 0; i <= 16; ++i) {
                GramR C = GramR::from_entries(A + (double(i) / 16.0) * E);
                if (!in_chamber(C, space)) {
                    if (why) *why = chamber_violation_message(C, space);
                    return false;
                }
            }
        }
        return true;
    };

    std::string why = "unknown";
    std::vector<GramR> direct{from, to};
    if (valid(direct, &why)) return direct;

    // Interpolate edge lengths instead of Gram entries.
    auto lengths_ok = [&](const GramR& C) {
        for (int j = 0; j <= n; ++j)
            for (int k = j + 1; k <= n; ++k) {
                double c = C.at(j, k);
                if (space == Space::Hyperbolic && c <= 1.0) return false;
                if (space == Space::Sphere && std::abs(c) >= 1.0) return false;
            }
        return true;
    };
    if (lengths_ok(from) && lengths_ok(to)) {
        MatrixR L0(n + 1, n + 1), L1(n + 1, n + 1);
        L0.setZero();
        L1.setZero();
        for (int j = 0; j <= n; ++j)
            for (int k = 0; k <= n; ++k) {
                if (j == k) continue;
                L0(j, k) = space == Space::Hyperbolic ? std::acosh(from.at(j, k)) : std::acos(from.at(j, k));
                L1(j, k) = space == Space::Hyperbolic ? std::acosh(to.at(j, k)) : std::acos(to.at(j, k));
            }
        for (int segs : {8, 32}) {
            std::vector<GramR> wps;
            for (int i = 0; i <= segs; ++i) {
                double s = double(i) / segs;
                GramR W(n);
                for (int j = 0; j <= n; ++j)
                    for (int k = j + 1; k <= n; ++k) {
                        double l = (1.0 - s) * L0(j, k) + s * L1(j, k);
                        W.set(j, k, space == Space::Hyperbolic ? std::cosh(l) : std::cos(l));
                    }
                wps.push_back(W);
            }
            if (valid(wps, &why)) return wps;
        }
    }

    // Last resort: interpolate recovered vertices on the model quadric.
    try {
        auto xa = vertices_from_gram(from, space);
        auto xb = vertices_from_gram(to, space);
        const int segs = 32;
        std::vector<GramR> wps;
        for (int i = 0; i <= segs; ++i) {
            double s = double(i) / segs;
            std::vector<VectorR> pts(n + 1);
            for (int v = 0; v <= n; ++v) {
                VectorR y = (1.0 - s) * xa[v] + s * xb[v];
                double q = bilinear(space, y, y);
                if (q <= 0.0) throw std::domain_error("vertex interpolation left the model");
                pts[v] = y / std::sqrt(q);
            }
            wps.push_back(gram_from_vertices(pts, space));
        }
        if (valid(wps, &why)) return wps;
    } catch (const std::exception&) {
        // fall through to the diagnostic below
    }

    throw std::domain_error("chamber_path: no admissible path found after 3 retries (" + why + ")");
}

VolumeResult base_regular_volume(int n, Space space) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, VolumeResult> cache;
    const auto key = std::make_pair(n, int(space));
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }

    std::string path;
    if (const char* dir = std::getenv("HYPERVOL_CACHE_DIR")) {
        path = std::string(dir) + "/vstar_" + to_string(space) + "_" + std::to_string(n) + ".json";
        std::ifstream in(path);
        if (in) {
            try {
                nlohmann::json j;
                in >> j;
                VolumeResult r{j.at("value").get<double>(), VolumeMethod::Quadrature,
                               j.at("error_estimate").get<double>()};
                std::lock_guard<std::mutex> lock(mu);
                cache[key] = r;
                return r;
            } catch (const std::exception&) {
                // unreadable cache entry: recompute below
            }
        }
    }

    VolumeResult r = volume_oracle_quadrature(regular_simplex_gram(n, 1.0, space), space,
                                              n <= 3 ? 1e-10 : 3e-9);
    if (!path.empty()) {
        std::ofstream out(path);
        if (out) {
            nlohmann::json j{{"value", r.value}, {"error_estimate", r.error_estimate}};
            out << j.dump(2) << "\n";
        }
    }
    std::lock_guard<std::mutex> lock(mu);
    cache[key] = r;
    return r;
}

VolumeResult volume(const GramR& C, Space space, double tol) {
    const int n = C.dim();
    if (!in_chamber(C, space))
        throw std::domain_error("volume: " + chamber_violation_message(C, space));
    if (n <= 2) return volume_closed_low_dim(C, space);
    VolumeResult base = base_regular_volume(n, space);
    auto path = chamber_path(regular_simplex_gram(n, 1.0, space), C, space);
    double dv = schlafli_integrate(path, space, tol);
    return {base.value + dv, VolumeMethod::Schlafli, tol + base.error_estimate};
}

}  // namespace hypervol
