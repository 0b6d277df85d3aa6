#pragma once

#include "hypervol/gram.hpp"
#include "hypervol/quadrature.hpp"
#include "hypervol/types.hpp"

namespace hypervol {

// Dihedral angle of the simplex at the (n-2)-face spanned by I, |I| = n-1.
struct DihedralAngle {
    IndexSet face;
    double value = 0.0;  // radians, in (0, pi) strictly inside the chamber
};

enum class VolumeMethod { ClosedForm, Schlafli, Quadrature };

inline std::string to_string(VolumeMethod m) {
    switch (m) {
        case VolumeMethod::ClosedForm: return "closed_form";
        case VolumeMethod::Schlafli: return "schlafli";
        case VolumeMethod::Quadrature: return "quadrature";
    }
    return "?";
}

struct VolumeResult {
    double value = 0.0;
    VolumeMethod method = VolumeMethod::ClosedForm;
    double error_estimate = 0.0;
};

// Gram matrix with all off-diagonal entries cos(edge) / cosh(edge).
GramR regular_simplex_gram(int n, double edge, Space space);

// cos a = eps^(n-1) D_{I',I''} / sqrt(D_{I'} D_{I''}),
// sin a = sqrt(D D_I / (D_{I'} D_{I''})) with positive square roots on the
// chamber; a = atan2(sin, cos).
DihedralAngle dihedral_angle(const GramR& C, const IndexSet& I, Space space);

// n = 1: arccos / arcosh of the single entry. n = 2: eps * (angle sum - pi).
VolumeResult volume_closed_low_dim(const GramR& C, Space space);

// Independent oracle: maps vertices to the projective chart (Klein ball for
// hyperbolic, gnomonic for spherical), where geodesic simplices are Euclidean
// simplices, and integrates the metric volume density adaptively.
VolumeResult volume_oracle_quadrature(const GramR& C, Space space, double target_err,
                                      Exec exec = default_exec());

// Integrates the volume differential
//   dV = (eps/(n-1)) * sum_{|I|=n-1} V_I(C) d alpha_I(C)
// along the piecewise-linear path through `waypoints`, which must stay inside
// the chamber (verified by sampling). Face volumes V_I are evaluated
// recursively (closed forms below dimension 3).
double schlafli_integrate(const std::vector<GramR>& waypoints, Space space, double tol);

// Full volume: closed form for n <= 2; otherwise base volume at the regular
// edge-1 simplex plus the path integral of the volume differential along a
// constructed path.
VolumeResult volume(const GramR& C, Space space, double tol = 1e-9);

// Volume of the regular edge-1 simplex, quadrature-computed once per
// (n, space) and cached (also on disk under $HYPERVOL_CACHE_DIR if set).
VolumeResult base_regular_volume(int n, Space space);

// Path used by volume(): straight segment in Gram coordinates when it stays
// inside the chamber, otherwise a polyline through edge-length interpolation
// waypoints (with a vertex-interpolation fallback). Throws std::domain_error
// naming a violated minor if every strategy fails.
std::vector<GramR> chamber_path(const GramR& from, const GramR& to, Space space);

// Value of the volume differential at C in direction E (symmetric,
// zero-diagonal). Used by gradient tests and by schlafli_integrate.
double volume_form(const GramR& C, const MatrixR& E, Space space);

}  // namespace hypervol
