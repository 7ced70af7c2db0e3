#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

namespace conecanon {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Variant { Orthant, Lorentz, PSD, Polyhedral, LinearImage, Product };

std::string variant_name(Variant v);

// Construction tree for a proper open convex cone in R^dim.
struct ConeSpec {
    Variant variant = Variant::Orthant;
    int dim = 0;   // ambient dimension n+1
    int order = 0; // matrix order m for PSD
    Mat normals;   // Polyhedral: one facet normal per row, cone = {x : normals * x > 0}
    Mat A;         // LinearImage: cone = A * inner
    std::shared_ptr<const ConeSpec> inner;
    std::vector<ConeSpec> factors;

    static ConeSpec orthant(int dim);
    static ConeSpec lorentz(int dim);
    static ConeSpec psd(int m);
    static ConeSpec polyhedral(const Mat& normals);
    static ConeSpec linear_image(const ConeSpec& inner, const Mat& A);
    static ConeSpec product(const std::vector<ConeSpec>& factors);
};

ConeSpec cone_from_json(const std::string& text);
std::string cone_to_json(const ConeSpec& spec);
ConeSpec load_cone(const std::string& path);

struct ValidityReport {
    bool proper = false;
    Vec witness;        // interior point of the dual cone
    Vec interior;       // interior point of the cone itself
    double margin = 0;  // dual margin of the witness, scaled by |witness|
    std::string reason;
};

ValidityReport validate_proper(const ConeSpec& spec);

// Signed membership margin: > 0 interior, < 0 exterior, degree-1 homogeneous.
double contains(const ConeSpec& spec, const Vec& x);

Vec interior_point(const ConeSpec& spec);
ConeSpec dual_cone(const ConeSpec& spec);

// Every facet of the cone is a hyperplane (orthant, Lorentz(2), polyhedral, and their images/products).
bool is_polyhedral(const ConeSpec& spec);
// Facet normals of a polyhedral-type cone, one per row.
Mat facet_normals(const ConeSpec& spec);
// Extreme rays of a polyhedral-type cone, one per row (dim <= 4).
Mat extreme_rays(const ConeSpec& spec);

// PSD embedding: lower triangle, row-major, off-diagonals scaled by sqrt(2).
int svec_size(int m);
int smat_order(int n);
Vec svec(const Mat& X);
Mat smat(const Vec& x);
Mat svec_basis(int m, int a);

// Slice {x : w.x = 1} with an orthonormal affine chart s -> origin + basis * s.
struct CrossSection {
    ConeSpec cone;
    Vec w;
    Vec origin;   // interior slice point, w.origin = 1
    Mat basis;    // dim x (dim-1), orthonormal columns spanning w-perp
    Vec lo, hi;   // chart bounding box

    int n() const { return static_cast<int>(basis.cols()); }
    Vec to_cone(const Vec& s) const { return origin + basis * s; }
    Vec to_chart(const Vec& x) const;
    double margin(const Vec& s) const { return contains(cone, to_cone(s)); }
    // Distance from s along unit chart direction d to the boundary.
    double ray_exit(const Vec& s, const Vec& d) const;
};

CrossSection cross_section(const ConeSpec& spec, const Vec& w);

} // namespace conecanon
