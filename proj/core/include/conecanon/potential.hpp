#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "conecanon/cone.hpp"
#include "conecanon/taylor.hpp"

namespace conecanon {

// Value, gradient, Hessian and third derivative of a potential at a point.
struct Jet3 {
    int order = 0;
    double value = 0;
    Vec grad;
    Mat hess;
    std::vector<Mat> third; // third[i](j, k) = F_ijk

    double third_dir(const Vec& u, const Vec& v, const Vec& w) const;
    Mat third_contract(const Vec& u) const; // F_ijk u^i
};

class PotentialModel {
public:
    virtual ~PotentialModel() = default;
    virtual int dim() const = 0;
    // Positive exactly on the open domain.
    virtual double margin(const Vec& x) const = 0;
    virtual Jet3 jet(const Vec& x, int order) const = 0;
    virtual double value(const Vec& x) const { return jet(x, 0).value; }
    // Taylor coefficients of t -> F(x + t v).
    virtual T3 along(const Vec& x, const Vec& v) const;
};

struct PotentialHandle {
    std::shared_ptr<const PotentialModel> model;
    std::optional<double> alpha; // log-homogeneity degree
    std::string label;           // closed-form | transported | numeric | user
    std::optional<ConeSpec> cone;
    double constant = 0;         // additive constant fixed by the anchor procedure

    int dim() const { return model->dim(); }
    double margin(const Vec& x) const { return model->margin(x); }
    bool interior(const Vec& x) const;
    Jet3 jet(const Vec& x, int order = 3) const;
    double operator()(const Vec& x) const;
    T3 along(const Vec& x, const Vec& v) const;
};

using UserFunction = std::function<T3(const std::vector<T3>&)>;

PotentialHandle orthant_potential(int dim);
PotentialHandle lorentz_potential(int dim, const std::optional<Vec>& anchor = std::nullopt);
PotentialHandle psd_potential(int m, const std::optional<Vec>& anchor = std::nullopt);
PotentialHandle transport(const PotentialHandle& F, const Mat& A);
PotentialHandle product_potential(const std::vector<PotentialHandle>& Fs);
PotentialHandle user_potential(int dim, UserFunction f, std::function<double(const Vec&)> margin,
                               std::optional<double> alpha = std::nullopt, std::string label = "user");
PotentialHandle shifted(const PotentialHandle& F, double c);
PotentialHandle scaled(const PotentialHandle& F, double k);

// Closed-form canonical potential: orthant, Lorentz, PSD, simplicial polyhedral,
// and linear images / products of those. Throws Error otherwise.
PotentialHandle canonical_potential(const ConeSpec& spec, const std::optional<Vec>& anchor = std::nullopt);
bool has_closed_form(const ConeSpec& spec);

Jet3 eval_jet3(const PotentialHandle& F, const Vec& x, int order = 3);
// Jets assembled from the model's directional Taylor coefficients.
Jet3 polarized_jet(const PotentialModel& m, const Vec& x, int order);

// Additive constant making H(F0 + c) = e^{2(F0 + c)} at the anchor.
double anchor_constant(const PotentialModel& raw, const Vec& anchor);

double log_det_hessian(const Mat& hess);
double canonical_residual(const PotentialHandle& F, const Vec& x);

// sup |F(e^t x) - F(x) - alpha t| over the pairs; NaN if any evaluation fails.
double log_homogeneity_defect(const PotentialHandle& F, const std::vector<Vec>& xs, const std::vector<double>& ts);

inline constexpr double kInteriorFloor = 1e-9;

} // namespace conecanon
