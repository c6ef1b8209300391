#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "homog/gallery.hpp"
#include "homog/homogenize.hpp"
#include "homog/polynomial.hpp"

namespace homog {

/// Manufactured triple with exact solution u = x_j x_k x_l of -abar_ab u_ab = f.
struct CubicData {
    Polynomial f;
    Polynomial g;
    Polynomial u;
};

/// Indices are zero-based axes.
CubicData cubic_data(const Eigen::MatrixXd& abar, int j, int k, int l);

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    /// RMS residual of the fit in log space.
    double residual = 0.0;
};

/// Least squares fit of log e against log eps. Needs >= 2 points with e > 0.
LogLogFit fit_loglog(const std::vector<double>& eps, const std::vector<double>& e);

struct RateThresholds {
    double good_e0_min = 1.8;
    double bad_e0_min = 0.8;
    double bad_e0_max = 1.2;
    double bad_e1_min = 1.7;
};

struct RateStudyConfig {
    /// 1/eps values, strictly increasing, each a multiple of the first.
    std::vector<int> inv_eps{4, 8, 16, 32};
    /// eps / h
    int cells_per_period = 16;
    /// zero-based (j, k, l) of the cubic data
    std::array<int, 3> jkl{0, 0, 0};
    double tol = kDefaultTol;
    HomogenizeOptions homogenize{};
    RateThresholds thresholds{};
    /// errors at or below this count as exact (no slope is fitted)
    double exact_floor = 1e-12;
};

struct RatePoint {
    double eps = 0.0;
    int inv_eps = 0;
    int box_cells = 0;
    double e0 = 0.0;
    double e1 = 0.0;
    /// slopes against the previous point (absent for the first)
    std::optional<double> local_slope_e0;
    std::optional<double> local_slope_e1;
    double residual = 0.0;
};

struct RateStudy {
    std::string spec_variant;
    Eigen::MatrixXd abar;
    ObstructionTensor c;
    Verdict verdict;
    /// Constant h of the cubic data (sum c^{kl}_j u_jkl).
    double h_const = 0.0;
    double z_max = 0.0;
    std::vector<RatePoint> points;
    /// absent when every error is below the exact floor
    std::optional<LogLogFit> fit_e0;
    std::optional<LogLogFit> fit_e1;
    bool e0_exact = false;
    bool e1_exact = false;
    /// "second_order" (c-good or h == 0) or "first_order"
    std::string expectation;
    bool pass = false;
};

void validate_eps_ladder(const std::vector<int>& inv_eps);

RateStudy run_rate_study(const CoefficientSpec& spec, const RateStudyConfig& config);

/// eps,inv_eps,box_cells,e0,e1,local_slope_e0,local_slope_e1
void write_csv(std::ostream& out, const RateStudy& study);

struct AsymptoticPoint {
    double s = 0.0;
    double distance = 0.0;
    double residual = 0.0;
};

struct AsymptoticStudy {
    std::vector<AsymptoticPoint> points;
    bool strictly_decreasing = false;
    /// final distance / initial distance (0 when the initial one vanishes)
    double ratio = 0.0;
};

AsymptoticStudy run_asymptotic_study(const std::string& a1, const std::string& a2, const std::vector<double>& s_list,
                                     int N, double tol = kDefaultTol);

/// s,distance,residual
void write_csv(std::ostream& out, const AsymptoticStudy& study);

}  // namespace homog
