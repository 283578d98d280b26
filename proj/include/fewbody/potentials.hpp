#pragma once

// Pair-potential catalog, epsilon-rescaling, potential constants and moments,
// coupling schedules and the Hardy lower bound for the coupling threshold.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fewbody/quadrature.hpp"

namespace fewbody {

enum class PotentialKind { gaussian, smooth_bump, square_well, coulombic_cutoff, table };
enum class SignClass { nonnegative, nonpositive, mixed };

struct PotentialSpec {
    PotentialKind kind = PotentialKind::gaussian;
    double amplitude = 1.0;
    double width = 1.0;
    double vcap = 1e6; // guard for table imports and capped sampling
    SignClass sign_class = SignClass::nonnegative;
    std::vector<std::pair<double, double>> table; // (radius, value), sorted

    static PotentialSpec gaussian_spec(double amplitude = 1.0, double width = 1.0) {
        PotentialSpec s;
        s.kind = PotentialKind::gaussian;
        s.amplitude = amplitude;
        s.width = width;
        s.sign_class = amplitude >= 0 ? SignClass::nonnegative : SignClass::nonpositive;
        return s;
    }
    static PotentialSpec smooth_bump_spec(double amplitude = 1.0, double width = 1.0) {
        PotentialSpec s;
        s.kind = PotentialKind::smooth_bump;
        s.amplitude = amplitude;
        s.width = width;
        s.sign_class = amplitude >= 0 ? SignClass::nonnegative : SignClass::nonpositive;
        return s;
    }
    static PotentialSpec square_well_spec(double height = 1.0, double radius = 1.0) {
        PotentialSpec s;
        s.kind = PotentialKind::square_well;
        s.amplitude = height;
        s.width = radius;
        s.sign_class = height >= 0 ? SignClass::nonnegative : SignClass::nonpositive;
        return s;
    }
    // V(r) = 2/|r| - 1 for |r| <= 1, else 0
    static PotentialSpec coulombic_cutoff_spec() {
        PotentialSpec s;
        s.kind = PotentialKind::coulombic_cutoff;
        s.sign_class = SignClass::nonnegative;
        return s;
    }
    static PotentialSpec table_spec(std::vector<std::pair<double, double>> tab, double vcap = 1e6) {
        PotentialSpec s;
        s.kind = PotentialKind::table;
        s.table = std::move(tab);
        s.vcap = vcap;
        std::sort(s.table.begin(), s.table.end());
        bool pos = false, neg = false;
        for (auto& [r, v] : s.table) {
            if (v > 0) pos = true;
            if (v < 0) neg = true;
        }
        s.sign_class = pos && neg ? SignClass::mixed : (neg ? SignClass::nonpositive : SignClass::nonnegative);
        return s;
    }

    // finite support radius, or +inf for tailed kinds
    double support_radius() const {
        switch (kind) {
            case PotentialKind::smooth_bump:
            case PotentialKind::square_well: return width;
            case PotentialKind::coulombic_cutoff: return 1.0;
            case PotentialKind::table: return table.empty() ? 0.0 : table.back().first;
            default: return std::numeric_limits<double>::infinity();
        }
    }
    // characteristic width for grid-resolution policies
    double width_scale() const {
        const double sr = support_radius();
        return std::isfinite(sr) ? sr : width;
    }
    // radius beyond which the potential is numerically negligible
    double quadrature_radius() const {
        const double sr = support_radius();
        return std::isfinite(sr) ? sr : 14.0 * width;
    }
};

// Radial profile V(t), t = |r| > 0 (t = 0 allowed except for coulombic_cutoff).
inline double evaluate_radial(const PotentialSpec& s, double t) {
    t = std::abs(t);
    switch (s.kind) {
        case PotentialKind::gaussian:
            return s.amplitude * std::exp(-(t / s.width) * (t / s.width));
        case PotentialKind::smooth_bump: {
            const double u = t / s.width;
            if (u >= 1.0) return 0.0;
            return s.amplitude * std::exp(-1.0 / (1.0 - u * u)) * std::exp(1.0);
        }
        case PotentialKind::square_well:
            return t <= s.width ? s.amplitude : 0.0;
        case PotentialKind::coulombic_cutoff:
            if (t == 0.0) throw std::domain_error("coulombic_cutoff: evaluation at the singular point r = 0");
            return t <= 1.0 ? 2.0 / t - 1.0 : 0.0;
        case PotentialKind::table: {
            if (s.table.empty() || t > s.table.back().first) return 0.0;
            auto it = std::lower_bound(s.table.begin(), s.table.end(), std::make_pair(t, -1e300));
            double v;
            if (it == s.table.begin()) v = it->second;
            else {
                auto prev = std::prev(it);
                const double w = (t - prev->first) / (it->first - prev->first);
                v = prev->second + w * (it->second - prev->second);
            }
            return std::clamp(v, -s.vcap, s.vcap);
        }
    }
    return 0.0;
}

inline double evaluate(const PotentialSpec& s, const double* r, int d) {
    double t2 = 0;
    for (int a = 0; a < d; ++a) t2 += r[a] * r[a];
    return evaluate_radial(s, std::sqrt(t2));
}

// V_eps(r) = eps^{-2} V(r/eps)
inline double evaluate_scaled_radial(const PotentialSpec& s, double eps, double t) {
    if (eps <= 0) throw std::invalid_argument("evaluate_scaled: eps must be positive");
    return evaluate_radial(s, t / eps) / (eps * eps);
}
inline double evaluate_scaled(const PotentialSpec& s, double eps, const double* r, int d) {
    double t2 = 0;
    for (int a = 0; a < d; ++a) t2 += r[a] * r[a];
    return evaluate_scaled_radial(s, eps, std::sqrt(t2));
}

// Like evaluate_radial but singularities saturate at vcap instead of throwing;
// used where grids place nodes on the coordinate diagonal.
inline double evaluate_radial_capped(const PotentialSpec& s, double t) {
    if (s.kind == PotentialKind::coulombic_cutoff && t == 0.0) return s.vcap;
    return std::clamp(evaluate_radial(s, t), -s.vcap, s.vcap);
}

// ---- constants and moments ---------------------------------------------------

namespace detail {

inline double sphere_area(int d) {
    switch (d) {
        case 1: return 2.0;       // two half-lines
        case 2: return 2.0 * M_PI;
        case 3: return 4.0 * M_PI;
        default: throw std::invalid_argument("sphere_area: d must be in {1,2,3}");
    }
}

template <typename F>
double golden_section_max(F&& f, double a, double b, double rel_tol = 1e-9) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > rel_tol * std::max(1.0, std::abs(a) + std::abs(b))) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return std::max(fc, fd);
}

} // namespace detail

struct CvDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// C_V = sup_r V_+(r) |r|^2 (positive part); coarse scan plus golden-section
// refinement. use_abs switches to sup |V(r)| |r|^2.
inline double compute_CV(const PotentialSpec& s, bool use_abs = false) {
    auto f = [&](double t) {
        const double v = evaluate_radial_capped(s, t);
        const double vv = use_abs ? std::abs(v) : std::max(v, 0.0);
        return vv * t * t;
    };
    const double R = std::max(s.quadrature_radius() * 2.0, 2.0);
    const int m = 4000;
    double best = 0, tbest = 0;
    std::vector<double> candidates;
    for (int i = 1; i <= m; ++i) candidates.push_back(R * i / m);
    for (int i = 1; i <= 200; ++i) candidates.push_back(R * std::pow(2.0, -0.25 * i)); // log scan near 0
    const double sr = s.support_radius();
    if (std::isfinite(sr) && sr > 0) candidates.push_back(sr * (1.0 - 1e-13));
    for (double t : candidates) {
        const double v = f(t);
        if (v > best) {
            best = v;
            tbest = t;
        }
    }
    // divergence: still growing at the scan boundary
    if (f(R) > 0.999 * best && f(2 * R) > f(R)) throw CvDivergence("compute_CV: sup V(r)|r|^2 diverges");
    const double lo = std::max(tbest * 0.9, 1e-14), hi = std::min(tbest * 1.1, R);
    return std::max(best, detail::golden_section_max(f, lo, hi));
}

// integral |V(r)| |r|^{2s} dr over R^d, radial form
inline double compute_moment(const PotentialSpec& s, double sexp, int d) {
    if (sexp < 0) throw std::invalid_argument("compute_moment: s must be nonnegative");
    const double R = s.quadrature_radius();
    auto f = [&](double t) {
        return std::abs(evaluate_radial(s, t)) * std::pow(t, 2 * sexp + d - 1);
    };
    return detail::sphere_area(d) * integrate_graded(f, R, 1e-9);
}

// integral |V(r)| |r|^2 |log|r|| dr, d = 2 hypothesis of the log-corrected rate
inline double compute_log_moment(const PotentialSpec& s, int d = 2) {
    const double R = s.quadrature_radius();
    auto f = [&](double t) {
        return std::abs(evaluate_radial(s, t)) * t * t * std::abs(std::log(t)) * std::pow(t, d - 1);
    };
    return detail::sphere_area(d) * integrate_graded(f, R, 1e-9);
}

inline double compute_l2_norm_sq(const PotentialSpec& s, int d) {
    const double R = s.quadrature_radius();
    auto f = [&](double t) {
        const double v = evaluate_radial(s, t);
        return v * v * std::pow(t, d - 1);
    };
    return detail::sphere_area(d) * integrate_graded(f, R, 1e-9);
}

struct PotentialMoments {
    double l1_norm = 0;
    double l2_norm_sq = 0;
    double C_V = 0;
    std::vector<std::pair<double, double>> moments; // (s, value)
    double log_moment = 0;                          // d = 2 only
};

inline PotentialMoments compute_moments(const PotentialSpec& s, int d, const std::vector<double>& s_list = {}) {
    PotentialMoments m;
    m.l1_norm = compute_moment(s, 0.0, d);
    m.l2_norm_sq = compute_l2_norm_sq(s, d);
    m.C_V = compute_CV(s);
    for (double se : s_list) m.moments.emplace_back(se, compute_moment(s, se, d));
    if (d == 2) m.log_moment = compute_log_moment(s, d);
    return m;
}

// lambda_max >= d^2 / (C_V N) from the fermionic Hardy inequality
inline double lambda_max_lower_bound(double C_V, int N, int d) {
    if (C_V <= 0 || N < 2) throw std::invalid_argument("lambda_max_lower_bound: need C_V > 0 and N >= 2");
    return static_cast<double>(d) * d / (C_V * N);
}

// ---- coupling schedules --------------------------------------------------------

enum class ScheduleKind { constant, linear, log_reciprocal, table };

struct CouplingSchedule {
    ScheduleKind kind = ScheduleKind::constant;
    double g = 1.0; // linear: lambda = g * eps
    double a = 0.0; // log_reciprocal: 1/lambda = |log eps|/(4 pi) + a
    double c = 1.0; // constant: lambda = c
    std::vector<std::pair<double, double>> table; // (eps, lambda)

    static CouplingSchedule constant_schedule(double c) { return {ScheduleKind::constant, 1, 0, c, {}}; }
    static CouplingSchedule linear_schedule(double g) { return {ScheduleKind::linear, g, 0, 1, {}}; }
    static CouplingSchedule log_reciprocal_schedule(double a) { return {ScheduleKind::log_reciprocal, 1, a, 1, {}}; }
};

inline double coupling_at(const CouplingSchedule& sched, double eps) {
    if (eps <= 0) throw std::invalid_argument("coupling_at: eps must be positive");
    double lambda = 0;
    switch (sched.kind) {
        case ScheduleKind::constant: lambda = sched.c; break;
        case ScheduleKind::linear: lambda = sched.g * eps; break;
        case ScheduleKind::log_reciprocal: {
            if (eps >= 1) throw std::invalid_argument("coupling_at: log_reciprocal needs eps in (0,1)");
            lambda = 1.0 / (std::abs(std::log(eps)) / (4.0 * M_PI) + sched.a);
            break;
        }
        case ScheduleKind::table: {
            if (sched.table.empty()) throw std::invalid_argument("coupling_at: empty table");
            auto it = std::lower_bound(sched.table.begin(), sched.table.end(), std::make_pair(eps, -1e300));
            if (it == sched.table.end()) lambda = sched.table.back().second;
            else if (it == sched.table.begin()) lambda = it->second;
            else {
                auto prev = std::prev(it);
                const double w = (std::log(eps) - std::log(prev->first)) /
                                 (std::log(it->first) - std::log(prev->first));
                lambda = std::exp(std::log(prev->second) + w * (std::log(it->second) - std::log(prev->second)));
            }
            break;
        }
    }
    if (!(lambda > 0)) throw std::runtime_error("coupling_at: schedule produced a nonpositive coupling");
    return lambda;
}

// ---- table potential input -----------------------------------------------------

// Two-column text (radius, value); '#' comments; linear interpolation.
inline PotentialSpec load_table_potential(const std::string& path, double vcap = 1e6) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_table_potential: cannot open " + path);
    std::vector<std::pair<double, double>> tab;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ss(line);
        double r, v;
        if (ss >> r >> v) {
            if (r < 0) throw std::runtime_error("load_table_potential: negative radius");
            tab.emplace_back(r, v);
        }
    }
    if (tab.size() < 2) throw std::runtime_error("load_table_potential: need at least two rows");
    return PotentialSpec::table_spec(std::move(tab), vcap);
}

} // namespace fewbody
