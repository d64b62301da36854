// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "wtflow/diag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "wtflow/csv.hpp"
#include "wtflow/error.hpp"

namespace wtflow {

double annulus_fraction(std::size_t d, std::size_t n, double beta, RandomStream& stream) {
    const double root = std::sqrt(static_cast<double>(d));
    if (d == 0 || n == 0) throw InvalidArgument("annulus_fraction: d and n must be >= 1");
    if (!(beta > 0.0 && beta <= root)) throw InvalidArgument("annulus_fraction: beta must lie in (0, sqrt(d)]");
    const double lo = root - beta;
    const double hi = root + beta;
    std::size_t inside = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double z = stream.normal();
            s += z * z;
        }
        const double r = std::sqrt(s);
        if (r >= lo && r <= hi) ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(n);
}

double chi_annulus_probability(std::size_t d, double beta) {
    const double root = std::sqrt(static_cast<double>(d));
    if (d == 0 || !(beta > 0.0)) throw InvalidArgument("chi_annulus_probability: need d >= 1 and beta > 0");
    const double lo = std::max(0.0, root - beta);
    const double hi = root + beta;
    const double k = 0.5 * static_cast<double>(d);
    return boost::math::gamma_p(k, 0.5 * hi * hi) - boost::math::gamma_p(k, 0.5 * lo * lo);
}

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double log_normal_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return -0.5 * z * z - std::log(sd) - kLogSqrt2Pi;
}

// Shared state of one quadrature: `ok` drops to false once any interval hits
// the depth limit or the evaluation budget runs out, and the rest of the
// recursion then stops refining.
struct QuadState {
    bool ok = true;
    std::size_t budget = 0;
};

template <class F>
double simpson_step(const F& f, double a, double fa, double b, double fb, double m, double fm, double whole,
                    double tol, int depth, QuadState& st) {
    if (!st.ok || st.budget < 2) {
        st.ok = false;
        return whole;
    }
    st.budget -= 2;
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0) {
        st.ok = false;
        return left + right + delta / 15.0;
    }
    return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1, st) +
           simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1, st);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol, bool& ok) {
    // Split into panels first so the narrow bulk of the integrand is never skipped.
    constexpr int kPanels = 16;
    constexpr int kMaxDepth = 40;
    QuadState st{true, std::size_t{1} << 24};
    const double h = (b - a) / kPanels;
    double total = 0.0;
    for (int p = 0; p < kPanels; ++p) {
        const double lo = a + h * p;
        const double hi = p + 1 == kPanels ? b : a + h * (p + 1);
        const double mid = 0.5 * (lo + hi);
        const double flo = f(lo);
        const double fhi = f(hi);
        const double fmid = f(mid);
        const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += simpson_step(f, lo, flo, hi, fhi, mid, fmid, whole, tol / kPanels, kMaxDepth, st);
    }
    ok = st.ok;
    return total;
}

} // namespace

double kl_perturbation(const Gaussian1D& p0, double eps, double tol) {
    if (!(p0.stddev > 0.0) || !std::isfinite(p0.mean)) throw InvalidArgument("kl_perturbation: invalid p0");
    if (!(eps >= 0.0 && eps <= 1.0)) throw InvalidArgument("kl_perturbation: eps must lie in [0, 1]");
    if (eps == 0.0) return 0.0;
    const double s = std::max(p0.stddev, 1.0);
    const double a = p0.mean - 10.0 * s;
    const double b = p0.mean + 10.0 * s;
    const double log1p_eps = std::log1p(eps);

    // p0 log(p0 / q) = p0 (log(1 + eps) - log(1 + eps N / p0)).
    auto integrand = [&](double x) {
        const double lp = log_normal_pdf(x, p0.mean, p0.stddev);
        const double ratio = std::exp(log_normal_pdf(x, 0.0, 1.0) - lp);
        return std::exp(lp) * (log1p_eps - std::log1p(eps * ratio));
    };
    bool ok = true;
    const double v = adaptive_simpson(integrand, a, b, tol, ok);
    if (!ok || !std::isfinite(v)) throw NumericalError("kl_perturbation: quadrature did not converge");
    return std::max(v, 0.0);
}

std::vector<double> default_kl_eps() {
    std::vector<double> out;
    for (int k = 0; k <= 8; ++k) out.push_back(std::pow(10.0, -3.0 + 0.25 * k));
    return out;
}

KlCurve kl_perturbation_curve(const Gaussian1D& p0, std::span<const double> eps_list, double tol) {
    KlCurve c;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t used = 0;
    for (double e : eps_list) {
        if (!(e >= 0.0 && e <= 0.1)) throw InvalidArgument("kl_perturbation_curve: eps must lie in [0, 0.1]");
        const double kl = kl_perturbation(p0, e, tol);
        c.eps.push_back(e);
        c.kl.push_back(kl);
        if (e > 0.0 && kl > 0.0) {
            const double x = std::log(e);
            const double y = std::log(kl);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++used;
        }
    }
    if (used < 2) {
        c.slope = std::numeric_limits<double>::quiet_NaN();
    } else {
        const double n = static_cast<double>(used);
        c.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }
    return c;
}

namespace {

PathSchedule checked_schedule(const PathSpec& spec, double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("marginal field: t must lie in [0, 1]");
    const PathSchedule s = schedule(spec, t);
    if (!(s.sigma >= spec.t_min)) {
        throw SingularityError("marginal field: sigma_t = " + std::to_string(s.sigma) + " below t_min at t=" +
                               std::to_string(t));
    }
    return s;
}

std::vector<double> weights_for(std::span<const double> x, const PathSchedule& s, const Tensor& dataset) {
    const std::size_t m = dataset.rows();
    const std::size_t d = dataset.cols();
    std::vector<double> logw(m);
    const double inv = 1.0 / (2.0 * s.sigma * s.sigma);
    for (std::size_t i = 0; i < m; ++i) {
        const auto xi = dataset.row(i);
        double q = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double r = x[j] - s.mean_coeff * xi[j];
            q += r * r;
        }
        logw[i] = -q * inv;
    }
    const double top = *std::max_element(logw.begin(), logw.end());
    if (!std::isfinite(top)) throw NumericalError("marginal field: all weights underflow");
    double total = 0.0;
    for (double& w : logw) {
        w = std::exp(w - top);
        total += w;
    }
    for (double& w : logw) w /= total;
    return logw;
}

void require_dataset(const Tensor& dataset, std::size_t d) {
    if (dataset.rank() != 2 || dataset.rows() == 0) throw InvalidArgument("marginal field: dataset must be [M, d]");
    if (dataset.cols() != d) throw InvalidArgument("marginal field: dataset dimension mismatch");
}

} // namespace

std::vector<double> marginal_weights(const Tensor& x, double t, const Tensor& dataset, const PathSpec& spec) {
    if (x.rank() != 1) throw InvalidArgument("marginal_weights: x must be [d]");
    require_dataset(dataset, x.size());
    return weights_for(x.data(), checked_schedule(spec, t), dataset);
}

Tensor marginal_field_oracle(const Tensor& x, double t, const Tensor& dataset, const PathSpec& spec) {
    if (x.rank() == 1) {
        return marginal_field_oracle(x.reshaped(Shape{1, x.size()}), t, dataset, spec).reshaped(x.shape());
    }
    if (x.rank() != 2) throw InvalidArgument("marginal_field_oracle: x must be [d] or [B, d]");
    const std::size_t d = x.cols();
    require_dataset(dataset, d);
    const PathSchedule s = checked_schedule(spec, t);
    const double ratio = s.d_sigma / s.sigma;

    Tensor out(x.shape());
    for (std::size_t b = 0; b < x.rows(); ++b) {
        const auto xb = x.row(b);
        const auto w = weights_for(xb, s, dataset);
        auto ob = out.row(b);
        for (std::size_t i = 0; i < dataset.rows(); ++i) {
            const auto xi = dataset.row(i);
            for (std::size_t j = 0; j < d; ++j) {
                const double u = s.d_mean_coeff * xi[j] + ratio * (xb[j] - s.mean_coeff * xi[j]);
                ob[j] += w[i] * u;
            }
        }
    }
    return out;
}

void NormTable::add_row(std::string name, std::vector<double> row) {
    if (!steps.empty() && row.size() != steps.size()) throw InvalidArgument("NormTable: row width mismatch");
    if (row.empty()) throw InvalidArgument("NormTable: empty row");
    argmin.push_back(static_cast<std::size_t>(std::min_element(row.begin(), row.end()) - row.begin()));
    classes.push_back(std::move(name));
    means.push_back(std::move(row));
}

std::vector<std::size_t> norm_table_steps(std::size_t n_steps, std::size_t stride) {
    if (n_steps == 0 || stride == 0 || n_steps % stride != 0) {
        throw InvalidArgument("norm table: stride must divide a positive step count");
    }
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s <= n_steps; s += stride) out.push_back(s);
    return out;
}

std::vector<double> trajectory_norm_row(const VectorField& field, const Tensor& samples, std::size_t n_steps,
                                        std::size_t stride, const FlowOptions& opts) {
    const auto grid = norm_table_steps(n_steps, stride);
    if (samples.rank() != 2 || samples.rows() == 0) throw InvalidArgument("trajectory_norm_row: need [N, d] samples");
    const BatchTrajectory traj = integrate_euler_batch(samples, field, n_steps, true, opts);
    std::vector<double> row;
    for (std::size_t step : grid) {
        const auto& norms = traj.norms[step];
        double s = 0.0;
        for (double v : norms) s += v;
        row.push_back(s / static_cast<double>(norms.size()));
    }
    return row;
}

void write_norm_table_csv(const std::filesystem::path& path, const NormTable& table) {
    CsvTable t{{"class"}, {}};
    for (std::size_t s : table.steps) t.header.push_back("step_" + std::to_string(s));
    t.header.push_back("argmin");
    for (std::size_t r = 0; r < table.means.size(); ++r) {
        std::vector<std::string> row{table.classes[r]};
        for (double v : table.means[r]) row.push_back(format_double(v));
        row.push_back(std::to_string(table.steps.empty() ? table.argmin[r] : table.steps[table.argmin[r]]));
        t.rows.push_back(std::move(row));
    }
    write_csv(path, t);
}

RadialStats initial_radial_stats(const VectorField& field, const Tensor& samples, double t_eval) {
    if (samples.rank() != 2 || samples.rows() == 0) throw InvalidArgument("initial_radial_stats: need [N, d] samples");
    const Tensor v = evaluate_field(field, samples, t_eval);
    RadialStats st;
    double sum = 0.0;
    std::size_t inward = 0;
    for (std::size_t i = 0; i < samples.rows(); ++i) {
        const auto x = samples.row(i);
        const double r = norm2(x);
        if (r == 0.0) {
            ++st.skipped;
            continue;
        }
        const double radial = dot(v.row(i), x) / r;
        sum += radial;
        if (radial < 0.0) ++inward;
        ++st.counted;
    }
    if (st.counted > 0) {
        st.mean_radial = sum / static_cast<double>(st.counted);
        st.fraction_inward = static_cast<double>(inward) / static_cast<double>(st.counted);
    }
    return st;
}

RadiusBound radius_bound_check(const Tensor& features) {
    const Tensor rows = to_location_rows(features);
    if (rows.rank() != 2) throw InvalidArgument("radius_bound_check: need [N, d] or [N, C, H, W] features");
    RadiusBound rb;
    rb.sqrt_d = std::sqrt(static_cast<double>(rows.cols()));
    for (double n : row_norms(rows)) rb.max_norm = std::max(rb.max_norm, n);
    rb.violation = rb.max_norm > rb.sqrt_d;
    return rb;
}

} // namespace wtflow
