// Test-only reference implementations, written independently of the library
// code paths they check: plain loops, no shared helpers beyond the standard
// library.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace oracles {

inline double dot(const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
    return s;
}

inline double norm(const std::vector<double>& v) { return std::sqrt(dot(v, v)); }

inline double cosine(const std::vector<double>& u,
                     const std::vector<double>& v) {
    return dot(u, v) / (norm(u) * norm(v));
}

// Exhaustive scan over a row-major matrix; ties to the lowest row index.
inline std::vector<std::pair<std::size_t, double>> scan_neighbors(
    const std::vector<std::vector<double>>& rows,
    const std::vector<double>& query, std::size_t count,
    const std::vector<bool>& excluded) {
    std::vector<std::pair<std::size_t, double>> all;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (excluded[i]) continue;
        all.emplace_back(i, cosine(rows[i], query));
    }
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        return a.second > b.second;
    });
    if (all.size() > count) all.resize(count);
    return all;
}

// Mean of pair differences, then normalize.
inline std::vector<double> mean_difference_axis(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>&
        pairs) {
    std::vector<double> acc(pairs[0].first.size(), 0.0);
    for (const auto& [a, b] : pairs)
        for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += a[j] - b[j];
    for (double& x : acc) x /= static_cast<double>(pairs.size());
    double n = norm(acc);
    for (double& x : acc) x /= n;
    return acc;
}

// Centered variance fraction along a unit axis, via the explicit covariance
// quadratic form d^T C d / trace(C), C = sum (x - mean)(x - mean)^T.
inline double variance_fraction(const std::vector<std::vector<double>>& rows,
                                const std::vector<double>& axis) {
    std::size_t n = rows.size(), k = rows[0].size();
    std::vector<double> mean(k, 0.0);
    for (const auto& r : rows)
        for (std::size_t j = 0; j < k; ++j) mean[j] += r[j];
    for (double& m : mean) m /= static_cast<double>(n);

    std::vector<std::vector<double>> cov(k, std::vector<double>(k, 0.0));
    for (const auto& r : rows)
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                cov[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]);

    double quad = 0.0, trace = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        trace += cov[i][i];
        for (std::size_t j = 0; j < k; ++j) quad += axis[i] * cov[i][j] * axis[j];
    }
    return quad / (dot(axis, axis) * trace);
}

// Largest eigenvalue fraction of the centered scatter matrix by cyclic
// Jacobi rotations (dense, test-sized matrices only).
inline double top_eigen_fraction(const std::vector<std::vector<double>>& rows) {
    std::size_t n = rows.size(), k = rows[0].size();
    std::vector<double> mean(k, 0.0);
    for (const auto& r : rows)
        for (std::size_t j = 0; j < k; ++j) mean[j] += r[j];
    for (double& m : mean) m /= static_cast<double>(n);

    std::vector<std::vector<double>> a(k, std::vector<double>(k, 0.0));
    for (const auto& r : rows)
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                a[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]);

    double trace = 0.0;
    for (std::size_t i = 0; i < k; ++i) trace += a[i][i];

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < k; ++p)
            for (std::size_t q = p + 1; q < k; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-22 * trace * trace) break;
        for (std::size_t p = 0; p < k; ++p) {
            for (std::size_t q = p + 1; q < k; ++q) {
                if (a[p][q] == 0.0) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t i = 0; i < k; ++i) {
                    double aip = a[i][p], aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < k; ++i) {
                    double api = a[p][i], aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
            }
        }
    }
    double top = a[0][0];
    for (std::size_t i = 1; i < k; ++i) top = std::max(top, a[i][i]);
    return top / trace;
}

// Student-t two-sided tail probability by Simpson integration of the pdf.
inline double t_two_sided_p(double t, double df) {
    double abs_t = std::abs(t);
    auto pdf = [df](double x) {
        double log_num = std::lgamma((df + 1.0) / 2.0);
        double log_den = std::lgamma(df / 2.0) +
                         0.5 * std::log(df * std::acos(-1.0));
        return std::exp(log_num - log_den -
                        (df + 1.0) / 2.0 * std::log1p(x * x / df));
    };
    // integrate pdf over [-abs_t, abs_t], p = 1 - that
    const int steps = 20000;
    double h = 2.0 * abs_t / steps;
    double sum = pdf(-abs_t) + pdf(abs_t);
    for (int i = 1; i < steps; ++i)
        sum += pdf(-abs_t + i * h) * (i % 2 ? 4.0 : 2.0);
    double central = sum * h / 3.0;
    return std::max(0.0, 1.0 - central);
}

// SplitMix64 written out again from the published constants, plus the
// library's documented draw rules (modulo reduction, draw-per-record).
struct SplitMixRef {
    std::uint64_t state;
    explicit SplitMixRef(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

inline std::vector<std::size_t> ref_bootstrap_indices(std::size_t tau,
                                                      std::uint64_t seed) {
    SplitMixRef rng(seed);
    std::vector<std::size_t> out(tau);
    for (std::size_t i = 0; i < tau; ++i)
        out[i] = static_cast<std::size_t>(rng.next() % tau);
    return out;
}

}  // namespace oracles
