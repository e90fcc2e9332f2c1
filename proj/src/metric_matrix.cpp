#include "bisim/metric_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bisim {

MetricMatrix::MetricMatrix(std::size_t n, std::vector<double> entries) : n_(n), d_(std::move(entries)) {
    if (d_.size() != n_ * n_) {
        throw std::invalid_argument("MetricMatrix: expected n*n entries");
    }
}

double MetricMatrix::max_entry() const {
    return d_.empty() ? 0.0 : *std::max_element(d_.begin(), d_.end());
}

double sup_distance(const MetricMatrix& a, const MetricMatrix& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("sup_distance: size mismatch");
    }
    double m = 0.0;
    for (std::size_t k = 0; k < a.entries().size(); ++k) {
        m = std::max(m, std::abs(a.entries()[k] - b.entries()[k]));
    }
    return m;
}

MetricMatrix discrete_metric(std::size_t n) {
    MetricMatrix d(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            d(i, j) = i == j ? 0.0 : 1.0;
        }
    }
    return d;
}

std::vector<std::string> semimetric_violations(const MetricMatrix& d, const Tolerances& tol, double upper_bound) {
    std::vector<std::string> out;
    const std::size_t n = d.size();
    auto report = [&](auto&&... parts) {
        std::ostringstream os;
        os.precision(12);
        (os << ... << parts);
        out.push_back(os.str());
    };
    for (std::size_t i = 0; i < n; ++i) {
        if (d(i, i) != 0.0) {
            report("nonzero diagonal at ", i, ": ", d(i, i));
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double v = d(i, j);
            if (!std::isfinite(v) || v < 0.0) {
                report("negative or non-finite distance at (", i, ", ", j, "): ", v);
            }
            if (j > i && d(i, j) != d(j, i)) {
                report("asymmetric at (", i, ", ", j, "): ", d(i, j), " vs ", d(j, i));
            }
            if (upper_bound >= 0.0 && v > upper_bound + tol.triangle) {
                report("distance at (", i, ", ", j, ") = ", v, " exceeds bound ", upper_bound);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                if (d(i, k) > d(i, j) + d(j, k) + tol.triangle) {
                    report("triangle inequality fails for (", i, ", ", j, ", ", k, "): ", d(i, k), " > ",
                           d(i, j) + d(j, k));
                }
            }
        }
    }
    return out;
}

} // namespace bisim
