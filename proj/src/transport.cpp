#include "bisim/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bisim {

std::vector<double> TransportPlan::row_sums() const {
    std::vector<double> out(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            out[i] += (*this)(i, j);
        }
    }
    return out;
}

std::vector<double> TransportPlan::column_sums() const {
    std::vector<double> out(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            out[j] += (*this)(i, j);
        }
    }
    return out;
}

double TransportPlan::cost(const MetricMatrix& h) const {
    double total = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            total += (*this)(i, j) * h(i, j);
        }
    }
    return total;
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Solution of a dense m x k transportation problem. Reduced costs
// cost(i, j) + source_potential[i] - sink_potential[j] are nonnegative and
// vanish wherever flow is positive.
struct CompactSolution {
    std::vector<double> flow;
    std::vector<double> source_potential;
    std::vector<double> sink_potential;
    double cost = 0.0;
};

// Successive shortest paths with Dijkstra on reduced costs. Sources are nodes
// 0..m-1, sinks m..m+k-1; forward arcs are uncapacitated, reverse arcs carry the
// current flow. Equal-cost paths are broken by hop count.
CompactSolution solve_transport(const std::vector<double>& cost, std::size_t m, std::size_t k,
                                std::vector<double> supply, std::vector<double> demand) {
    const std::size_t nodes = m + k;
    CompactSolution sol;
    sol.flow.assign(m * k, 0.0);
    std::vector<double> pot(nodes, 0.0);
    std::vector<double> dist(nodes);
    std::vector<std::size_t> hops(nodes);
    std::vector<std::size_t> pred(nodes);
    std::vector<char> done(nodes);

    auto has_mass = [](const std::vector<double>& v) {
        return std::any_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
    };

    const std::size_t max_augmentations = 64 * nodes * nodes + 64;
    std::size_t augmentations = 0;
    while (has_mass(supply) && has_mass(demand)) {
        if (++augmentations > max_augmentations) {
            throw std::runtime_error("transport solver exceeded its augmentation limit");
        }
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(hops.begin(), hops.end(), 0);
        std::fill(pred.begin(), pred.end(), kNone);
        std::fill(done.begin(), done.end(), 0);
        for (std::size_t i = 0; i < m; ++i) {
            if (supply[i] > 0.0) {
                dist[i] = -pot[i];
            }
        }

        auto relax = [&](std::size_t from, std::size_t to, double reduced) {
            const double nd = dist[from] + reduced;
            if (nd < dist[to] || (nd == dist[to] && hops[from] + 1 < hops[to])) {
                dist[to] = nd;
                hops[to] = hops[from] + 1;
                pred[to] = from;
            }
        };

        for (std::size_t round = 0; round < nodes; ++round) {
            std::size_t u = kNone;
            for (std::size_t v = 0; v < nodes; ++v) {
                if (done[v] || dist[v] == kInf) {
                    continue;
                }
                if (u == kNone || dist[v] < dist[u] || (dist[v] == dist[u] && hops[v] < hops[u])) {
                    u = v;
                }
            }
            if (u == kNone) {
                break;
            }
            done[u] = 1;
            if (u < m) {
                for (std::size_t j = 0; j < k; ++j) {
                    const std::size_t v = m + j;
                    if (!done[v]) {
                        relax(u, v, cost[u * k + j] + pot[u] - pot[v]);
                    }
                }
            } else {
                const std::size_t j = u - m;
                for (std::size_t i = 0; i < m; ++i) {
                    if (!done[i] && sol.flow[i * k + j] > 0.0) {
                        relax(u, i, -cost[i * k + j] + pot[u] - pot[i]);
                    }
                }
            }
        }

        double farthest = 0.0;
        for (std::size_t v = 0; v < nodes; ++v) {
            if (dist[v] != kInf) {
                farthest = std::max(farthest, dist[v]);
            }
        }
        for (std::size_t v = 0; v < nodes; ++v) {
            pot[v] += dist[v] != kInf ? dist[v] : farthest;
        }

        std::size_t target = kNone;
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t v = m + j;
            if (demand[j] <= 0.0 || dist[v] == kInf) {
                continue;
            }
            if (target == kNone || pot[v] < pot[target] || (pot[v] == pot[target] && hops[v] < hops[target])) {
                target = v;
            }
        }
        if (target == kNone) {
            throw std::runtime_error("transport solver found no augmenting path");
        }

        double bottleneck = demand[target - m];
        std::size_t v = target;
        while (pred[v] != kNone) {
            const std::size_t u = pred[v];
            if (v < m) {
                bottleneck = std::min(bottleneck, sol.flow[v * k + (u - m)]);
            }
            v = u;
        }
        const std::size_t origin = v;
        bottleneck = std::min(bottleneck, supply[origin]);

        v = target;
        while (pred[v] != kNone) {
            const std::size_t u = pred[v];
            if (v >= m) {
                sol.flow[u * k + (v - m)] += bottleneck;
            } else {
                double& f = sol.flow[v * k + (u - m)];
                f = f == bottleneck ? 0.0 : f - bottleneck;
            }
            v = u;
        }
        supply[origin] = supply[origin] == bottleneck ? 0.0 : supply[origin] - bottleneck;
        demand[target - m] = demand[target - m] == bottleneck ? 0.0 : demand[target - m] - bottleneck;
    }

    sol.source_potential.assign(pot.begin(), pot.begin() + static_cast<std::ptrdiff_t>(m));
    sol.sink_potential.assign(pot.begin() + static_cast<std::ptrdiff_t>(m), pot.end());
    for (std::size_t e = 0; e < m * k; ++e) {
        sol.cost += sol.flow[e] * cost[e];
    }
    return sol;
}

void check_distribution(std::span<const double> p, std::size_t n, const char* name) {
    if (p.size() != n) {
        throw std::invalid_argument(std::string("kantorovich: distribution ") + name +
                                    " does not match the cost matrix size");
    }
    for (double x : p) {
        if (!std::isfinite(x) || x < 0.0) {
            throw std::invalid_argument(std::string("kantorovich: distribution ") + name +
                                        " has a negative or non-finite entry");
        }
    }
}

void check_masses(std::span<const double> p, std::span<const double> q, const Tolerances& tol) {
    const double mp = std::accumulate(p.begin(), p.end(), 0.0);
    const double mq = std::accumulate(q.begin(), q.end(), 0.0);
    if (std::abs(mp - mq) > tol.feasibility) {
        std::ostringstream os;
        os.precision(12);
        os << "kantorovich: total masses differ (" << mp << " vs " << mq << ")";
        throw std::invalid_argument(os.str());
    }
}

struct SparseSide {
    std::vector<std::size_t> index;
    std::vector<double> mass;
};

SparseSide support_of(std::span<const double> p) {
    SparseSide side;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) {
            side.index.push_back(i);
            side.mass.push_back(p[i]);
        }
    }
    return side;
}

CompactSolution solve_sparse(const MetricMatrix& h, std::span<const std::size_t> p_index,
                             std::span<const double> p_mass, std::span<const std::size_t> q_index,
                             std::span<const double> q_mass) {
    const std::size_t m = p_index.size();
    const std::size_t k = q_index.size();
    std::vector<double> cost(m * k);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            cost[i * k + j] = h(p_index[i], q_index[j]);
        }
    }
    return solve_transport(cost, m, k, {p_mass.begin(), p_mass.end()}, {q_mass.begin(), q_mass.end()});
}

} // namespace

double sparse_kantorovich_distance(const MetricMatrix& h, std::span<const std::size_t> p_index,
                                   std::span<const double> p_mass, std::span<const std::size_t> q_index,
                                   std::span<const double> q_mass) {
    if (p_index.empty() || q_index.empty()) {
        return 0.0;
    }
    if (p_index.size() == 1 && q_index.size() == 1) {
        return std::min(p_mass[0], q_mass[0]) * h(p_index[0], q_index[0]);
    }
    if (std::equal(p_index.begin(), p_index.end(), q_index.begin(), q_index.end()) &&
        std::equal(p_mass.begin(), p_mass.end(), q_mass.begin(), q_mass.end())) {
        return 0.0;
    }
    return solve_sparse(h, p_index, p_mass, q_index, q_mass).cost;
}

double kantorovich_distance(const MetricMatrix& h, std::span<const double> p, std::span<const double> q,
                            const Tolerances& tol) {
    check_distribution(p, h.size(), "P");
    check_distribution(q, h.size(), "Q");
    check_masses(p, q, tol);
    const SparseSide sp = support_of(p);
    const SparseSide sq = support_of(q);
    return sparse_kantorovich_distance(h, sp.index, sp.mass, sq.index, sq.mass);
}

TransportResult kantorovich(const MetricMatrix& h, std::span<const double> p, std::span<const double> q,
                            const Tolerances& tol) {
    const std::size_t n = h.size();
    check_distribution(p, n, "P");
    check_distribution(q, n, "Q");
    check_masses(p, q, tol);
    if (const auto issues = semimetric_violations(h, tol); !issues.empty()) {
        throw std::invalid_argument("kantorovich: cost is not a semimetric: " + issues.front());
    }

    TransportResult result;
    result.plan = TransportPlan(n);
    result.potentials.assign(n, 0.0);

    const SparseSide sp = support_of(p);
    const SparseSide sq = support_of(q);
    if (!sp.index.empty() && !sq.index.empty()) {
        const CompactSolution sol = solve_sparse(h, sp.index, sp.mass, sq.index, sq.mass);
        const std::size_t k = sq.index.size();
        for (std::size_t i = 0; i < sp.index.size(); ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                result.plan(sp.index[i], sq.index[j]) = sol.flow[i * k + j];
            }
        }
        // h-transform of the sink potentials: the smallest h-Lipschitz function
        // dominating the source-side dual variables.
        for (std::size_t x = 0; x < n; ++x) {
            double f = kInf;
            for (std::size_t j = 0; j < k; ++j) {
                f = std::min(f, h(x, sq.index[j]) - sol.sink_potential[j]);
            }
            result.potentials[x] = f;
        }
        // Shift so that the potentials are anchored at zero on the first target.
        const double shift = result.potentials[sq.index.front()];
        for (double& f : result.potentials) {
            f -= shift;
        }
    }

    result.value = result.plan.cost(h);
    for (std::size_t x = 0; x < n; ++x) {
        result.dual_value += (p[x] - q[x]) * result.potentials[x];
    }

    const auto rows = result.plan.row_sums();
    const auto cols = result.plan.column_sums();
    for (std::size_t x = 0; x < n; ++x) {
        if (std::abs(rows[x] - p[x]) > tol.feasibility || std::abs(cols[x] - q[x]) > tol.feasibility) {
            throw std::runtime_error("kantorovich: plan marginals violate feasibility tolerance");
        }
        for (std::size_t y = 0; y < n; ++y) {
            if (result.potentials[x] - result.potentials[y] > h(x, y) + tol.feasibility) {
                throw std::runtime_error("kantorovich: dual potentials violate the Lipschitz condition");
            }
        }
    }
    if (std::abs(result.value - result.dual_value) > tol.duality_gap) {
        std::ostringstream os;
        os.precision(12);
        os << "kantorovich: duality gap " << result.value - result.dual_value << " exceeds tolerance";
        throw std::runtime_error(os.str());
    }
    return result;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) {
        throw std::invalid_argument("total_variation: size mismatch");
    }
    double l1 = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        l1 += std::abs(p[i] - q[i]);
    }
    return 0.5 * l1;
}

std::vector<double> block_masses(std::span<const double> p, const Partition& partition) {
    if (p.size() != partition.size()) {
        throw std::invalid_argument("block_masses: partition does not cover the support");
    }
    std::vector<double> out(partition.block_count(), 0.0);
    for (std::size_t s = 0; s < p.size(); ++s) {
        out[partition.block_of(s)] += p[s];
    }
    return out;
}

double quotient_total_variation(std::span<const double> p, std::span<const double> q, const Partition& partition) {
    return total_variation(block_masses(p, partition), block_masses(q, partition));
}

MetricMatrix quotient_discrete_metric(const Partition& partition) {
    const std::size_t n = partition.size();
    MetricMatrix d(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            d(i, j) = partition.block_of(i) == partition.block_of(j) ? 0.0 : 1.0;
        }
    }
    return d;
}

} // namespace bisim
