#include "mocomp/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "mocomp/errors.hpp"

namespace mocomp {
namespace {

constexpr int kNegativeSampleRate = 5;
constexpr double kInitialAlpha = 1.0;
constexpr double kGradientClip = 4.0;
constexpr double kInitRange = 10.0;
constexpr double kMinKDistScale = 1e-3;
constexpr int kSigmaIterations = 64;
constexpr double kSigmaTolerance = 1e-5;

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        sum += d * d;
    }
    return sum;
}

// Portable uniform draw in [0, 1): the engine's output sequence is fixed by
// the standard, unlike std::uniform_real_distribution.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Neighbors {
    std::vector<std::size_t> index;
    std::vector<double> distance;
};

std::vector<Neighbors> exact_knn(const std::vector<std::vector<double>>& rows, std::size_t k) {
    const std::size_t n = rows.size();
    std::vector<Neighbors> out(n);
    std::vector<std::pair<double, std::size_t>> candidates;
    for (std::size_t i = 0; i < n; ++i) {
        candidates.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) candidates.emplace_back(squared_distance(rows[i], rows[j]), j);
        }
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end());
        for (std::size_t r = 0; r < k; ++r) {
            out[i].index.push_back(candidates[r].second);
            out[i].distance.push_back(std::sqrt(candidates[r].first));
        }
    }
    return out;
}

// Bandwidth sigma such that sum_j exp(-(d_j - rho) / sigma) = target.
double calibrate_sigma(const std::vector<double>& dists, double rho, double target) {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double mid = 1.0;
    for (int iter = 0; iter < kSigmaIterations; ++iter) {
        double psum = 0.0;
        for (double d : dists) {
            const double excess = d - rho;
            psum += excess > 0.0 ? std::exp(-excess / mid) : 1.0;
        }
        if (std::abs(psum - target) < kSigmaTolerance) break;
        if (psum > target) {
            hi = mid;
            mid = 0.5 * (lo + hi);
        } else {
            lo = mid;
            mid = std::isinf(hi) ? mid * 2.0 : 0.5 * (lo + hi);
        }
    }
    const double mean = std::accumulate(dists.begin(), dists.end(), 0.0) / static_cast<double>(dists.size());
    return std::max(mid, kMinKDistScale * mean);
}

struct Graph {
    std::vector<std::size_t> head;
    std::vector<std::size_t> tail;
    std::vector<double> weight;
};

Graph fuzzy_graph(const std::vector<std::vector<double>>& rows, std::size_t k) {
    const auto knn = exact_knn(rows, k);
    const double target = std::log2(static_cast<double>(k + 1));
    std::map<std::pair<std::size_t, std::size_t>, double> directed;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& nb = knn[i];
        const double rho = nb.distance.front();
        const double sigma = calibrate_sigma(nb.distance, rho, target);
        for (std::size_t r = 0; r < nb.index.size(); ++r) {
            const double excess = nb.distance[r] - rho;
            directed[{i, nb.index[r]}] = excess > 0.0 ? std::exp(-excess / sigma) : 1.0;
        }
    }
    // fuzzy union: w_ij + w_ji - w_ij * w_ji
    std::map<std::pair<std::size_t, std::size_t>, double> sym;
    for (const auto& [key, w] : directed) {
        auto rev = directed.find({key.second, key.first});
        const double wr = rev == directed.end() ? 0.0 : rev->second;
        const double u = w + wr - w * wr;
        sym[key] = u;
        sym[{key.second, key.first}] = u;
    }
    Graph g;
    for (const auto& [key, w] : sym) {
        g.head.push_back(key.first);
        g.tail.push_back(key.second);
        g.weight.push_back(w);
    }
    return g;
}

std::vector<Point2> optimize_layout(const Graph& graph, std::size_t n, const EmbeddingParams& params) {
    const auto [a, b] = fit_ab(params.min_dist);
    std::mt19937_64 rng(params.seed);

    std::vector<Point2> emb(n);
    for (auto& p : emb) {
        p[0] = (2.0 * unit_draw(rng) - 1.0) * kInitRange;
        p[1] = (2.0 * unit_draw(rng) - 1.0) * kInitRange;
    }

    const double w_max = *std::max_element(graph.weight.begin(), graph.weight.end());
    const double epochs = static_cast<double>(params.n_epochs);
    std::vector<std::size_t> edges;
    std::vector<double> eps;
    for (std::size_t e = 0; e < graph.weight.size(); ++e) {
        const double n_samples = epochs * graph.weight[e] / w_max;
        if (n_samples >= 1.0) {
            edges.push_back(e);
            eps.push_back(epochs / n_samples);
        }
    }
    std::vector<double> next_sample = eps;
    std::vector<double> eps_neg(eps.size());
    for (std::size_t e = 0; e < eps.size(); ++e) eps_neg[e] = eps[e] / kNegativeSampleRate;
    std::vector<double> next_negative = eps_neg;

    auto clip = [](double g) { return std::clamp(g, -kGradientClip, kGradientClip); };

    for (int epoch = 0; epoch < params.n_epochs; ++epoch) {
        const double alpha = kInitialAlpha * (1.0 - static_cast<double>(epoch) / epochs);
        const double now = static_cast<double>(epoch);
        for (std::size_t s = 0; s < edges.size(); ++s) {
            if (next_sample[s] > now) continue;
            const std::size_t j = graph.head[edges[s]];
            const std::size_t k = graph.tail[edges[s]];
            Point2& current = emb[j];
            Point2& other = emb[k];

            double d2 = (current[0] - other[0]) * (current[0] - other[0]) +
                        (current[1] - other[1]) * (current[1] - other[1]);
            if (d2 > 0.0) {
                const double coeff = -2.0 * a * b * std::pow(d2, b - 1.0) / (a * std::pow(d2, b) + 1.0);
                for (int d = 0; d < 2; ++d) {
                    const double g = clip(coeff * (current[d] - other[d]));
                    current[d] += g * alpha;
                    other[d] -= g * alpha;
                }
            }
            next_sample[s] += eps[s];

            const auto n_neg = static_cast<int>((now - next_negative[s]) / eps_neg[s]);
            for (int p = 0; p < n_neg; ++p) {
                const std::size_t r = static_cast<std::size_t>(rng() % n);
                if (r == j) continue;
                const Point2& neg = emb[r];
                d2 = (current[0] - neg[0]) * (current[0] - neg[0]) + (current[1] - neg[1]) * (current[1] - neg[1]);
                if (!(d2 > 0.0)) continue;
                const double coeff = 2.0 * b / ((0.001 + d2) * (a * std::pow(d2, b) + 1.0));
                for (int d = 0; d < 2; ++d) {
                    current[d] += clip(coeff * (current[d] - neg[d])) * alpha;
                }
            }
            next_negative[s] += n_neg * eps_neg[s];
        }
    }
    return emb;
}

}  // namespace

void EmbeddingParams::check() const {
    if (n_neighbors < 2) throw Error(ErrorCode::InvalidArgument, "n_neighbors must be at least 2");
    if (!(min_dist >= 0.0 && min_dist < 1.0)) throw Error(ErrorCode::InvalidArgument, "min_dist must lie in [0, 1)");
    if (n_epochs < 1) throw Error(ErrorCode::InvalidArgument, "n_epochs must be at least 1");
}

std::pair<double, double> fit_ab(double min_dist, double spread) {
    constexpr int kPoints = 300;
    std::vector<double> xs(kPoints);
    std::vector<double> ys(kPoints);
    for (int i = 0; i < kPoints; ++i) {
        const double x = 3.0 * spread * static_cast<double>(i) / (kPoints - 1);
        xs[static_cast<std::size_t>(i)] = x;
        ys[static_cast<std::size_t>(i)] = x < min_dist ? 1.0 : std::exp(-(x - min_dist) / spread);
    }
    auto residual_norm = [&](double a, double b) {
        double sum = 0.0;
        for (int i = 0; i < kPoints; ++i) {
            const double x = xs[static_cast<std::size_t>(i)];
            const double f = 1.0 / (1.0 + a * std::pow(x, 2.0 * b));
            const double r = ys[static_cast<std::size_t>(i)] - f;
            sum += r * r;
        }
        return sum;
    };

    // Levenberg-Marquardt on (a, b)
    double a = 1.0;
    double b = 1.0;
    double lambda = 1e-3;
    double cost = residual_norm(a, b);
    for (int iter = 0; iter < 500; ++iter) {
        Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
        Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
        for (int i = 0; i < kPoints; ++i) {
            const double x = xs[static_cast<std::size_t>(i)];
            if (x == 0.0) continue;  // f is 1 regardless of (a, b)
            const double u = std::pow(x, 2.0 * b);
            const double denom = 1.0 + a * u;
            const double f = 1.0 / denom;
            const double r = ys[static_cast<std::size_t>(i)] - f;
            Eigen::Vector2d grad(-u / (denom * denom), -a * u * 2.0 * std::log(x) / (denom * denom));
            jtj += grad * grad.transpose();
            jtr += grad * r;
        }
        Eigen::Matrix2d damped = jtj;
        damped.diagonal() *= (1.0 + lambda);
        const Eigen::Vector2d step = damped.ldlt().solve(jtr);
        const double na = a + step[0];
        const double nb = b + step[1];
        const double ncost = na > 0.0 && nb > 0.0 ? residual_norm(na, nb) : std::numeric_limits<double>::infinity();
        if (ncost < cost) {
            const bool converged = cost - ncost < 1e-16 * std::max(1.0, cost) && step.norm() < 1e-12;
            a = na;
            b = nb;
            cost = ncost;
            lambda = std::max(lambda * 0.1, 1e-12);
            if (converged) break;
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }
    return {a, b};
}

std::vector<Point2> umap_layout(const std::vector<std::vector<double>>& rows, const EmbeddingParams& params) {
    params.check();
    const std::size_t n = rows.size();
    std::vector<std::size_t> unique_of(n);
    std::vector<std::vector<double>> unique_rows;
    {
        std::map<std::vector<double>, std::size_t> seen;
        for (std::size_t i = 0; i < n; ++i) {
            auto [it, inserted] = seen.emplace(rows[i], unique_rows.size());
            if (inserted) unique_rows.push_back(rows[i]);
            unique_of[i] = it->second;
        }
    }
    std::vector<Point2> unique_points(unique_rows.size(), Point2{0.0, 0.0});
    if (unique_rows.size() >= 2) {
        const std::size_t k = std::min(static_cast<std::size_t>(params.n_neighbors - 1), unique_rows.size() - 1);
        unique_points = optimize_layout(fuzzy_graph(unique_rows, k), unique_rows.size(), params);
    }
    std::vector<Point2> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = unique_points[unique_of[i]];
    return out;
}

PcaResult pca_2d(const std::vector<std::vector<double>>& rows) {
    PcaResult result;
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto d = n == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(rows.front().size());
    Eigen::MatrixXd x(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    result.mean = n > 0 ? Eigen::VectorXd(x.colwise().mean().transpose()) : Eigen::VectorXd::Zero(d);
    const Eigen::MatrixXd centered = x.rowwise() - result.mean.transpose();
    result.components = Eigen::MatrixXd::Zero(d, 2);
    result.eigenvalues = Eigen::VectorXd::Zero(d);
    if (n > 0 && d > 0) {
        const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
        result.eigenvalues = solver.eigenvalues().reverse();
        const Eigen::MatrixXd vectors = solver.eigenvectors().rowwise().reverse();
        for (Eigen::Index c = 0; c < std::min<Eigen::Index>(2, d); ++c) {
            Eigen::VectorXd v = vectors.col(c);
            Eigen::Index arg = 0;
            v.cwiseAbs().maxCoeff(&arg);
            if (v[arg] < 0.0) v = -v;
            result.components.col(c) = v;
        }
    }
    const Eigen::MatrixXd projected = centered * result.components;
    result.points.resize(rows.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        result.points[static_cast<std::size_t>(i)] = {projected(i, 0), projected(i, 1)};
    }
    return result;
}

Embedding embed_joint_states(const std::vector<JointTrajectory>& motions, const EmbeddingParams& params) {
    params.check();
    if (motions.empty()) {
        throw Error(ErrorCode::TooFewSamples, "no motions to embed");
    }
    const std::size_t dof = motions.front().configurations.empty() ? motions.front().dof()
                                                                   : motions.front().configurations.front().size();
    Embedding out;
    std::vector<std::vector<double>> rows;
    for (std::size_t m = 0; m < motions.size(); ++m) {
        const auto& traj = motions[m];
        const std::size_t begin = rows.size();
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const auto& q = traj.configurations[i];
            if (q.size() != dof) {
                throw Error(ErrorCode::JointCountMismatch, "motion " + std::to_string(m) + " has " +
                                                               std::to_string(q.size()) + " joints, expected " +
                                                               std::to_string(dof));
            }
            if (std::any_of(q.begin(), q.end(), [](double v) { return !std::isfinite(v); })) {
                throw Error(ErrorCode::InvalidArgument, "non-finite joint value in motion " + std::to_string(m));
            }
            rows.push_back(q);
            out.timestamps.push_back(traj.timestamps[i]);
        }
        out.spans.emplace_back(begin, rows.size());
    }
    if (params.method == EmbeddingMethod::Pca) {
        out.points = pca_2d(rows).points;
        return out;
    }
    if (rows.size() < static_cast<std::size_t>(params.n_neighbors) + 1) {
        throw Error(ErrorCode::TooFewSamples, "UMAP needs at least n_neighbors + 1 = " +
                                                  std::to_string(params.n_neighbors + 1) + " samples, got " +
                                                  std::to_string(rows.size()));
    }
    out.points = umap_layout(rows, params);
    return out;
}

double trustworthiness(const std::vector<std::vector<double>>& high, const std::vector<Point2>& low, std::size_t k) {
    const std::size_t n = high.size();
    if (low.size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "embedding and input differ in sample count");
    }
    if (k < 1 || 2 * k >= n) {
        throw Error(ErrorCode::InvalidK, "trustworthiness needs 1 <= k < n/2 (k = " + std::to_string(k) +
                                             ", n = " + std::to_string(n) + ")");
    }
    std::vector<std::pair<double, std::size_t>> order;
    std::vector<std::size_t> rank(n);
    double penalty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        order.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) order.emplace_back(squared_distance(high[i], high[j]), j);
        }
        std::sort(order.begin(), order.end());
        for (std::size_t r = 0; r < order.size(); ++r) rank[order[r].second] = r + 1;

        order.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double dx = low[i][0] - low[j][0];
            const double dy = low[i][1] - low[j][1];
            order.emplace_back(dx * dx + dy * dy, j);
        }
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
        for (std::size_t r = 0; r < k; ++r) {
            const std::size_t hr = rank[order[r].second];
            if (hr > k) penalty += static_cast<double>(hr - k);
        }
    }
    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);
    return 1.0 - 2.0 / (nd * kd * (2.0 * nd - 3.0 * kd - 1.0)) * penalty;
}

double trustworthiness(const std::vector<std::vector<double>>& high, const Embedding& low, std::size_t k) {
    return trustworthiness(high, low.points, k);
}

JointTrace joint_trace_polyline(const Embedding& embedding, std::size_t motion_index) {
    if (motion_index >= embedding.spans.size()) {
        throw Error(ErrorCode::IndexOutOfRange, "no motion with index " + std::to_string(motion_index) +
                                                    " in an embedding of " + std::to_string(embedding.spans.size()));
    }
    const auto [begin, end] = embedding.spans[motion_index];
    JointTrace trace;
    trace.timestamps.assign(embedding.timestamps.begin() + static_cast<std::ptrdiff_t>(begin),
                            embedding.timestamps.begin() + static_cast<std::ptrdiff_t>(end));
    trace.points.assign(embedding.points.begin() + static_cast<std::ptrdiff_t>(begin),
                        embedding.points.begin() + static_cast<std::ptrdiff_t>(end));
    return trace;
}

}  // namespace mocomp
