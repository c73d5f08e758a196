#include "sysmdp/chain.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "sysmdp/linalg.hpp"

namespace sysmdp {

namespace {

using Adjacency = std::vector<std::vector<std::size_t>>;

void require_square(const Matrix& p) {
    if (p.rows() != p.cols() || p.rows() == 0) {
        throw Error("transition matrix must be square and non-empty");
    }
}

Adjacency build_graph(const Matrix& p, double threshold, bool transpose) {
    const auto n = static_cast<std::size_t>(p.rows());
    Adjacency adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > threshold) {
                if (transpose) {
                    adj[j].push_back(i);
                } else {
                    adj[i].push_back(j);
                }
            }
        }
    }
    return adj;
}

// Iterative DFS that appends vertices to `order` in post-order.
void dfs_postorder(const Adjacency& adj, std::size_t root, std::vector<char>& seen,
                   std::vector<std::size_t>& order) {
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    seen[root] = 1;
    while (!stack.empty()) {
        auto& [v, next] = stack.back();
        if (next < adj[v].size()) {
            const auto w = adj[v][next++];
            if (!seen[w]) {
                seen[w] = 1;
                stack.emplace_back(w, 0);
            }
        } else {
            order.push_back(v);
            stack.pop_back();
        }
    }
}

bool is_closed(const Matrix& p, const StateSet& cls) {
    std::vector<char> member(static_cast<std::size_t>(p.rows()), 0);
    for (auto s : cls) member[s] = 1;
    for (auto s : cls) {
        double outside = 0.0;
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            if (!member[static_cast<std::size_t>(j)]) {
                outside += p(static_cast<Eigen::Index>(s), j);
            }
        }
        if (outside >= kClosedClassLeak) return false;
    }
    return true;
}

// Stationary distribution of the sub-chain restricted to `cls` (assumed closed
// and irreducible); replaces the last balance equation by normalisation.
Vector class_stationary(const Matrix& p, const StateSet& cls) {
    const auto k = static_cast<Eigen::Index>(cls.size());
    Matrix a(k, k);
    for (Eigen::Index r = 0; r < k; ++r) {
        for (Eigen::Index c = 0; c < k; ++c) {
            a(r, c) = p(static_cast<Eigen::Index>(cls[static_cast<std::size_t>(c)]),
                        static_cast<Eigen::Index>(cls[static_cast<std::size_t>(r)]));
        }
    }
    a -= Matrix::Identity(k, k);
    a.row(k - 1).setOnes();
    Vector b = Vector::Zero(k);
    b(k - 1) = 1.0;
    Vector phi = linalg::solve(a, b);
    for (Eigen::Index i = 0; i < k; ++i) phi(i) = std::max(phi(i), 0.0);
    return phi / phi.sum();
}

}  // namespace

std::vector<StateSet> strongly_connected_components(const Matrix& p, double edge_threshold) {
    require_square(p);
    const auto n = static_cast<std::size_t>(p.rows());
    const auto forward = build_graph(p, edge_threshold, false);
    const auto reverse = build_graph(p, edge_threshold, true);

    std::vector<char> seen(n, 0);
    std::vector<std::size_t> finish;
    finish.reserve(n);
    for (std::size_t v = 0; v < n; ++v) {
        if (!seen[v]) dfs_postorder(forward, v, seen, finish);
    }

    // Second pass on the transpose in decreasing finish time discovers the
    // components in topological order of the condensation (sources first).
    std::fill(seen.begin(), seen.end(), 0);
    std::vector<StateSet> sccs;
    for (auto it = finish.rbegin(); it != finish.rend(); ++it) {
        if (seen[*it]) continue;
        StateSet component;
        dfs_postorder(reverse, *it, seen, component);
        std::sort(component.begin(), component.end());
        sccs.push_back(std::move(component));
    }
    std::reverse(sccs.begin(), sccs.end());
    return sccs;
}

ChainStructure classify_chain(const Matrix& p) {
    ChainStructure cs;
    cs.sccs = strongly_connected_components(p);
    for (const auto& scc : cs.sccs) {
        if (is_closed(p, scc)) {
            cs.recurrent_classes.push_back(scc);
        } else {
            cs.transient_states.insert(cs.transient_states.end(), scc.begin(), scc.end());
        }
    }
    std::sort(cs.transient_states.begin(), cs.transient_states.end());
    cs.is_unichain = cs.recurrent_classes.size() == 1;
    cs.is_recurrent = cs.is_unichain && cs.transient_states.empty();
    return cs;
}

StationaryDistribution stationary_distribution(const Matrix& p) {
    const auto cs = classify_chain(p);
    if (!cs.is_unichain) {
        throw Error("stationary distribution not unique: chain has " +
                    std::to_string(cs.recurrent_classes.size()) + " recurrent classes");
    }
    const auto& cls = cs.recurrent_classes.front();
    const Vector local = class_stationary(p, cls);
    StationaryDistribution out{Vector::Zero(p.rows())};
    for (std::size_t i = 0; i < cls.size(); ++i) {
        out.phi(static_cast<Eigen::Index>(cls[i])) = local(static_cast<Eigen::Index>(i));
    }
    return out;
}

Matrix limiting_matrix(const Matrix& p) {
    const Vector phi = stationary_distribution(p).phi;
    return Vector::Ones(p.rows()) * phi.transpose();
}

Matrix cesaro_limit(const Matrix& p) {
    const auto cs = classify_chain(p);
    const auto n = p.rows();
    Matrix limit = Matrix::Zero(n, n);

    const auto& transient = cs.transient_states;
    const auto nt = static_cast<Eigen::Index>(transient.size());
    Matrix q(nt, nt);
    for (Eigen::Index r = 0; r < nt; ++r) {
        for (Eigen::Index c = 0; c < nt; ++c) {
            q(r, c) = p(static_cast<Eigen::Index>(transient[static_cast<std::size_t>(r)]),
                        static_cast<Eigen::Index>(transient[static_cast<std::size_t>(c)]));
        }
    }
    const Matrix absorb_op =
        nt > 0 ? Matrix(Matrix::Identity(nt, nt) - q) : Matrix(0, 0);

    for (const auto& cls : cs.recurrent_classes) {
        const Vector local = class_stationary(p, cls);
        Vector phi = Vector::Zero(n);
        for (std::size_t i = 0; i < cls.size(); ++i) {
            phi(static_cast<Eigen::Index>(cls[i])) = local(static_cast<Eigen::Index>(i));
        }
        for (auto s : cls) limit.row(static_cast<Eigen::Index>(s)) = phi.transpose();

        if (nt == 0) continue;
        // f = (I - Q)^{-1} r where r_i is the one-step mass from transient i into cls.
        Vector r = Vector::Zero(nt);
        for (Eigen::Index t = 0; t < nt; ++t) {
            for (auto s : cls) {
                r(t) += p(static_cast<Eigen::Index>(transient[static_cast<std::size_t>(t)]),
                          static_cast<Eigen::Index>(s));
            }
        }
        const Vector f = linalg::solve(absorb_op, r);
        for (Eigen::Index t = 0; t < nt; ++t) {
            limit.row(static_cast<Eigen::Index>(transient[static_cast<std::size_t>(t)])) +=
                f(t) * phi.transpose();
        }
    }
    return limit;
}

Matrix fundamental_matrix_alpha(const Matrix& p, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("alpha must lie in (0, 1]");
    const auto n = p.rows();
    const Matrix star = limiting_matrix(p);
    return linalg::inverse(Matrix::Identity(n, n) - alpha * p + alpha * star, 1e-8);
}

Matrix fundamental_matrix(const Matrix& p) { return fundamental_matrix_alpha(p, 1.0); }

Matrix drazin_inverse(const Matrix& p) { return fundamental_matrix(p) - limiting_matrix(p); }

GainBias bias_closed_form(const Matrix& p, const Vector& c) {
    if (c.size() != p.rows()) throw Error("cost vector length does not match matrix");
    const Vector phi = stationary_distribution(p).phi;
    GainBias gb;
    gb.gain = phi.dot(c);
    gb.bias = fundamental_matrix(p) * c - gb.gain * Vector::Ones(c.size());
    return gb;
}

}  // namespace sysmdp
