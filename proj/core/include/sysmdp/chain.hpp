#pragma once

#include <cstddef>
#include <vector>

#include "sysmdp/model.hpp"

namespace sysmdp {

using StateSet = std::vector<std::size_t>;

/// Entries at or below this value are not edges of the transition graph.
inline constexpr double kEdgeThreshold = 1e-15;

/// Probability mass that may leave a class that is still called closed.
inline constexpr double kClosedClassLeak = 1e-12;

/**
 * Communicating-class structure of a fixed transition matrix.
 *
 * `sccs` partitions the states; `recurrent_classes` are the closed SCCs and
 * every other state is listed in `transient_states`.
 */
struct ChainStructure {
    std::vector<StateSet> sccs;
    std::vector<StateSet> recurrent_classes;
    StateSet transient_states;
    bool is_unichain = false;
    bool is_recurrent = false;
};

struct StationaryDistribution {
    Vector phi;
};

/// Kosaraju SCC partition, sink components first (reverse topological order).
std::vector<StateSet> strongly_connected_components(const Matrix& p,
                                                    double edge_threshold = kEdgeThreshold);

ChainStructure classify_chain(const Matrix& p);

/// Throws Error("stationary distribution not unique") unless `p` is unichain.
StationaryDistribution stationary_distribution(const Matrix& p);

/// Cesaro limit P* = 1 phi^T of a unichain matrix.
Matrix limiting_matrix(const Matrix& p);

/**
 * Cesaro limit of an arbitrary (possibly multi-chain) stochastic matrix.
 *
 * Row i is sum_k f_ik phi_k^T where phi_k is the stationary distribution of
 * recurrent class k and f_ik the probability of absorption into class k.
 */
Matrix cesaro_limit(const Matrix& p);

/// (I - P + P*)^{-1} for a unichain matrix.
Matrix fundamental_matrix(const Matrix& p);

/// (I - alpha P + alpha P*)^{-1}; alpha = 1 gives fundamental_matrix().
Matrix fundamental_matrix_alpha(const Matrix& p, double alpha);

/// Drazin (group) inverse H = (I - P + P*)^{-1} - P*.
Matrix drazin_inverse(const Matrix& p);

struct GainBias {
    double gain = 0.0;
    Vector bias;
};

/// gain = phi^T C, bias = (I - P + P*)^{-1} C - gain 1, normalised so phi^T bias = 0.
GainBias bias_closed_form(const Matrix& p, const Vector& c);

}  // namespace sysmdp
