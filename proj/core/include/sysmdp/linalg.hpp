#pragma once

#include "sysmdp/model.hpp"

namespace sysmdp::linalg {

/// Infinity norm of a vector (max |v_i|).
double inf_norm(const Vector& v);

/// Induced infinity norm of a matrix (max absolute row sum).
double inf_norm(const Matrix& m);

/// Reciprocal condition estimate below which a system is treated as singular.
inline constexpr double kSingularRcond = 1e-13;

/**
 * Solves A x = b by LU with partial pivoting.
 *
 * Throws NumericalError when A is (numerically) singular or the relative
 * residual ||Ax - b|| / max(1, ||A|| ||x||, ||b||) exceeds `tolerance`.
 */
Vector solve(const Matrix& a, const Vector& b, double tolerance = 1e-9);

/// Dense inverse with the same singularity and residual checks as solve().
Matrix inverse(const Matrix& a, double tolerance = 1e-9);

}  // namespace sysmdp::linalg
