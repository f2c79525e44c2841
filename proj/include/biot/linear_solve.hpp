#pragma once

#include "biot/assembly.hpp"
#include "biot/errors.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

namespace biot {

/// Normwise backward error ||b - A x||_inf / (||A||_inf ||x||_inf + ||b||_inf).
inline double backward_error(const SparseOperator& a, const Vector& x, const Vector& b) {
    if (b.size() == 0) return 0.0;
    double anorm = 0.0;
    Vector rowsum = Vector::Zero(a.rows());
    for (int k = 0; k < a.outerSize(); ++k)
        for (SparseOperator::InnerIterator it(a, k); it; ++it) rowsum[it.row()] += std::abs(it.value());
    anorm = rowsum.maxCoeff();
    const double denom = anorm * x.cwiseAbs().maxCoeff() + b.cwiseAbs().maxCoeff();
    if (denom == 0.0) return 0.0;
    return (b - a * x).cwiseAbs().maxCoeff() / denom;
}

/// Direct solve followed by iterative refinement down to the requested backward error.
template <typename Factorization>
Vector refined_solve(const Factorization& factor, const SparseOperator& a, const Vector& b,
                     double tolerance = 1e-14, int max_sweeps = 4) {
    if (b.size() == 0) return b;
    Vector x = factor.solve(b);
    if (factor.info() != Eigen::Success) throw SolverError("linear solve failed");
    for (int sweep = 0; sweep < max_sweeps && backward_error(a, x, b) > tolerance; ++sweep) {
        const Vector r = b - a * x;
        x += factor.solve(r);
    }
    return x;
}

/// Symmetric positive-definite factorization (Cholesky) with refinement.
class SpdSolver {
public:
    SpdSolver() = default;
    explicit SpdSolver(SparseOperator a) : matrix_(std::make_shared<SparseOperator>(std::move(a))) {
        factor_ = std::make_shared<Eigen::SimplicialLLT<SparseOperator>>();
        if (matrix_->rows() > 0) {
            factor_->compute(*matrix_);
            if (factor_->info() != Eigen::Success) throw SolverError("Cholesky factorization failed");
        }
    }
    [[nodiscard]] Vector solve(const Vector& b) const {
        if (b.size() != matrix_->rows()) throw std::invalid_argument("SpdSolver: dimension mismatch");
        if (b.size() == 0) return b;
        return refined_solve(*factor_, *matrix_, b);
    }
    [[nodiscard]] const SparseOperator& matrix() const { return *matrix_; }

private:
    std::shared_ptr<const SparseOperator> matrix_;
    std::shared_ptr<Eigen::SimplicialLLT<SparseOperator>> factor_;
};

/// General sparse LU used for the symmetric indefinite saddle systems.
class IndefiniteSolver {
public:
    explicit IndefiniteSolver(SparseOperator a) : matrix_(std::move(a)) {
        factor_.analyzePattern(matrix_);
        factor_.factorize(matrix_);
        if (factor_.info() != Eigen::Success) {
            throw SolverError("saddle-point factorization failed: " + factor_.lastErrorMessage());
        }
    }
    IndefiniteSolver(const IndefiniteSolver&) = delete;
    IndefiniteSolver& operator=(const IndefiniteSolver&) = delete;

    [[nodiscard]] Vector solve(const Vector& b) const { return refined_solve(factor_, matrix_, b); }
    [[nodiscard]] const SparseOperator& matrix() const { return matrix_; }

private:
    SparseOperator matrix_;
    Eigen::SparseLU<SparseOperator, Eigen::COLAMDOrdering<int>> factor_;
};

}  // namespace biot
