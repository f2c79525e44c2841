/**
 * @file reduced.hpp
 * @brief Pressure-only march of the reduced problem through the dense B realization.
 *
 * Eliminating u = E^{-1}(alpha G^T p + f) from the monolithic step gives
 *
 *   (alpha^2 M B_d + c0 M + dt A) p^{n+1} - m l = dt s^{n+1} + content^n - alpha G E^{-1} f^{n+1},
 *
 * with content^0 = alpha M d0 and content^n = alpha (alpha M B_d p^n + G E^{-1} f^n) + c0 M p^n.
 * Only the B realization couples pressures; it is dense, hence the size cap.
 */
#pragma once

#include "biot/solver.hpp"

#include <Eigen/Dense>

#include <vector>

namespace biot {

inline std::vector<Field> reduced_solve(const BiotProblem& pb, const DenseBRealization& realization,
                                        const DilationHistory& z) {
    const auto& d = pb.disc;
    const auto& s = d.spaces();
    const int nsteps = pb.num_steps();
    if (static_cast<int>(z.size()) != nsteps) throw std::invalid_argument("reduced_solve: z length mismatch");
    if (realization.b.rows() != s.num_pressure_dofs) throw std::invalid_argument("reduced_solve: realization mismatch");
    const double alpha = pb.physics.alpha;
    const double c0 = pb.physics.c0;
    const int npf = s.num_free_pressure();
    const int extra = s.zero_mean() ? 1 : 0;
    const Eigen::MatrixXd mb = realization.mass * realization.b;

    const LoadHistory loads = assemble_load_history(pb);
    const auto force_dilation = [&](const LoadVectors& l) -> Vector {
        return d.divergence() * d.elasticity_solver().solve(l.displacement);
    };

    std::vector<Field> out;
    out.reserve(nsteps);
    Vector content = initial_content(pb);
    for (int n = 1; n <= nsteps; ++n) {
        const auto k = permeability_at_quadrature(pb.perm, z[n - 1], d.mesh());
        const Eigen::MatrixXd a(assemble_diffusion(s, d.mesh(), k, pb.perm.k1, pb.perm.k2));
        const Eigen::MatrixXd full = alpha * alpha * mb + c0 * realization.mass + pb.dt * a;
        const Vector gf = force_dilation(loads[n - 1]);
        const Vector rhs_full = pb.dt * loads[n - 1].pressure + content - alpha * gf;

        Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(npf + extra, npf + extra);
        Vector rhs = Vector::Zero(npf + extra);
        for (int i = 0; i < npf; ++i) {
            const int vi = s.pressure_free_dofs[i];
            rhs[i] = rhs_full[vi];
            for (int j = 0; j < npf; ++j) sys(i, j) = full(vi, s.pressure_free_dofs[j]);
            if (extra) {
                sys(i, npf) = -d.mass_of_one()[vi];
                sys(npf, i) = -d.mass_of_one()[vi];
            }
        }
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
        if (!lu.isInvertible()) throw SolverError("reduced step matrix is singular");
        Vector x = lu.solve(rhs);
        for (int sweep = 0; sweep < 3; ++sweep) x += lu.solve(rhs - sys * x);
        const Vector p = extend_pressure(s, x.head(npf));
        content = alpha * (alpha * (mb * p) + gf) + c0 * (realization.mass * p);
        out.push_back(Field::pressure(p));
    }
    return out;
}

}  // namespace biot
