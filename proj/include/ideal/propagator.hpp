// End-to-end propagation of a problem in internal units with any formulation.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ideal/core.hpp"
#include "ideal/forces.hpp"
#include "ideal/formulations.hpp"
#include "ideal/integrator.hpp"

namespace ideal {

/// Initial value problem in internal units (GM = 1 after make_unit_system,
/// though nothing here assumes it).
template <typename Scalar>
struct Problem {
    CartesianState<Scalar> initial;
    ForceConfig<Scalar> forces;
    // Strictly increasing epochs after initial.t; the last one is the final epoch.
    std::vector<Scalar> output_epochs;
};

template <typename Scalar>
struct Diagnostics {
    // One entry per trajectory sample.
    std::vector<Scalar> bilinear;     // attitude bilinear constraint from field output
    std::vector<Scalar> norm_defect;  // |lambda|^2 - 1 (8D) or (sum g^2 - |x cross X|) / sum g^2 (7D)
    std::vector<Scalar> ge_defect;    // G.e / (|G| |e|)
    std::vector<Scalar> energy;
    std::vector<Scalar> gz;
    StepStats stats;

    static Scalar max_abs(const std::vector<Scalar>& v) {
        Scalar m = 0;
        for (Scalar x : v) m = std::max<Scalar>(m, std::abs(x));
        return m;
    }
};

template <typename Scalar>
struct Trajectory {
    FormulationKind kind{FormulationKind::Cowell};
    Mat3<Scalar> m0 = Mat3<Scalar>::Identity();
    std::vector<CartesianState<Scalar>> states;
    std::vector<Scalar> independent;                           // theta* or t at each sample
    std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> raw;  // integrated vectors
    Diagnostics<Scalar> diagnostics;

    const CartesianState<Scalar>& final_state() const { return states.back(); }
};

template <typename Scalar>
struct Conserved {
    Scalar energy;
    Scalar gz;
};

/// Keplerian plus J2 energy and the polar component of angular momentum.
template <typename Scalar>
Conserved<Scalar> conserved_quantities(const CartesianState<Scalar>& s, const ForceConfig<Scalar>& cfg) {
    Scalar energy = s.X.squaredNorm() / 2 - cfg.grav.gm / s.x.norm();
    if (cfg.enable_j2) energy -= j2_potential(s.x, cfg.grav);
    return {energy, angular_momentum(s.x, s.X)[2]};
}

/// Diagnostics over the raw integrated samples of one propagation.
template <FormulationKind K, typename Scalar>
Diagnostics<Scalar> run_diagnostics(const std::vector<Scalar>& independent,
                                    const std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>& raw,
                                    const FieldContext<Scalar>& ctx) {
    using std::abs;
    Diagnostics<Scalar> d;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const StateOf<Scalar, K> y = raw[i];
        const Scalar s = independent[i];
        const auto cart = decode<K>(s, y, ctx.m0, ctx.cfg);
        d.bilinear.push_back(bilinear_residual<K>(y, field<K>(s, y, ctx)));

        const Scalar G_cart = angular_momentum(cart.x, cart.X).norm();
        if constexpr (KindTraits<K>::eight) {
            d.norm_defect.push_back(y.template head<4>().squaredNorm() - 1);
        } else if constexpr (KindTraits<K>::ideal) {
            const Scalar G = angular_momentum_of<K>(y);
            d.norm_defect.push_back((G - G_cart) / G);
        } else {
            d.norm_defect.push_back(0);
        }

        const Vec3<Scalar> e = eccentricity_vector(cart.x, cart.X, ctx.cfg.grav.gm);
        const Scalar scale = G_cart * e.norm();
        d.ge_defect.push_back(scale > 0 ? orthogonality_defect(cart.x, cart.X, ctx.cfg.grav.gm) / scale
                                        : Scalar(0));
        const auto c = conserved_quantities(cart, ctx.cfg);
        d.energy.push_back(c.energy);
        d.gz.push_back(c.gz);
    }
    return d;
}

template <FormulationKind K, typename Scalar>
Trajectory<Scalar> propagate_as(const Problem<Scalar>& problem, const Tolerances<Scalar>& tol) {
    using State = StateOf<Scalar, K>;
    const auto enc = encode<K>(problem.initial, problem.forces);
    const FieldContext<Scalar> ctx{problem.forces, enc.m0};
    auto f = [&ctx](Scalar s, const State& y) { return field<K>(s, y, ctx); };
    Tolerances<Scalar> t = tol;
    if constexpr (KindTraits<K>::ideal) t.clock_component = KindTraits<K>::dim - 1;  // t or theta*
    Dop853<Scalar, KindTraits<K>::dim, decltype(f)> st(f, t, enc.s, enc.y);

    Trajectory<Scalar> traj;
    traj.kind = K;
    traj.m0 = enc.m0;
    auto record = [&] {
        traj.independent.push_back(st.s());
        traj.raw.emplace_back(st.y());
        traj.states.push_back(decode<K>(st.s(), st.y(), enc.m0, problem.forces));
    };
    record();
    Scalar last = problem.initial.t;
    for (Scalar T : problem.output_epochs) {
        if (!(T > last)) throw std::invalid_argument("propagate: output epochs must be strictly increasing");
        if constexpr (KindTraits<K>::regularized) {
            land_on_epoch(st, [](Scalar s, const State& y) { return time_of<K>(s, y); }, T, tol.tol_t);
        } else {
            st.advance_to(T);
        }
        record();
        last = T;
    }
    traj.diagnostics = run_diagnostics<K>(traj.independent, traj.raw, ctx);
    traj.diagnostics.stats = st.stats();
    return traj;
}

/// Runtime dispatch over FormulationKind.
template <typename Scalar>
Trajectory<Scalar> propagate(const Problem<Scalar>& problem, FormulationKind kind, const Tolerances<Scalar>& tol) {
    if (problem.output_epochs.empty()) throw std::invalid_argument("propagate: no output epochs");
    const auto& s0 = problem.initial;
    if (!(angular_momentum(s0.x, s0.X).norm() > 0))
        throw SingularStateError("propagate: rectilinear initial state");
    if (!(s0.X.squaredNorm() / 2 - problem.forces.grav.gm / s0.x.norm() < 0))
        throw UnboundOrbitError("propagate: not a bound orbit");
    switch (kind) {
        case FormulationKind::Cowell: return propagate_as<FormulationKind::Cowell>(problem, tol);
        case FormulationKind::Ideal8QQ: return propagate_as<FormulationKind::Ideal8QQ>(problem, tol);
        case FormulationKind::Ideal8CS: return propagate_as<FormulationKind::Ideal8CS>(problem, tol);
        case FormulationKind::Ideal7QQ: return propagate_as<FormulationKind::Ideal7QQ>(problem, tol);
        case FormulationKind::Ideal7CS: return propagate_as<FormulationKind::Ideal7CS>(problem, tol);
        case FormulationKind::Ideal7QQTime: return propagate_as<FormulationKind::Ideal7QQTime>(problem, tol);
        case FormulationKind::Ideal7CSTime: return propagate_as<FormulationKind::Ideal7CSTime>(problem, tol);
    }
    throw std::invalid_argument("propagate: unknown formulation");
}

}  // namespace ideal
