#pragma once

// Planner trajectories from the Runge-Kutta oracle instead of the series, for
// timing and cross-checking the analytic planner.

#include <array>
#include <span>
#include <vector>

#include "drslip/oracle.hpp"
#include "drslip/planner.hpp"

namespace drslip {

class IntegratorBackend final : public TrajectoryBackend {
public:
    IntegratorBackend(const std::array<PhaseSpec, 4>& phases, const ModelParams& model, IntegratorConfig cfg = {})
        : model_(model), cfg_(cfg) {
        for (int k = 0; k < 4; ++k) dynamics_[k] = phases[k].dynamics;
    }

    std::string_view name() const override { return "integrator"; }

    void propagate(int phase, double t0, double dt, const PhaseInitial& ic, std::span<double> xs,
                   std::span<double> ys) const override {
        const VerticalSinusoid& s = dynamics_.at(phase);
        const double g = model_.g, inv_z0 = 1.0 / model_.z0;
        auto accel = [&](double t, double x, double) { return (g + surface_accel(s, t)) * inv_z0 * x; };
        std::vector<double> times(xs.size());
        for (std::size_t i = 0; i < times.size(); ++i) times[i] = t0 + static_cast<double>(i) * dt;
        const auto ox = integrate_second_order(accel, t0, {ic.x.x, ic.x.v}, times, cfg_);
        const auto oy = integrate_second_order(accel, t0, {ic.y.x, ic.y.v}, times, cfg_);
        for (std::size_t i = 0; i < times.size(); ++i) {
            xs[i] = ox[i][0];
            ys[i] = oy[i][0];
        }
    }

private:
    ModelParams model_;
    IntegratorConfig cfg_;
    std::array<VerticalSinusoid, 4> dynamics_;
};

inline std::shared_ptr<const TrajectoryBackend> make_integrator_backend(const GaitParams& gait,
                                                                        const SurfaceMotion& motion,
                                                                        const ModelParams& model,
                                                                        IntegratorConfig cfg = {}) {
    return std::make_shared<const IntegratorBackend>(build_phases(gait, motion), planning_model(gait, model), cfg);
}

}  // namespace drslip
