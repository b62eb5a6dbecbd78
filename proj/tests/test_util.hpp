#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "betaforge/verifier.hpp"

namespace testutil {

/// Seeded points of a domain through the verifier's sampler.
inline std::vector<betaforge::Sample> points(const betaforge::Domain& d, int count, std::uint64_t seed = 1,
                                             int budget_factor = 10) {
    betaforge::SamplingPlan plan;
    plan.seed = seed;
    plan.count = count;
    plan.budget_factor = budget_factor;
    return betaforge::draw_samples(d, plan);
}

inline double rel(double got, double want) { return std::abs(got - want) / (1.0 + std::abs(want)); }

inline double rel(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
    return (got - want).cwiseAbs().maxCoeff() / (1.0 + want.cwiseAbs().maxCoeff());
}

}  // namespace testutil
