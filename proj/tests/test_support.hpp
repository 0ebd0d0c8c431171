#pragma once

#include <random>
#include <variant>
#include <vector>

#include "mckean/grid.hpp"
#include "mckean/potentials.hpp"

namespace testsupport {

inline mckean::ConfiningPotential standard_quartic() {
    return std::get<mckean::ConfiningPotential>(mckean::validate_confining({0.0, 0.0, -0.5, 0.0, 0.25}));
}

/// F = alpha x^2 / 2
inline mckean::InteractionPotential quadratic_interaction(double alpha) {
    return std::get<mckean::InteractionPotential>(mckean::validate_interaction({0.0, 0.0, 0.5 * alpha}));
}

/// Random Gaussian mixture: a generic valid density with finite entropy.
inline mckean::GridDensity random_mixture(const mckean::Grid& grid, std::mt19937_64& gen) {
    std::uniform_int_distribution<int> count(1, 4);
    std::uniform_real_distribution<double> mean(-1.8, 1.8);
    std::uniform_real_distribution<double> stddev(0.15, 0.8);
    std::uniform_real_distribution<double> weight(0.2, 1.0);
    const int k = count(gen);
    std::vector<double> means, stds, weights;
    for (int i = 0; i < k; ++i) {
        means.push_back(mean(gen));
        stds.push_back(stddev(gen));
        weights.push_back(weight(gen));
    }
    return mckean::mixture_density(grid, means, stds, weights);
}

}  // namespace testsupport
