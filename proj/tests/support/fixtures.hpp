#pragma once

#include "screening/frontier.hpp"

namespace fixtures {

// Kinked pair: f0 affine on [0, 1], f1 with kinks at 0.3 and 0.8.
inline screening::TechnologyPair instance_a(double r = 1.0) {
    using screening::Frontier;
    return screening::make_technology(Frontier::piecewise({{0, 0}, {1, 1}, {2, 0}}),
                                      Frontier::piecewise({{0, 0.6}, {0.3, 1.2}, {0.8, 1.4}, {1.8, 0.6}}), r);
}

// Smooth pair on [0, 1.2]: f0 = 2u - u^2, f1 = 1.45 - 1.5 (u - 0.7)^2.
inline screening::TechnologyPair instance_b(double r = 1.0) {
    using screening::Frontier;
    return screening::make_technology(Frontier::quadratic(1.0, 1.0, 1.0, 0.0, 1.2),
                                      Frontier::quadratic(0.7, 1.45, 1.5, 0.0, 1.2), r);
}

// Instance B with f0 replaced by the line of slope 0.9 through (1, 1); u_star moves to 0.4.
inline screening::TechnologyPair instance_b_affine(double r = 1.0) {
    using screening::Frontier;
    return screening::make_technology(Frontier::piecewise({{0.0, 0.1}, {1.0, 1.0}, {1.2, 0.96}}),
                                      Frontier::quadratic(0.7, 1.45, 1.5, 0.0, 1.2), r);
}

}  // namespace fixtures
