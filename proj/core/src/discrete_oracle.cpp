#include "screening/discrete_oracle.hpp"

#include "screening/frontier.hpp"

namespace screening::discrete {

Pair<double> from_technology(const TechnologyPair& pair) {
    return {[f = pair.f0](const double& u) { return f.at(u); },
            [f = pair.f1](const double& u) { return f.at(u); }, pair.u0, pair.u1, pair.u_star};
}

}  // namespace screening::discrete
