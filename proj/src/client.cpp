#include "aigcfl/client.hpp"

#include <cmath>
#include <limits>

namespace aigcfl {

double aigc_switch_reward(const QualityModel& q) {
    return q.lambda_max() * q.delta() / (1.0 - q.theta());
}

double reward_ceiling(double s_max, const QualityModel& q) {
    if (!(s_max > 0.0)) throw ConfigError("s_max must be positive");
    return (q.lambda_max() * q.delta() + s_max) / (1.0 - q.theta());
}

Indicators indicators(const ClientAttributes& c, const QualityModel& q) {
    double lam = q.lambda_max();
    double denom1 = lam - c.lambda();
    double zeta1 = denom1 > 0.0 ? lam * c.unit_cost() / denom1
                                : std::numeric_limits<double>::infinity();
    double denom2 = lam - q.theta() * c.lambda();
    if (!(denom2 > 0.0)) throw NumericError("degenerate client: lambda_max <= theta*lambda");
    double zeta2 = (lam * c.unit_cost() + lam * q.delta() * c.lambda()) / denom2;
    double zeta3 = aigc_switch_reward(q);
    ClientType type = zeta1 <= zeta3 ? ClientType::LocalFirst : ClientType::AigcFirst;
    return {zeta1, zeta2, zeta3, type};
}

double utility(const ClientAttributes& c, const QualityModel& q, double reward, Strategy s) {
    if (!(reward >= 0.0)) throw ConfigError("reward must be non-negative");
    double d = static_cast<double>(c.datasize());
    switch (s) {
        case Strategy::OptOut:
            return 0.0;
        case Strategy::Local:
            return reward * d * (1.0 - c.lambda() / q.lambda_max()) - d * c.unit_cost();
        case Strategy::Aigc: {
            double residual = aigc_quality(c.lambda(), q);
            return reward * d * (1.0 - residual / q.lambda_max()) - d * c.unit_cost() -
                   d * c.synthesis_fraction(q) * q.s_ai();
        }
    }
    throw ConfigError("unknown strategy");
}

Strategy best_response(const ClientAttributes& c, const QualityModel& q, double reward) {
    if (!(reward >= 0.0)) throw ConfigError("reward must be non-negative");
    Indicators z = indicators(c, q);
    if (z.type == ClientType::LocalFirst) {
        if (reward < z.zeta1) return Strategy::OptOut;
        if (reward < z.zeta3) return Strategy::Local;
        return Strategy::Aigc;
    }
    return reward < z.zeta2 ? Strategy::OptOut : Strategy::Aigc;
}

Strategy brute_force_best_response(const ClientAttributes& c, const QualityModel& q,
                                   double reward) {
    Strategy best = Strategy::OptOut;
    double best_u = 0.0;
    double u_local = utility(c, q, reward, Strategy::Local);
    if (u_local >= best_u) {
        best = Strategy::Local;
        best_u = u_local;
    }
    double u_aigc = utility(c, q, reward, Strategy::Aigc);
    if (u_aigc >= best_u) {
        best = Strategy::Aigc;
    }
    return best;
}

}  // namespace aigcfl
