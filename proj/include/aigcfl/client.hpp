#pragma once

#include "aigcfl/core.hpp"

namespace aigcfl {

enum class Strategy { OptOut, Local, Aigc };

// LocalFirst clients pass through a local-data stage as the reward grows;
// AigcFirst clients skip it and join directly with synthetic augmentation.
enum class ClientType { LocalFirst, AigcFirst };

struct Indicators {
    double zeta1;  // reward where contributing local data breaks even
    double zeta2;  // reward where contributing augmented data breaks even
    double zeta3;  // reward where augmentation starts to beat local data
    ClientType type;
};

Indicators indicators(const ClientAttributes& c, const QualityModel& q);

// Reward where augmentation overtakes local data; shared by all clients.
double aigc_switch_reward(const QualityModel& q);

// Highest reward the server ever needs to consider: beyond it every client
// participates regardless of attributes.
double reward_ceiling(double s_max, const QualityModel& q);

double utility(const ClientAttributes& c, const QualityModel& q, double reward, Strategy s);

// Closed-form best response.  Ties favor participation, and augmentation over
// local data.
Strategy best_response(const ClientAttributes& c, const QualityModel& q, double reward);

// Independent oracle: evaluates all three utilities and picks the argmax with
// the same tie order.  Kept free of the threshold logic above.
Strategy brute_force_best_response(const ClientAttributes& c, const QualityModel& q,
                                   double reward);

}  // namespace aigcfl
