#pragma once

#include "skid/geometry.hpp"

namespace skid {

// Published weights and requirement values of the benchmark reward.
struct RewardConfig {
    double lambda_safe = 0.8;   // lambda_1
    double lambda_prog = 0.2;   // lambda_2
    double lambda_aux = 0.2;    // lambda_3
    double req_cross_track = 3.5;                  // m, one lane width
    double req_accel = 2.943;                      // m/s^2
    double req_beta = deg2rad(20.0);               // rad
    double req_steer_rate = deg2rad(3000.0);       // rad/s
    double req_safe_dist = 10.0;                   // m
    double terminal_bonus = 50.0;
    double terminal_penalty = -50.0;
    double grip_beta_threshold = deg2rad(1.0);
    int grip_hold_steps = 100;
    double spin_beta_threshold = deg2rad(37.0);

    bool valid() const {
        return req_cross_track > 0.0 && req_accel > 0.0 && req_beta > 0.0 &&
               req_steer_rate > 0.0 && req_safe_dist > 0.0 && grip_beta_threshold > 0.0 &&
               grip_hold_steps > 0 && spin_beta_threshold > 0.0;
    }
};

// 0.5^(|x|/x_req) * 2 - 1: equals 1 at x = 0, crosses zero at the
// requirement value, and tends to -1 as |x| grows.
inline double shaped_reward(double x, double x_req) {
    return std::pow(0.5, std::abs(x) / x_req) * 2.0 - 1.0;
}

struct RewardComponents {
    double safe = 0.0;  // shaped on min drivable distance
    double prog = 0.0;  // Frenet progress, meters
    double aux = 0.0;   // mean of the four shaped auxiliary terms
    double term = 0.0;  // +-50 or 0

    double total(const RewardConfig& c) const {
        return -c.lambda_safe * safe + c.lambda_prog * prog + c.lambda_aux * aux + term;
    }
};

// Mean of the shaped cross-track / slip / commanded-steer-rate /
// acceleration terms, all against their published requirement values.
inline double aux_reward(double cross_track, double beta, double steer_rate, double accel_mag,
                         const RewardConfig& c) {
    return (shaped_reward(cross_track, c.req_cross_track) + shaped_reward(beta, c.req_beta) +
            shaped_reward(steer_rate, c.req_steer_rate) + shaped_reward(accel_mag, c.req_accel)) /
           4.0;
}

}  // namespace skid
