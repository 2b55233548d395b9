#ifndef MBT_ENV_OBSERVATION_HPP_
#define MBT_ENV_OBSERVATION_HPP_

#include <array>

#include "mbt/common/random.hpp"
#include "mbt/env/command.hpp"
#include "mbt/sim/system.hpp"

namespace mbt::env {

inline constexpr int kObsDim = 26;
using Observation = std::array<double, kObsDim>;

// Layout of the observation vector.
namespace obs {
inline constexpr int kRollPitch = 0;       // 2
inline constexpr int kAngularVelocity = 2; // 3, pelvis frame
inline constexpr int kLinearVelocity = 5;  // 3, pelvis frame
inline constexpr int kHeight = 8;          // 1
inline constexpr int kFeet = 9;            // 6, left then right, pelvis frame
inline constexpr int kContacts = 15;       // 2
inline constexpr int kClock = 17;          // sin, cos
inline constexpr int kAttachment = 19;     // R, Theta
inline constexpr int kRelativeYaw = 21;    // 1
inline constexpr int kCommand = 22;        // vx, vy, omega, h
}  // namespace obs

// Yaw of robot r's pelvis relative to the carrier, wrapped to (-pi, pi].
double RelativeYaw(const sim::SimState& state, int robot);

// Foot position in the pelvis frame (relative to the pelvis frame origin).
Vec3 FootInPelvisFrame(const sim::SimState& state, int robot, int foot);

// Local observation of one robot. Only that robot's own state, its
// attachment and relative yaw, and the shared command are read. Encoder noise
// with std |noise_std| is added to the roll/pitch and foot entries using
// `noise_rng`, which should belong to this robot alone.
Observation Observe(const sim::SimState& state, int robot, const Command& command,
                    Rng& noise_rng, double noise_std);

}  // namespace mbt::env

#endif  // MBT_ENV_OBSERVATION_HPP_
