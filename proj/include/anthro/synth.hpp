#pragma once

#include "anthro/dataset.hpp"

#include <cstdint>
#include <vector>

namespace anthro {

struct Gaussian {
    double mean = 0.0;
    double std = 0.0;
};

/// Per-subject anthropometric parameter distributions (mm unless noted).
/// Samples are clamped to mean +- 3 std.
struct BodyDistribution {
    Gaussian hip_half_width{90, 7};
    Gaussian thigh_length{430, 25};
    Gaussian shank_length{420, 25};
    Gaussian torso_length{540, 30};
    Gaussian torso_half_width{150, 10};
    Gaussian torso_half_depth{100, 8};
    Gaussian shoulder_half_width{185, 12};
    Gaussian upper_arm_length{320, 18};
    Gaussian forearm_length{255, 14};
    Gaussian neck_length{100, 8};
    Gaussian upper_arm_radius{45, 4};
    Gaussian forearm_radius{37, 3};
    Gaussian thigh_radius{80, 6};
    Gaussian shank_radius{55, 5};
    Gaussian head_half_width{75, 4};
    Gaussian head_half_height{110, 5};
    Gaussian head_half_depth{98, 5};
    Gaussian nose_height{20, 4};
    Gaussian nose_width_rad{0.22, 0.03};
    Gaussian brow_height{6, 2};
    Gaussian chin_height{8, 3};
    Gaussian cheek_height{5, 2};
    Gaussian head_shape_coeff{0, 0.03}; // relative low-order radial bumps

    // Sitting-pose joint angles, degrees.
    Gaussian hip_flexion_deg{90, 4};
    Gaussian knee_flexion_deg{90, 5};
    Gaussian shoulder_flexion_deg{25, 5};
    Gaussian elbow_flexion_deg{75, 8};
    Gaussian head_yaw_deg{0, 6};
    Gaussian head_pitch_deg{0, 5};
};

struct SynthParams {
    int n_subjects = 200;
    double landmark_noise_mm = 15.0;
    std::vector<Pose> poses{Pose::Standing, Pose::Sitting};
    std::uint64_t seed = 1;
    BodyDistribution body;

    /// Throws InvalidArgument.
    void validate() const;
};

/// Generates `n_subjects` subjects. Records are ordered by subject, then by
/// pose in Standing, Sitting order. Shape parameters and landmark noise come
/// from independent streams derived from `seed`, so changing the noise level
/// leaves the noise-free geometry untouched. Sitting is obtained from
/// standing by rigid joint rotations about axes passing through the
/// landmarks that bound each bone, so bone-spanning landmark distances are
/// pose-invariant before noise is applied.
Dataset synth_population(const SynthParams& params);

std::string synth_subject_id(int index);

} // namespace anthro
