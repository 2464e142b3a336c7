#pragma once

#include "eegcs/edf.hpp"

#include <cstdint>

namespace eegcs {

/// Parameters of the surrogate multi-channel EEG generator.
///
/// A few latent sources (a mix of AR(1) processes with long, medium and
/// short memory, giving a 1/f-like spectrum, plus an amplitude-modulated
/// 8-12 Hz rhythm) are mixed into the channels by a random matrix, and each
/// channel gets independent AR(1) noise. The result has the broad traits
/// compressed-sensing studies rely on: smooth, spatially correlated, not
/// exactly low rank.
struct SurrogateEegOptions {
    Index channels = 23;
    Index sources = 6;
    std::int32_t sample_rate = 256;
    std::int64_t seconds = 60;
    /// Channel noise rms relative to the mixed-source rms of that channel.
    double noise_ratio = 0.1;
    /// Target rms amplitude in microvolts.
    double amplitude_uv = 50.0;
    std::uint64_t seed = 1;
};

/// Generates a recording with 16-bit digital ranges and a physical range of
/// +/-3276.8 uV, already on the digital grid so it survives an EDF round
/// trip unchanged.
Recording make_surrogate_eeg(const SurrogateEegOptions& options);

} // namespace eegcs
