#pragma once

#include "eegcs/types.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace eegcs {

struct ChannelInfo {
    std::string label;
    std::string transducer;
    std::string physical_dimension;
    std::string prefiltering;
    double physical_min = 0.0;
    double physical_max = 0.0;
    std::int32_t digital_min = -32768;
    std::int32_t digital_max = 32767;
    std::int32_t samples_per_record = 0;

    /// Physical value of a digital sample: affine map of
    /// [digital_min, digital_max] onto [physical_min, physical_max].
    [[nodiscard]] double to_physical(std::int32_t digital) const;
    /// Nearest digital code, clamped to the digital range.
    [[nodiscard]] std::int32_t to_digital(double physical) const;
    /// One digital step in physical units.
    [[nodiscard]] double quantization_step() const;
};

/// A multi-channel EDF recording with samples in physical units.
struct Recording {
    std::string patient;
    std::string recording_id;
    std::string start_date = "01.01.00";
    std::string start_time = "00.00.00";
    double record_duration = 1.0;
    std::int64_t record_count = 0;
    std::vector<ChannelInfo> channels;
    /// channels x samples; row c holds channel c.
    Matrix samples;

    [[nodiscard]] Index channel_count() const { return static_cast<Index>(channels.size()); }
    [[nodiscard]] Index sample_count() const { return samples.cols(); }
    [[nodiscard]] double sample_rate() const;
    [[nodiscard]] double duration() const { return record_duration * static_cast<double>(record_count); }
};

/// Parses an EDF (1992) byte stream. Signals labelled "EDF Annotations" are
/// skipped; every remaining signal must share one sampling rate.
Recording parse_edf(std::span<const std::uint8_t> bytes);
Recording read_edf(const std::filesystem::path& path);

/// Serializes a recording, quantizing samples with each channel's scaling.
/// samples.cols() must equal record_count * samples_per_record.
std::vector<std::uint8_t> write_edf(const Recording& rec);
void save_edf(const std::filesystem::path& path, const Recording& rec);

} // namespace eegcs
