#include "eegcs/synthetic.hpp"

#include "eegcs/rng.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace eegcs {

Recording make_surrogate_eeg(const SurrogateEegOptions& options) {
    if (options.channels < 1 || options.sources < 1 || options.sample_rate < 1 ||
        options.seconds < 1) {
        throw DimensionError("surrogate EEG needs positive channel, source, rate and duration");
    }
    Rng rng(options.seed);
    const Index samples = static_cast<Index>(options.sample_rate) * options.seconds;
    const double fs = static_cast<double>(options.sample_rate);

    // Latent sources.
    Matrix sources(options.sources, samples);
    for (Index k = 0; k < options.sources; ++k) {
        constexpr double poles[3] = {0.995, 0.95, 0.7};
        constexpr double weights[3] = {0.6, 0.8, 0.5};
        double state[3] = {0.0, 0.0, 0.0};
        const double alpha_hz = 8.0 + 4.0 * rng.uniform();
        const double alpha_gain = 0.5 + rng.uniform();
        double phase = 2.0 * std::numbers::pi * rng.uniform();
        double envelope = 0.0;
        for (Index t = 0; t < samples; ++t) {
            double v = 0.0;
            for (int p = 0; p < 3; ++p) {
                state[p] = poles[p] * state[p] + std::sqrt(1.0 - poles[p] * poles[p]) * rng.normal();
                v += weights[p] * state[p];
            }
            envelope = 0.998 * envelope + std::sqrt(1.0 - 0.998 * 0.998) * rng.normal();
            phase += 2.0 * std::numbers::pi * alpha_hz / fs;
            v += alpha_gain * std::abs(envelope) * std::sin(phase);
            sources(k, t) = v;
        }
    }

    Matrix mixing(options.channels, options.sources);
    for (Index c = 0; c < options.channels; ++c) {
        for (Index k = 0; k < options.sources; ++k) {
            mixing(c, k) = rng.normal();
        }
    }
    Matrix signal = mixing * sources;

    for (Index c = 0; c < options.channels; ++c) {
        const double rms = signal.row(c).norm() / std::sqrt(static_cast<double>(samples));
        const double sigma = options.noise_ratio * rms;
        double state = 0.0;
        for (Index t = 0; t < samples; ++t) {
            state = 0.5 * state + std::sqrt(1.0 - 0.25) * rng.normal();
            signal(c, t) += sigma * state;
        }
        const double total_rms = signal.row(c).norm() / std::sqrt(static_cast<double>(samples));
        if (total_rms > 0.0) {
            signal.row(c) *= options.amplitude_uv / total_rms;
        }
    }

    Recording rec;
    rec.patient = "surrogate";
    rec.recording_id = "synthetic seed " + std::to_string(options.seed);
    rec.record_duration = 1.0;
    rec.record_count = options.seconds;
    for (Index c = 0; c < options.channels; ++c) {
        ChannelInfo info;
        info.label = "S" + std::to_string(c + 1);
        info.physical_dimension = "uV";
        info.physical_min = -3276.8;
        info.physical_max = 3276.7;
        info.digital_min = -32768;
        info.digital_max = 32767;
        info.samples_per_record = options.sample_rate;
        rec.channels.push_back(info);
    }
    rec.samples.resize(options.channels, samples);
    for (Index c = 0; c < options.channels; ++c) {
        const ChannelInfo& info = rec.channels[static_cast<std::size_t>(c)];
        for (Index t = 0; t < samples; ++t) {
            rec.samples(c, t) = info.to_physical(info.to_digital(signal(c, t)));
        }
    }
    return rec;
}

} // namespace eegcs
