#include "eegcs/edf.hpp"

#include "eegcs/matrix_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string_view>

namespace eegcs {
namespace {

constexpr std::size_t kFixedHeader = 256;
constexpr std::size_t kSignalHeader = 256;
constexpr std::string_view kAnnotationLabel = "EDF Annotations";

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\0')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\0')) {
        s.remove_suffix(1);
    }
    return s;
}

class HeaderReader {
public:
    explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::string_view field(std::size_t width, const char* name) {
        if (pos_ + width > bytes_.size()) {
            throw FormatError(std::string("EDF header truncated while reading ") + name);
        }
        std::string_view out(reinterpret_cast<const char*>(bytes_.data()) + pos_, width);
        pos_ += width;
        return out;
    }

    std::string text(std::size_t width, const char* name) {
        return std::string(trim(field(width, name)));
    }

    std::int64_t integer(std::size_t width, const char* name) {
        const auto s = trim(field(width, name));
        std::int64_t v = 0;
        const auto* end = s.data() + s.size();
        auto begin = s.data();
        if (!s.empty() && *begin == '+') {
            ++begin;
        }
        const auto res = std::from_chars(begin, end, v);
        if (s.empty() || res.ec != std::errc{} || res.ptr != end) {
            throw FormatError(std::string("EDF field ") + name + " is not an integer: '" +
                              std::string(s) + "'");
        }
        return v;
    }

    double real(std::size_t width, const char* name) {
        const auto s = trim(field(width, name));
        try {
            return parse_double(s);
        } catch (const FormatError&) {
            throw FormatError(std::string("EDF field ") + name + " is not a number: '" +
                              std::string(s) + "'");
        }
    }

    [[nodiscard]] std::size_t position() const { return pos_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

// Shortest decimal that fits the 8-character numeric fields.
std::string fit_number(double v, std::size_t width) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    std::string s(buf.data(), res.ptr);
    for (int precision = 15; s.size() > width && precision >= 1; --precision) {
        res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                            std::chars_format::general, precision);
        s.assign(buf.data(), res.ptr);
    }
    if (s.size() > width) {
        throw FormatError("value " + s + " does not fit an EDF header field");
    }
    return s;
}

void put_field(std::vector<std::uint8_t>& out, std::string_view text, std::size_t width) {
    if (text.size() > width) {
        text = text.substr(0, width);
    }
    out.insert(out.end(), text.begin(), text.end());
    out.insert(out.end(), width - text.size(), static_cast<std::uint8_t>(' '));
}

} // namespace

double ChannelInfo::to_physical(std::int32_t digital) const {
    return physical_min + static_cast<double>(digital - digital_min) *
                              (physical_max - physical_min) /
                              static_cast<double>(digital_max - digital_min);
}

std::int32_t ChannelInfo::to_digital(double physical) const {
    const double d = static_cast<double>(digital_min) +
                     (physical - physical_min) * static_cast<double>(digital_max - digital_min) /
                         (physical_max - physical_min);
    const double clamped = std::clamp(std::round(d), static_cast<double>(digital_min),
                                      static_cast<double>(digital_max));
    return static_cast<std::int32_t>(clamped);
}

double ChannelInfo::quantization_step() const {
    return (physical_max - physical_min) / static_cast<double>(digital_max - digital_min);
}

double Recording::sample_rate() const {
    if (channels.empty() || record_duration <= 0.0) {
        return 0.0;
    }
    return static_cast<double>(channels.front().samples_per_record) / record_duration;
}

Recording parse_edf(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kFixedHeader) {
        throw FormatError("EDF header truncated: " + std::to_string(bytes.size()) + " bytes");
    }
    HeaderReader h(bytes);
    Recording rec;
    h.field(8, "version");
    rec.patient = h.text(80, "patient");
    rec.recording_id = h.text(80, "recording");
    rec.start_date = h.text(8, "startdate");
    rec.start_time = h.text(8, "starttime");
    const auto header_bytes = h.integer(8, "header bytes");
    h.field(44, "reserved");
    rec.record_count = h.integer(8, "number of data records");
    rec.record_duration = h.real(8, "duration of a data record");
    const auto ns = h.integer(4, "number of signals");
    if (ns < 1) {
        throw FormatError("EDF declares no signals");
    }
    const std::size_t signals = static_cast<std::size_t>(ns);
    if (bytes.size() < kFixedHeader + signals * kSignalHeader) {
        throw FormatError("EDF header truncated: signal headers need " +
                          std::to_string(kFixedHeader + signals * kSignalHeader) + " bytes");
    }
    if (header_bytes != static_cast<std::int64_t>(kFixedHeader + signals * kSignalHeader)) {
        throw FormatError("EDF header byte count " + std::to_string(header_bytes) +
                          " disagrees with " + std::to_string(signals) + " signals");
    }

    std::vector<ChannelInfo> all(signals);
    for (auto& c : all) c.label = h.text(16, "label");
    for (auto& c : all) c.transducer = h.text(80, "transducer");
    for (auto& c : all) c.physical_dimension = h.text(8, "physical dimension");
    for (auto& c : all) c.physical_min = h.real(8, "physical minimum");
    for (auto& c : all) c.physical_max = h.real(8, "physical maximum");
    for (auto& c : all) c.digital_min = static_cast<std::int32_t>(h.integer(8, "digital minimum"));
    for (auto& c : all) c.digital_max = static_cast<std::int32_t>(h.integer(8, "digital maximum"));
    for (auto& c : all) c.prefiltering = h.text(80, "prefiltering");
    for (auto& c : all) {
        c.samples_per_record = static_cast<std::int32_t>(h.integer(8, "samples per record"));
    }
    for (std::size_t i = 0; i < signals; ++i) h.field(32, "signal reserved");

    std::size_t record_samples = 0;
    for (const auto& c : all) {
        if (c.samples_per_record < 0) {
            throw FormatError("EDF signal '" + c.label + "' has negative samples per record");
        }
        record_samples += static_cast<std::size_t>(c.samples_per_record);
    }
    const std::size_t record_bytes = 2 * record_samples;
    const std::size_t data_bytes = bytes.size() - h.position();
    if (rec.record_count < 0) {
        // -1 marks an unfinished recording; infer the count from the payload.
        rec.record_count = record_bytes == 0 ? 0 : static_cast<std::int64_t>(data_bytes / record_bytes);
    }
    const std::size_t records = static_cast<std::size_t>(rec.record_count);
    if (records * record_bytes != data_bytes) {
        throw FormatError("EDF data size " + std::to_string(data_bytes) + " does not match " +
                          std::to_string(records) + " records of " +
                          std::to_string(record_bytes) + " bytes");
    }

    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < signals; ++i) {
        if (all[i].label == kAnnotationLabel) {
            continue;
        }
        if (all[i].digital_max == all[i].digital_min) {
            throw FormatError("EDF signal '" + all[i].label + "' has digital max == min");
        }
        if (!keep.empty() && all[i].samples_per_record != all[keep.front()].samples_per_record) {
            throw FormatError("EDF signals use different sampling rates");
        }
        keep.push_back(i);
    }
    if (keep.empty()) {
        throw FormatError("EDF contains only annotation signals");
    }
    for (std::size_t i : keep) {
        rec.channels.push_back(all[i]);
    }

    const std::size_t per_record = static_cast<std::size_t>(rec.channels.front().samples_per_record);
    rec.samples.resize(static_cast<Index>(keep.size()), static_cast<Index>(records * per_record));
    const std::uint8_t* data = bytes.data() + h.position();
    for (std::size_t r = 0; r < records; ++r) {
        std::size_t offset = r * record_bytes;
        std::size_t out_channel = 0;
        for (std::size_t s = 0; s < signals; ++s) {
            const std::size_t count = static_cast<std::size_t>(all[s].samples_per_record);
            const bool kept = out_channel < keep.size() && keep[out_channel] == s;
            if (kept) {
                const ChannelInfo& info = all[s];
                for (std::size_t k = 0; k < count; ++k) {
                    const std::size_t at = offset + 2 * k;
                    const auto raw = static_cast<std::uint16_t>(data[at] | (data[at + 1] << 8));
                    // Out-of-range codes are clamped so physical values stay in range.
                    const auto digital = std::clamp<std::int32_t>(static_cast<std::int16_t>(raw),
                                                                  info.digital_min, info.digital_max);
                    rec.samples(static_cast<Index>(out_channel),
                                static_cast<Index>(r * per_record + k)) = info.to_physical(digital);
                }
                ++out_channel;
            }
            offset += 2 * count;
        }
    }
    return rec;
}

Recording read_edf(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open " + path.string());
    }
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                          std::istreambuf_iterator<char>());
    return parse_edf(bytes);
}

std::vector<std::uint8_t> write_edf(const Recording& rec) {
    const std::size_t signals = rec.channels.size();
    if (signals == 0) {
        throw FormatError("cannot write an EDF without signals");
    }
    if (rec.samples.rows() != static_cast<Index>(signals)) {
        throw DimensionError("recording has " + std::to_string(rec.samples.rows()) +
                             " sample rows for " + std::to_string(signals) + " channels");
    }
    const auto per_record = rec.channels.front().samples_per_record;
    for (const auto& c : rec.channels) {
        if (c.samples_per_record != per_record) {
            throw FormatError("EDF writer needs one sampling rate across channels");
        }
        if (c.digital_min < -32768 || c.digital_max > 32767 || c.digital_max <= c.digital_min) {
            throw FormatError("EDF digital range must lie within 16 bits");
        }
        if (!(c.physical_max > c.physical_min)) {
            throw FormatError("EDF physical range of '" + c.label + "' is empty");
        }
    }
    if (rec.samples.cols() != rec.record_count * per_record) {
        throw DimensionError("sample count is not record_count * samples_per_record");
    }

    std::vector<std::uint8_t> out;
    out.reserve(kFixedHeader + signals * kSignalHeader +
                static_cast<std::size_t>(rec.samples.size()) * 2);
    put_field(out, "0", 8);
    put_field(out, rec.patient, 80);
    put_field(out, rec.recording_id, 80);
    put_field(out, rec.start_date, 8);
    put_field(out, rec.start_time, 8);
    put_field(out, std::to_string(kFixedHeader + signals * kSignalHeader), 8);
    put_field(out, "", 44);
    put_field(out, std::to_string(rec.record_count), 8);
    put_field(out, fit_number(rec.record_duration, 8), 8);
    put_field(out, std::to_string(signals), 4);
    for (const auto& c : rec.channels) put_field(out, c.label, 16);
    for (const auto& c : rec.channels) put_field(out, c.transducer, 80);
    for (const auto& c : rec.channels) put_field(out, c.physical_dimension, 8);
    for (const auto& c : rec.channels) put_field(out, fit_number(c.physical_min, 8), 8);
    for (const auto& c : rec.channels) put_field(out, fit_number(c.physical_max, 8), 8);
    for (const auto& c : rec.channels) put_field(out, std::to_string(c.digital_min), 8);
    for (const auto& c : rec.channels) put_field(out, std::to_string(c.digital_max), 8);
    for (const auto& c : rec.channels) put_field(out, c.prefiltering, 80);
    for (const auto& c : rec.channels) put_field(out, std::to_string(c.samples_per_record), 8);
    for (std::size_t i = 0; i < signals; ++i) put_field(out, "", 32);

    for (std::int64_t r = 0; r < rec.record_count; ++r) {
        for (std::size_t s = 0; s < signals; ++s) {
            const ChannelInfo& info = rec.channels[s];
            for (std::int32_t k = 0; k < per_record; ++k) {
                const auto d = info.to_digital(
                    rec.samples(static_cast<Index>(s), static_cast<Index>(r * per_record + k)));
                const auto raw = static_cast<std::uint16_t>(static_cast<std::int16_t>(d));
                out.push_back(static_cast<std::uint8_t>(raw & 0xFF));
                out.push_back(static_cast<std::uint8_t>(raw >> 8));
            }
        }
    }
    return out;
}

void save_edf(const std::filesystem::path& path, const Recording& rec) {
    const auto bytes = write_edf(rec);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError("cannot open " + path.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

} // namespace eegcs
