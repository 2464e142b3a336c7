#include <gtest/gtest.h>

#include "eegcs/edf.hpp"
#include "eegcs/segments.hpp"
#include "eegcs/synthetic.hpp"
#include "test_support.hpp"

#include <filesystem>
#include <sstream>
#include <string>

using namespace eegcs;
using namespace eegcs::testing;

namespace {

struct RawSignal {
    std::string label = "EEG";
    double pmin = -100, pmax = 100;
    int dmin = -32768, dmax = 32767;
    int per_record = 4;
};

std::string field(const std::string& s, std::size_t width) {
    std::string out = s.substr(0, width);
    out.resize(width, ' ');
    return out;
}

// Builds an EDF byte stream directly from the format description, without
// going through the library writer.
std::vector<std::uint8_t> raw_edf(const std::vector<RawSignal>& sigs, int records, double duration,
                                  const std::vector<std::int16_t>& data) {
    std::string h;
    h += field("0", 8) + field("patient", 80) + field("recording", 80);
    h += field("01.02.03", 8) + field("04.05.06", 8);
    h += field(std::to_string(256 * (sigs.size() + 1)), 8) + field("", 44);
    std::ostringstream dur;
    dur << duration;
    h += field(std::to_string(records), 8) + field(dur.str(), 8) + field(std::to_string(sigs.size()), 4);
    auto each = [&](auto get, std::size_t width) {
        for (const auto& s : sigs) h += field(get(s), width);
    };
    auto num = [](double v) {
        std::ostringstream o;
        o << v;
        return o.str();
    };
    each([](const RawSignal& s) { return s.label; }, 16);
    each([](const RawSignal&) { return std::string(); }, 80);
    each([](const RawSignal&) { return std::string("uV"); }, 8);
    each([&](const RawSignal& s) { return num(s.pmin); }, 8);
    each([&](const RawSignal& s) { return num(s.pmax); }, 8);
    each([](const RawSignal& s) { return std::to_string(s.dmin); }, 8);
    each([](const RawSignal& s) { return std::to_string(s.dmax); }, 8);
    each([](const RawSignal&) { return std::string(); }, 80);
    each([](const RawSignal& s) { return std::to_string(s.per_record); }, 8);
    each([](const RawSignal&) { return std::string(); }, 32);
    std::vector<std::uint8_t> out(h.begin(), h.end());
    for (std::int16_t v : data) {
        const auto u = static_cast<std::uint16_t>(v);
        out.push_back(static_cast<std::uint8_t>(u & 0xFF));
        out.push_back(static_cast<std::uint8_t>(u >> 8));
    }
    return out;
}

Recording random_recording(Rng& rng) {
    Recording rec;
    const int channels = 1 + static_cast<int>(rng.below(6));
    const int per_record = 1 + static_cast<int>(rng.below(300));
    rec.record_count = 1 + static_cast<std::int64_t>(rng.below(5));
    rec.record_duration = rng.uniform() < 0.5 ? 1.0 : 0.5;
    rec.patient = "X" + std::to_string(rng.below(1000));
    for (int c = 0; c < channels; ++c) {
        ChannelInfo info;
        info.label = "CH" + std::to_string(c);
        info.physical_min = -std::round(1 + 5000 * rng.uniform());
        info.physical_max = std::round(1 + 5000 * rng.uniform());
        info.digital_min = -32768 + static_cast<int>(rng.below(1000));
        info.digital_max = 32767 - static_cast<int>(rng.below(1000));
        info.samples_per_record = per_record;
        rec.channels.push_back(info);
    }
    rec.samples.resize(channels, per_record * rec.record_count);
    for (int c = 0; c < channels; ++c)
        for (Index t = 0; t < rec.samples.cols(); ++t) {
            const auto& i = rec.channels[c];
            rec.samples(c, t) = i.physical_min + rng.uniform() * (i.physical_max - i.physical_min);
        }
    return rec;
}

Recording ramp_recording(Index channels, Index samples) {
    Recording rec;
    rec.record_duration = 1.0;
    rec.record_count = samples / 256;
    for (Index c = 0; c < channels; ++c) {
        ChannelInfo info;
        info.label = "C" + std::to_string(c);
        info.physical_min = -1000;
        info.physical_max = 1000;
        info.samples_per_record = 256;
        rec.channels.push_back(info);
    }
    rec.samples.resize(channels, samples);
    for (Index c = 0; c < channels; ++c)
        for (Index t = 0; t < samples; ++t)
            rec.samples(c, t) = std::sin(0.01 * static_cast<double>(t * (c + 1))) + 0.001 * static_cast<double>(c);
    return rec;
}

} // namespace

TEST(Edf, MidpointScaling) {
    const auto bytes = raw_edf({RawSignal{}}, 1, 1.0, {0, 0, 0, 0});
    const auto rec = parse_edf(bytes);
    EXPECT_NEAR(rec.samples(0, 0), -100.0 + 32768.0 * 200.0 / 65535.0, 1e-12);
    EXPECT_NEAR(rec.samples(0, 0), 0.0015259, 1e-7);
}

TEST(Edf, HeaderEcho) {
    std::vector<RawSignal> sigs(23);
    for (auto& s : sigs) s.per_record = 256;
    const std::vector<std::int16_t> data(23 * 256 * 2, 7);
    const auto rec = parse_edf(raw_edf(sigs, 2, 1.0, data));
    EXPECT_EQ(rec.channel_count(), 23);
    EXPECT_EQ(rec.sample_rate(), 256.0);
    EXPECT_EQ(rec.sample_count(), 512);
    EXPECT_EQ(rec.duration(), 2.0);
    EXPECT_EQ(rec.start_date, "01.02.03");
}

TEST(Edf, DeinterleavesRecords) {
    std::vector<RawSignal> sigs(2);
    sigs[0].per_record = 2;
    sigs[1].per_record = 2;
    sigs[0].pmin = sigs[1].pmin = -32768;
    sigs[0].pmax = sigs[1].pmax = 32767;
    // record 1: ch0 = {1,2}, ch1 = {10,20}; record 2: ch0 = {3,4}, ch1 = {30,40}
    const auto rec = parse_edf(raw_edf(sigs, 2, 1.0, {1, 2, 10, 20, 3, 4, 30, 40}));
    Matrix expected(2, 4);
    expected << 1, 2, 3, 4, 10, 20, 30, 40;
    EXPECT_LE((rec.samples - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Edf, SkipsAnnotationSignal) {
    std::vector<RawSignal> sigs(2);
    sigs[1].label = "EDF Annotations";
    sigs[1].per_record = 3;
    const auto rec = parse_edf(raw_edf(sigs, 1, 1.0, {0, 0, 0, 0, 5, 5, 5}));
    EXPECT_EQ(rec.channel_count(), 1);
}

TEST(Edf, Errors) {
    const auto good = raw_edf({RawSignal{}}, 1, 1.0, {0, 0, 0, 0});
    EXPECT_THROW(parse_edf(std::span(good).first(100)), FormatError);
    EXPECT_THROW(parse_edf(std::span(good).first(300)), FormatError);
    EXPECT_THROW(parse_edf(std::span(good).first(good.size() - 2)), FormatError);

    auto bad_number = good;
    bad_number[236] = 'x'; // record count field
    EXPECT_THROW(parse_edf(bad_number), FormatError);

    RawSignal flat;
    flat.dmin = flat.dmax = 5;
    EXPECT_THROW(parse_edf(raw_edf({flat}, 1, 1.0, {0, 0, 0, 0})), FormatError);

    std::vector<RawSignal> mixed(2);
    mixed[1].per_record = 8;
    EXPECT_THROW(parse_edf(raw_edf(mixed, 1, 1.0, std::vector<std::int16_t>(12, 0))), FormatError);
}

TEST(Edf, UnknownRecordCountIsInferred) {
    auto bytes = raw_edf({RawSignal{}}, 1, 1.0, {1, 2, 3, 4, 5, 6, 7, 8});
    const std::string minus_one = field("-1", 8);
    std::copy(minus_one.begin(), minus_one.end(), bytes.begin() + 236);
    EXPECT_EQ(parse_edf(bytes).sample_count(), 8);
}

TEST(Edf, RoundTripWithinOneStep) {
    Rng rng(80);
    for (int trial = 0; trial < 20; ++trial) {
        const Recording rec = random_recording(rng);
        const Recording back = parse_edf(write_edf(rec));
        ASSERT_EQ(back.channel_count(), rec.channel_count());
        for (Index c = 0; c < rec.channel_count(); ++c) {
            const double step = rec.channels[c].quantization_step();
            EXPECT_LE((back.samples.row(c) - rec.samples.row(c)).cwiseAbs().maxCoeff(), step * (1 + 1e-9));
            EXPECT_EQ(back.channels[c].label, rec.channels[c].label);
        }
    }
}

TEST(Edf, CanonicalAfterOneCycle) {
    Rng rng(81);
    for (int trial = 0; trial < 10; ++trial) {
        const auto first = write_edf(parse_edf(write_edf(random_recording(rng))));
        const auto second = write_edf(parse_edf(first));
        EXPECT_EQ(first, second);
    }
}

TEST(Edf, PhysicalConversionIsAffineAndMonotone) {
    ChannelInfo c;
    c.physical_min = -250;
    c.physical_max = 750;
    double prev = -std::numeric_limits<double>::infinity();
    for (int d = c.digital_min; d <= c.digital_max; d += 97) {
        const double p = c.to_physical(d);
        EXPECT_GT(p, prev);
        prev = p;
        EXPECT_NEAR(c.to_physical(d + 1) - p, c.quantization_step(), 1e-9);
        EXPECT_EQ(c.to_digital(p), d);
    }
}

TEST(Edf, SurrogateSurvivesRoundTripExactly) {
    SurrogateEegOptions opt;
    opt.seconds = 4;
    const auto rec = make_surrogate_eeg(opt);
    EXPECT_EQ(rec.channel_count(), 23);
    EXPECT_EQ(rec.sample_rate(), 256.0);
    const auto back = parse_edf(write_edf(rec));
    EXPECT_LE((back.samples - rec.samples).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Edf, FileRoundTrip) {
    const auto path = std::filesystem::temp_directory_path() / "eegcs_test_file.edf";
    Rng rng(82);
    const auto rec = random_recording(rng);
    save_edf(path, rec);
    EXPECT_EQ(read_edf(path).sample_count(), rec.sample_count());
    std::filesystem::remove(path);
    EXPECT_THROW(read_edf(path), FormatError);
}

TEST(Segment, MultiChannelFrobeniusNormalized) {
    const auto rec = ramp_recording(23, 1024);
    const auto res = segment(rec, 256, SegmentMode::MultiChannel, 1, 0);
    ASSERT_EQ(res.segments.size(), 1u);
    EXPECT_EQ(res.segments[0].data.rows(), 256);
    EXPECT_EQ(res.segments[0].data.cols(), 23);
    EXPECT_NEAR(res.segments[0].data.norm(), 1.0, 1e-12);
    EXPECT_EQ(res.segments[0].norm, NormKind::Frobenius);
}

TEST(Segment, SingleChannelCyclesChannels) {
    const auto rec = ramp_recording(23, 512);
    const auto res = segment(rec, 256, SegmentMode::SingleChannel, 46, 0);
    ASSERT_EQ(res.segments.size(), 46u);
    for (std::size_t w = 0; w < 46; ++w) {
        EXPECT_EQ(*res.segments[w].channel, w % 23);
        EXPECT_EQ(res.segments[w].source_offset, static_cast<std::int64_t>(w / 23 * 256));
        EXPECT_NEAR(res.segments[w].data.norm(), 1.0, 1e-12);
    }
}

TEST(Segment, WindowsReproduceRecordingSlices) {
    const auto rec = ramp_recording(4, 2048);
    const auto res = segment(rec, 256, SegmentMode::MultiChannel, 8, 0);
    for (std::size_t w = 0; w < 8; ++w) {
        const Matrix slice = rec.samples.block(0, static_cast<Index>(w) * 256, 4, 256).transpose();
        EXPECT_LE((res.segments[w].data - slice / slice.norm()).cwiseAbs().maxCoeff(), 1e-15);
        if (w > 0) EXPECT_EQ(res.segments[w].source_offset, res.segments[w - 1].source_offset + 256);
    }
}

TEST(Segment, SeedShiftsStartOnly) {
    const auto rec = ramp_recording(3, 4096);
    const auto a = segment(rec, 256, SegmentMode::MultiChannel, 4, 99);
    const auto b = segment(rec, 256, SegmentMode::MultiChannel, 4, 99);
    EXPECT_EQ(a.segments, b.segments);
    for (std::size_t w = 1; w < 4; ++w)
        EXPECT_EQ(a.segments[w].source_offset, a.segments[0].source_offset + static_cast<std::int64_t>(w) * 256);
}

TEST(Segment, ConstantChannelIsNotDegenerate) {
    auto rec = ramp_recording(3, 512);
    rec.samples.row(1).setConstant(4.0);
    const auto res = segment(rec, 256, SegmentMode::SingleChannel, 6, 0);
    EXPECT_EQ(res.skipped, 0u);
    EXPECT_NEAR(res.segments[1].data.norm(), 1.0, 1e-12);
}

TEST(Segment, ZeroWindowsAreSkipped) {
    auto rec = ramp_recording(2, 1024);
    rec.samples.block(0, 0, 2, 256).setZero();
    const auto res = segment(rec, 256, SegmentMode::MultiChannel, 2, 0);
    EXPECT_EQ(res.skipped, 1u);
    EXPECT_EQ(res.segments[0].source_offset, 256);
    EXPECT_THROW(normalize_segment(SignalSegment{Matrix::Zero(4, 1)}, SegmentMode::SingleChannel),
                 DegenerateSegmentError);
}

TEST(Segment, TooShort) {
    const auto rec = ramp_recording(2, 512);
    EXPECT_THROW(segment(rec, 1024, SegmentMode::MultiChannel, 1, 0), DimensionError);
    EXPECT_THROW(segment(rec, 256, SegmentMode::MultiChannel, 3, 0), DimensionError);
    EXPECT_THROW(segment(rec, 256, SegmentMode::MultiChannel, 1, 0, 5), DimensionError);
}

TEST(Segment, ChannelSubset) {
    const auto rec = ramp_recording(23, 512);
    const auto res = segment(rec, 256, SegmentMode::MultiChannel, 2, 0, 8);
    EXPECT_EQ(res.segments[0].data.cols(), 8);
}

TEST(Container, EmptyList) {
    std::stringstream ss;
    write_segments(ss, {});
    EXPECT_EQ(ss.str().size(), 24u);
    EXPECT_TRUE(read_segments(ss).empty());
}

TEST(Container, OneMultiChannelSegment) {
    const auto segs = segment(ramp_recording(23, 512), 256, SegmentMode::MultiChannel, 1, 0).segments;
    std::stringstream ss;
    write_segments(ss, segs);
    EXPECT_EQ(ss.str().size(), segment_container_size(segs));
    EXPECT_EQ(read_segments(ss), segs);
}

TEST(Container, ManySingleChannelSegments) {
    SurrogateEegOptions opt;
    opt.seconds = 6;
    const auto segs = segment(make_surrogate_eeg(opt), 256, SegmentMode::SingleChannel, 138, 0).segments;
    std::vector<SignalSegment> many;
    while (many.size() < 500) many.insert(many.end(), segs.begin(), segs.end());
    many.resize(500);
    const auto path = std::filesystem::temp_directory_path() / "eegcs_test_segments.bin";
    export_segments(many, path);
    EXPECT_EQ(std::filesystem::file_size(path), 24u + 500u * (32u + 8u * 256u));
    const auto back = import_segments(path);
    ASSERT_EQ(back.size(), 500u);
    for (std::size_t i = 0; i < 500; ++i) {
        ASSERT_EQ(back[i], many[i]);
        ASSERT_EQ(std::memcmp(back[i].data.data(), many[i].data.data(), 8 * 256), 0);
    }
    std::filesystem::remove(path);
}

TEST(Container, Malformed) {
    std::stringstream bad_magic("XXXXXXXX0000000000000000");
    EXPECT_THROW(read_segments(bad_magic), FormatError);

    std::stringstream ss;
    write_segments(ss, {SignalSegment{Matrix::Ones(2, 1)}});
    std::string s = ss.str();
    s[8] = 2; // version
    std::stringstream wrong_version(s);
    EXPECT_THROW(read_segments(wrong_version), FormatError);

    s = ss.str();
    s.resize(s.size() - 3);
    std::stringstream cut(s);
    EXPECT_THROW(read_segments(cut), FormatError);

    std::stringstream extra(ss.str() + "z");
    EXPECT_THROW(read_segments(extra), FormatError);
}
