#include "unitkit/schedule.hpp"

#include <unordered_set>

namespace unitkit {

FrameTimeline build_timeline(const ContinuousUnitSeq& z) {
    if (z.frame_ms != 20) {
        throw ValidationError("WrongFrameRate",
                              "expected 20-ms frames, got " +
                                  std::to_string(z.frame_ms) + " ms");
    }
    FrameTimeline timeline;
    timeline.audio_units = z.units;
    timeline.video_units.reserve((z.units.size() + 1) / 2);
    for (std::size_t i = 0; i < z.units.size(); i += 2) {
        timeline.video_units.push_back(z.units[i]);
    }
    return timeline;
}

RefAssignment assign_reference_frames(std::int64_t n_video,
                                      std::int64_t n_ref, RefPolicy policy) {
    if (n_video < 0) {
        throw ValidationError("InvalidArgument", "n_video must be >= 0");
    }
    if (n_ref < 1) {
        throw ValidationError("InvalidArgument", "n_ref must be >= 1");
    }
    if (policy == RefPolicy::OneToOne && n_video > n_ref) {
        throw ValidationError("NotIsometric",
                              std::to_string(n_video) + " video frames vs " +
                                  std::to_string(n_ref) + " reference frames");
    }

    RefAssignment out;
    out.ref_indices.reserve(static_cast<std::size_t>(n_video));
    for (std::int64_t i = 0; i < n_video; ++i) {
        std::int64_t ref = 0;
        switch (policy) {
            case RefPolicy::OneToOne:
                ref = i;
                break;
            case RefPolicy::Wrap:
                ref = i % n_ref;
                break;
            case RefPolicy::PingPong: {
                if (n_ref == 1) {
                    ref = 0;
                } else {
                    const std::int64_t period = 2 * (n_ref - 1);
                    const std::int64_t phase = i % period;
                    ref = phase < n_ref ? phase : period - phase;
                }
                break;
            }
        }
        out.ref_indices.push_back(ref);
    }

    std::unordered_set<std::int64_t> seen;
    for (const std::int64_t ref : out.ref_indices) {
        if (!seen.insert(ref).second) ++out.repeats;
    }
    return out;
}

RefPolicy parse_ref_policy(const std::string& name) {
    if (name == "one_to_one") return RefPolicy::OneToOne;
    if (name == "wrap") return RefPolicy::Wrap;
    if (name == "pingpong") return RefPolicy::PingPong;
    throw ValidationError("InvalidArgument", "unknown policy '" + name + "'");
}

namespace {

void append_array(std::string& out, const char* key,
                  const std::vector<std::int64_t>& values) {
    out += '"';
    out += key;
    out += "\":[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(values[i]);
    }
    out += ']';
}

}  // namespace

std::string timeline_to_json(const FrameTimeline& timeline) {
    std::string out = "{";
    append_array(out, "audio_units", timeline.audio_units);
    out += ',';
    append_array(out, "video_units", timeline.video_units);
    out += ',';
    append_array(out, "ref_indices", timeline.ref_indices);
    out += '}';
    return out;
}

}  // namespace unitkit
