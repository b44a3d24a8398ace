#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "unitkit/unitcore.hpp"

namespace unitkit {

// Realized dual-rate schedule: one unit per 20-ms audio frame, one per 40-ms
// video frame, plus the reference video frame chosen for each video frame.
struct FrameTimeline {
    std::vector<UnitId> audio_units;
    std::vector<UnitId> video_units;
    std::vector<std::int64_t> ref_indices;
};

enum class RefPolicy {
    OneToOne,  // index i; requires n_video <= n_ref
    Wrap,      // i mod n_ref
    PingPong,  // 0..n_ref-1, n_ref-2..1, repeating (no endpoint stall)
};

struct RefAssignment {
    std::vector<std::int64_t> ref_indices;
    std::int64_t repeats = 0;  // video frames whose ref index appeared before
};

// Audio frames pass through unchanged; video takes the unit active at each
// 40-ms tick (every even audio index), so a trailing odd frame is covered by
// the final unit. ref_indices is left empty.
FrameTimeline build_timeline(const ContinuousUnitSeq& z);

RefAssignment assign_reference_frames(std::int64_t n_video,
                                      std::int64_t n_ref, RefPolicy policy);

RefPolicy parse_ref_policy(const std::string& name);

std::string timeline_to_json(const FrameTimeline& timeline);

}  // namespace unitkit
