#pragma once

#include "kripke/blended.hpp"
#include "kripke/dejongh.hpp"
#include "kripke/frames.hpp"
#include "kripke/propositional.hpp"
#include "kripke/universes.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace kripke {

using Json = nlohmann::ordered_json;

// {"nodes": [...], "le": [[a, b], ...], "root": r}; le lists the strict pairs.
Json frame_to_json(const Frame& frame);
// Throws ParseError on malformed JSON shapes and FrameError on non-trees.
Frame frame_from_json(const Json& j);
Frame read_frame_file(const std::string& path);

// One nested array per carrier element, in canonical order.
Json universe_to_json(const Universe& universe);
// Every set nested inside a listed element must itself be listed.
Universe universe_from_json(const Json& j);

// {"p": [node ids], ...}
Json valuation_to_json(const Frame& frame, const Valuation& valuation);
Valuation valuation_from_json(const Frame& frame, const Json& j);

Json countermodel_to_json(const Frame& frame, const Countermodel& cm);

// Domain sizes per node and rank, end heights, and sampled checks that the
// transition maps compose and preserve membership.
Json model_report(const BlendedModel& model, std::size_t samples, std::uint64_t seed);

Json certificate_to_json(const Certificate& cert);

} // namespace kripke
