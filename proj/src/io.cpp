#include "kripke/io.hpp"

#include "kripke/errors.hpp"

#include <fstream>
#include <map>
#include <random>
#include <set>

namespace kripke {

Json frame_to_json(const Frame& frame)
{
    Json j;
    j["nodes"] = frame.ids();
    Json le = Json::array();
    for (const auto& [a, b] : frame.order_pairs()) {
        if (a != b) {
            le.push_back({a, b});
        }
    }
    j["le"] = le;
    j["root"] = frame.id(frame.root());
    return j;
}

Frame frame_from_json(const Json& j)
{
    try {
        if (!j.is_object() || !j.contains("nodes")) {
            throw ParseError("frame JSON needs an object with \"nodes\"", 0);
        }
        const auto nodes = j.at("nodes").get<std::vector<int>>();
        std::vector<std::pair<int, int>> le;
        if (j.contains("le")) {
            for (const auto& pair : j.at("le")) {
                if (!pair.is_array() || pair.size() != 2) {
                    throw ParseError("\"le\" entries must be pairs", 0);
                }
                le.emplace_back(pair[0].get<int>(), pair[1].get<int>());
            }
        }
        std::optional<int> root;
        if (j.contains("root") && !j.at("root").is_null()) {
            root = j.at("root").get<int>();
        }
        return validate_tree(nodes, le, root);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("frame JSON: ") + e.what(), 0);
    }
}

Frame read_frame_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path, 0);
    }
    try {
        return frame_from_json(Json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what(), e.byte);
    }
}

namespace {

Json nested(const Universe& u, SetId a)
{
    Json out = Json::array();
    for (SetId m : u.members(a)) {
        out.push_back(nested(u, m));
    }
    return out;
}

// Interns a nested array as a hereditarily finite set.
struct Interner {
    std::map<std::vector<std::size_t>, std::size_t> ids;
    std::vector<std::vector<std::size_t>> members;

    std::size_t intern(const Json& j)
    {
        if (!j.is_array()) {
            throw ParseError("universe elements must be nested arrays", 0);
        }
        std::vector<std::size_t> ms;
        for (const auto& m : j) {
            ms.push_back(intern(m));
        }
        std::sort(ms.begin(), ms.end());
        if (std::adjacent_find(ms.begin(), ms.end()) != ms.end()) {
            throw ParseError("a nested array lists the same member twice", 0);
        }
        auto [it, added] = ids.emplace(ms, members.size());
        if (added) {
            members.push_back(ms);
        }
        return it->second;
    }
};

} // namespace

Json universe_to_json(const Universe& universe)
{
    Json out = Json::array();
    for (SetId a = 0; a < universe.size(); ++a) {
        out.push_back(nested(universe, a));
    }
    return out;
}

Universe universe_from_json(const Json& j)
{
    if (!j.is_array()) {
        throw ParseError("universe JSON must be an array", 0);
    }
    Interner interner;
    std::vector<std::size_t> listed;
    for (const auto& e : j) {
        listed.push_back(interner.intern(e));
    }
    std::map<std::size_t, std::size_t> position;
    for (std::size_t i = 0; i < listed.size(); ++i) {
        if (!position.emplace(listed[i], i).second) {
            throw PreconditionError("universe lists the same set twice (element " + std::to_string(i) + ")");
        }
    }
    std::vector<std::vector<std::size_t>> lists;
    for (std::size_t i = 0; i < listed.size(); ++i) {
        std::vector<std::size_t> ms;
        for (std::size_t m : interner.members[listed[i]]) {
            auto it = position.find(m);
            if (it == position.end()) {
                throw PreconditionError("universe is not transitive: a member of element " + std::to_string(i)
                                        + " is not listed");
            }
            ms.push_back(it->second);
        }
        lists.push_back(ms);
    }
    return Universe::from_member_lists(lists);
}

Json valuation_to_json(const Frame& frame, const Valuation& valuation)
{
    Json out = Json::object();
    for (const auto& [letter, set] : valuation) {
        Json ids = Json::array();
        for (NodeIndex v : members_of(set)) {
            ids.push_back(frame.id(v));
        }
        out[letter] = ids;
    }
    return out;
}

Valuation valuation_from_json(const Frame& frame, const Json& j)
{
    if (!j.is_object()) {
        throw ParseError("valuation JSON must map letters to node lists", 0);
    }
    Valuation out;
    try {
        for (const auto& [letter, ids] : j.items()) {
            NodeSet set = 0;
            for (const auto& id : ids) {
                set |= node_bit(frame.index_of(id.get<int>()));
            }
            out[letter] = set;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("valuation JSON: ") + e.what(), 0);
    }
    check_valuation(frame, out);
    return out;
}

Json countermodel_to_json(const Frame& frame, const Countermodel& cm)
{
    Json out;
    out["frame"] = frame_to_json(frame);
    out["valuation"] = valuation_to_json(frame, cm.valuation);
    out["node"] = frame.id(cm.node);
    return out;
}

Json model_report(const BlendedModel& model, std::size_t samples, std::uint64_t seed)
{
    const Frame& frame = model.frame();
    Json out;
    out["rank_cutoff"] = model.rank_cutoff();
    out["elements"] = model.element_count();
    Json nodes = Json::array();
    for (NodeIndex v = 0; v < frame.size(); ++v) {
        Json n;
        n["id"] = frame.id(v);
        n["end"] = frame.is_end(v);
        if (frame.is_end(v)) {
            n["height"] = model.universe(v).height();
        }
        Json strata = Json::array();
        for (int alpha = 1; alpha <= model.rank_cutoff(); ++alpha) {
            strata.push_back(model.stratum(v, alpha).size());
        }
        n["stratum_sizes"] = strata;
        n["domain"] = model.domain(v).size();
        n["fresh"] = model.fresh(v).size();
        nodes.push_back(n);
    }
    out["nodes"] = nodes;

    std::mt19937_64 rng(seed);
    std::size_t checked = 0;
    Json failures = Json::array();
    const auto pairs = frame.order_pairs();
    for (std::size_t s = 0; s < samples && model.element_count() > 0; ++s) {
        const ElementId x = std::uniform_int_distribution<ElementId>(0, static_cast<ElementId>(model.element_count() - 1))(rng);
        const NodeIndex v = model.node_of(x);
        const auto cone = members_of(frame.cone(v));
        const NodeIndex u = cone[std::uniform_int_distribution<std::size_t>(0, cone.size() - 1)(rng)];
        const auto upper = members_of(frame.cone(u));
        const NodeIndex w = upper[std::uniform_int_distribution<std::size_t>(0, upper.size() - 1)(rng)];
        ++checked;
        if (model.restrict(model.restrict(x, u), w) != model.restrict(x, w)) {
            failures.push_back("restriction of " + model.show(x) + " does not compose through node "
                               + std::to_string(frame.id(u)));
        }
        for (ElementId y : model.members(x)) {
            if (!model.has_member(model.restrict(x, u), model.restrict(y, u))) {
                failures.push_back("restriction to node " + std::to_string(frame.id(u)) + " loses a member of "
                                   + model.show(x));
            }
        }
    }
    out["spot_checks"] = {{"seed", seed}, {"checked", checked}, {"failures", failures}};
    return out;
}

Json certificate_to_json(const Certificate& cert)
{
    const Frame& frame = cert.frame;
    Json out;
    out["logic"] = cert.logic.name();
    out["formula"] = to_string(cert.formula);
    out["frame"] = frame_to_json(frame);
    out["valuation"] = valuation_to_json(frame, cert.valuation);
    out["refuting_node"] = frame.id(cert.node);
    Json heights = Json::object();
    for (const auto& [e, k] : cert.heights) {
        heights[std::to_string(frame.id(e))] = k;
    }
    out["universe_heights"] = heights;
    out["rank_cutoff"] = cert.rank;
    Json sigma = Json::object();
    for (const auto& [letter, image] : cert.sigma.images()) {
        sigma[letter] = to_string(image);
    }
    out["sigma"] = sigma;
    out["correspondence"] = {{"formulas", cert.correspondence.formulas},
                             {"checks", cert.correspondence.checks},
                             {"failures", cert.correspondence.failures}};
    out["image_forced_at_refuting_node"] = cert.image_forced_at_node;
    std::string heights_arg;
    for (const auto& [e, k] : cert.heights) {
        heights_arg += (heights_arg.empty() ? "" : ",") + std::to_string(k);
    }
    out["replay"] = {
        "save \"frame\" as frame.json and \"valuation\" as valuation.json",
        "kripke valid --frame frame.json --formula '" + to_string(cert.formula) + "'",
        "kripke faithful --frame frame.json --universes " + heights_arg + " --rank " + std::to_string(cert.rank)
            + " --valuation valuation.json --formula '" + to_string(cert.formula) + "'",
    };
    return out;
}

} // namespace kripke
