#include "acceptance.hpp"

#include "kripke/blended.hpp"
#include "kripke/dejongh.hpp"
#include "kripke/errors.hpp"
#include "kripke/formulas.hpp"
#include "kripke/frames.hpp"
#include "kripke/io.hpp"
#include "kripke/propositional.hpp"
#include "kripke/universes.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace kripke;

namespace {

// Verdict produced but negative: a check that ran and failed.
struct CheckFailed {
    Json report;
};

struct Config {
    bool json = false;
    std::string format = "text";
    std::uint64_t seed = 1;
    std::size_t samples = 200;
    unsigned jobs = 1;
    int rank = 2;
    std::uint64_t budget = 0;
    std::uint64_t valuation_budget = std::uint64_t{1} << 24;

    [[nodiscard]] bool as_json() const { return json || format == "json"; }
    [[nodiscard]] std::uint64_t element_budget() const { return budget > 0 ? budget : default_blend_budget(); }
    [[nodiscard]] ValidityOptions validity() const { return {valuation_budget, jobs}; }
};

void print_text(std::ostream& out, const Json& j, int indent)
{
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    // Arrays without objects print on one line.
    auto scalar_array = [](const Json& a) {
        return std::all_of(a.begin(), a.end(), [](const Json& e) {
            return !e.is_object() && (!e.is_array() || std::none_of(e.begin(), e.end(), [](const Json& x) { return x.is_structured(); }));
        });
    };
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            if (value.is_object() || (value.is_array() && !scalar_array(value))) {
                out << pad << key << ":\n";
                print_text(out, value, indent + 1);
            } else if (value.is_string()) {
                out << pad << key << ": " << value.get<std::string>() << "\n";
            } else {
                out << pad << key << ": " << value.dump() << "\n";
            }
        }
    } else if (j.is_array()) {
        for (const auto& value : j) {
            if (value.is_structured()) {
                out << pad << "-\n";
                print_text(out, value, indent + 1);
            } else {
                out << pad << "- " << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
            }
        }
    } else {
        out << pad << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
    }
}

void emit(const Config& cfg, const Json& j)
{
    if (cfg.as_json()) {
        std::cout << j.dump(2) << "\n";
    } else {
        print_text(std::cout, j, 0);
    }
}

Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path, 0);
    }
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what(), e.byte);
    }
}

// A JSON file, or one of: fork, chain:N, star:N.
Frame load_frame(const std::string& spec)
{
    if (std::filesystem::exists(spec)) {
        return read_frame_file(spec);
    }
    auto number = [&](std::size_t from) {
        try {
            return static_cast<std::size_t>(std::stoul(spec.substr(from)));
        } catch (const std::exception&) {
            throw ParseError("bad frame size in '" + spec + "'", from);
        }
    };
    if (spec == "fork") {
        return star(2);
    }
    if (spec.starts_with("chain:")) {
        return chain(number(6));
    }
    if (spec.starts_with("star:")) {
        return star(number(5));
    }
    throw ParseError("no frame file '" + spec + "' (shorthands: fork, chain:N, star:N)", 0);
}

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, sep)) {
        out.push_back(item);
    }
    return out;
}

// Heights like "3,4" (V_k per end-node in node order) or universe JSON files.
std::map<NodeIndex, Universe> load_universes(const Frame& frame, const std::string& spec)
{
    const auto ends = members_of(frame.end_nodes());
    std::vector<std::string> items = spec.empty() ? std::vector<std::string>{} : split(spec, ',');
    if (items.empty()) {
        std::map<NodeIndex, Universe> out = pipeline_universes(frame, default_universe_budget);
        return out;
    }
    if (items.size() == 1 && ends.size() > 1) {
        items.assign(ends.size(), items.front());
    }
    if (items.size() != ends.size()) {
        throw PreconditionError("frame has " + std::to_string(ends.size()) + " end-nodes but " + std::to_string(items.size())
                                + " universes were given");
    }
    std::map<NodeIndex, Universe> out;
    for (std::size_t i = 0; i < ends.size(); ++i) {
        if (std::filesystem::exists(items[i])) {
            out.emplace(ends[i], universe_from_json(read_json_file(items[i])));
        } else {
            int k = 0;
            try {
                k = std::stoi(items[i]);
            } catch (const std::exception&) {
                throw ParseError("universe '" + items[i] + "' is neither a height nor a file", 0);
            }
            out.emplace(ends[i], build_vk(k));
        }
    }
    return out;
}

Json node_ids(const Frame& frame, NodeSet set)
{
    Json out = Json::array();
    for (NodeIndex v : members_of(set)) {
        out.push_back(frame.id(v));
    }
    return out;
}

Json frame_info(const Frame& frame)
{
    Json j = frame_to_json(frame);
    j["depth"] = frame.depth();
    j["end_nodes"] = node_ids(frame, frame.end_nodes());
    Json counts = Json::object();
    for (NodeIndex v = 0; v < frame.size(); ++v) {
        counts[std::to_string(frame.id(v))] = upsets(frame, v).size();
    }
    j["upset_counts"] = counts;
    j["canonical_code"] = canonical_code(frame);
    return j;
}

struct Args {
    std::string formula;
    std::string frame;
    std::string valuation;
    std::string universes;
    std::string logic;
    std::string klass;
    std::string axiom;
    std::optional<int> node;
    std::optional<int> margin;
    std::optional<int> k;
    std::size_t bound = 4;
    std::size_t enumerate = 0;
    int n = 1;
    int depth = 2;
    bool set = false;
    bool persistence = false;
    std::string file;
    std::vector<int> only;
};

int run(const std::string& command, const Args& a, const Config& cfg)
{
    if (command == "parse") {
        Json j;
        j["input"] = a.formula;
        if (a.set) {
            const auto f = parse_set(a.formula);
            j["formula"] = to_string(f);
            j["canonical"] = canonical_string(f);
            j["free_variables"] = free_variables(f);
            j["quantifier_depth"] = quantifier_depth(f);
        } else {
            const auto f = parse_prop(a.formula);
            j["formula"] = to_string(f);
            j["letters"] = letters(f);
            j["depth"] = depth(f);
        }
        emit(cfg, j);
        return 0;
    }
    if (command == "frame") {
        if (a.enumerate > 0 || !a.klass.empty()) {
            const auto frames = a.klass.empty() ? enumerate_trees(a.enumerate)
                                                : enumerate_class(parse_frame_class(a.klass), a.bound);
            Json arr = Json::array();
            for (const auto& f : frames) {
                arr.push_back(frame_to_json(f));
            }
            emit(cfg, arr);
            return 0;
        }
        emit(cfg, frame_info(load_frame(a.frame)));
        return 0;
    }
    if (command == "force") {
        const Frame frame = load_frame(a.frame);
        const auto f = parse_prop(a.formula);
        const Valuation val = valuation_from_json(frame, read_json_file(a.valuation));
        Json j;
        j["formula"] = to_string(f);
        const NodeSet truth = truth_set(frame, val, f);
        if (a.node) {
            j["node"] = *a.node;
            j["forced"] = contains(truth, frame.index_of(*a.node));
        }
        j["truth_set"] = node_ids(frame, truth);
        emit(cfg, j);
        return 0;
    }
    if (command == "valid") {
        const Frame frame = load_frame(a.frame);
        const auto f = parse_prop(a.formula);
        const auto cm = find_countermodel(frame, f, cfg.validity());
        Json j;
        j["formula"] = to_string(f);
        j["valid"] = !cm.has_value();
        j["valuations"] = valuation_count(frame, f);
        if (cm) {
            j["countermodel"] = countermodel_to_json(frame, *cm);
        }
        emit(cfg, j);
        return 0;
    }
    if (command == "axiom") {
        const Logic logic = parse_logic(a.logic);
        Json j;
        j["logic"] = logic.name();
        j["frame_class"] = logic.frame_class().name();
        if (logic.kind != Logic::Kind::ipc) {
            j["axiom"] = to_string(axiom(logic));
        }
        emit(cfg, j);
        return 0;
    }
    if (command == "logic-member") {
        const Logic logic = parse_logic(a.logic);
        const auto f = parse_prop(a.formula);
        const auto r = logic_member(logic.frame_class(), f, a.bound, cfg.validity());
        Json j;
        j["logic"] = logic.name();
        j["formula"] = to_string(f);
        j["bound"] = a.bound;
        j["frames_checked"] = r.frames_checked;
        j["refuted"] = r.refuted();
        if (r.refuted()) {
            j["countermodel"] = countermodel_to_json(*r.frame, *r.countermodel);
        }
        emit(cfg, j);
        return 0;
    }
    if (command == "universe") {
        const Universe u = a.k ? build_vk(*a.k) : universe_from_json(read_json_file(a.file));
        Json j;
        j["size"] = u.size();
        j["height"] = u.height();
        j["elements"] = universe_to_json(u);
        if (!a.formula.empty()) {
            const auto f = parse_set(a.formula);
            j["sentence"] = to_string(f);
            j["holds"] = eval_classical(u, f);
        }
        emit(cfg, j);
        return 0;
    }

    // Everything below works on a blended model.
    auto build = [&] {
        const Frame frame = load_frame(a.frame.empty() ? "fork" : a.frame);
        return BlendedModel::construct(frame, load_universes(frame, a.universes), cfg.rank, cfg.element_budget());
    };

    if (command == "blend") {
        const auto model = build();
        Json j = model_report(model, cfg.samples, cfg.seed);
        j["frame"] = frame_to_json(model.frame());
        bool ok = j["spot_checks"]["failures"].empty();
        if (!a.formula.empty()) {
            const auto f = parse_set(a.formula);
            j["sentence"] = to_string(f);
            j["truth_set"] = node_ids(model.frame(), truth_set(model, f));
        }
        if (a.persistence) {
            std::mt19937_64 rng(cfg.seed);
            std::vector<SetFormula> formulas;
            for (int i = 0; i < 20; ++i) {
                formulas.push_back(random_set_formula(rng, 1 + i % 2, {"a", "b"}, 8));
            }
            const auto r = check_persistence(model, formulas, cfg.samples / 20 + 1, cfg.seed);
            j["persistence"] = {{"checks", r.checks}, {"violations", r.violations}};
            ok = ok && r.ok();
        }
        if (!ok) {
            throw CheckFailed{j};
        }
        emit(cfg, j);
        return 0;
    }
    if (command == "izf-check") {
        const auto model = build();
        IzfRequest req{parse_izf_axiom(a.axiom), std::nullopt, a.margin};
        if (!a.formula.empty()) {
            req.formula = parse_set(a.formula);
        }
        const auto r = izf_check(model, req);
        Json j;
        j["axiom"] = r.axiom;
        if (req.formula) {
            j["formula"] = to_string(*req.formula);
        }
        j["rank_cutoff"] = model.rank_cutoff();
        j["margin"] = r.margin;
        j["verdict"] = verdict_name(r.verdict);
        j["instances"] = r.instances;
        j["witnesses"] = r.witnesses;
        j["too_high"] = r.too_high;
        j["problems"] = r.problems;
        if (r.verdict == Verdict::failed) {
            throw CheckFailed{j};
        }
        emit(cfg, j);
        return 0;
    }
    if (command == "psi") {
        Json j;
        j["n"] = a.n;
        j["psi"] = to_string(psi(a.n));
        if (!a.frame.empty()) {
            const auto model = build();
            Evaluator eval(model);
            const auto r = counting_check(model, eval);
            Json rows = Json::array();
            for (const auto& row : r.rows) {
                rows.push_back({{"node", model.frame().id(row.node)},
                                {"upsets", row.upset_count},
                                {"n", row.n},
                                {"forces_psi_n_plus_1", row.forced}});
            }
            j["truth_set"] = node_ids(model.frame(), eval.truth_set(psi(a.n)));
            j["counting"] = rows;
            j["failures"] = r.failures;
            if (!r.ok()) {
                throw CheckFailed{j};
            }
        }
        emit(cfg, j);
        return 0;
    }
    if (command == "chi") {
        const auto model = build();
        const Frame& frame = model.frame();
        Evaluator eval(model);
        const auto chis = chi_all(model, height_distinguishers(model), eval);
        Json out = Json::array();
        bool ok = true;
        for (NodeIndex v = 0; v < frame.size(); ++v) {
            if (a.node && frame.id(v) != *a.node) {
                continue;
            }
            const NodeSet truth = eval.truth_set(chis[v]);
            ok = ok && truth == frame.cone(v);
            out.push_back({{"node", frame.id(v)},
                           {"chi", to_string(chis[v])},
                           {"truth_set", node_ids(frame, truth)},
                           {"cone", node_ids(frame, frame.cone(v))}});
        }
        if (!ok) {
            throw CheckFailed{out};
        }
        emit(cfg, out);
        return 0;
    }
    if (command == "faithful") {
        const auto model = build();
        const Frame& frame = model.frame();
        const Valuation val = valuation_from_json(frame, read_json_file(a.valuation));
        Evaluator eval(model);
        const auto chis = chi_all(model, height_distinguishers(model), eval);
        const auto sigma = faithful_substitution(model, val, chis, eval);
        Json j;
        Json images = Json::object();
        for (const auto& [letter, image] : sigma.images()) {
            images[letter] = {{"sentence", to_string(image)}, {"truth_set", node_ids(frame, eval.truth_set(image))}};
        }
        j["sigma"] = images;
        auto report = correspondence_check(model, val, sigma, a.depth, eval);
        if (!a.formula.empty()) {
            const auto f = parse_prop(a.formula);
            const auto own = correspondence_check(model, val, sigma, f, eval);
            report.formulas += own.formulas;
            report.checks += own.checks;
            report.failures.insert(report.failures.end(), own.failures.begin(), own.failures.end());
            j["formula"] = to_string(f);
            j["image_truth_set"] = node_ids(frame, eval.truth_set(apply_substitution(f, sigma)));
        }
        j["correspondence"] = {{"depth", a.depth}, {"formulas", report.formulas}, {"checks", report.checks}, {"failures", report.failures}};
        if (!report.ok()) {
            throw CheckFailed{j};
        }
        emit(cfg, j);
        return 0;
    }
    if (command == "dejongh") {
        const Logic logic = parse_logic(a.logic);
        const auto f = parse_prop(a.formula);
        DejonghOptions options;
        options.rank = cfg.rank;
        options.correspondence_depth = a.depth;
        options.validity = cfg.validity();
        options.element_budget = cfg.element_budget();
        const auto r = dejongh_countermodel(logic, f, a.bound, options);
        Json j;
        if (r.certificate) {
            j = certificate_to_json(*r.certificate);
            j["frames_checked"] = r.frames_checked;
        } else {
            j["logic"] = logic.name();
            j["formula"] = to_string(f);
            j["result"] = "not refuted up to bound";
            j["bound"] = a.bound;
            j["frames_checked"] = r.frames_checked;
        }
        emit(cfg, j);
        return 0;
    }
    if (command == "em-demo") {
        const auto r = excluded_middle_demo(cfg.rank < 3 ? 3 : cfg.rank);
        Json j;
        j["phi"] = to_string(r.phi);
        j["frame"] = frame_to_json(r.frame);
        Json heights = Json::object();
        for (const auto& [e, k] : r.heights) {
            heights[std::to_string(r.frame.id(e))] = k;
        }
        j["heights"] = heights;
        Json nodes = Json::object();
        for (const auto& [v, verdict] : r.verdicts) {
            nodes[std::to_string(r.frame.id(v))] = {{"phi", verdict[0]}, {"not_phi", verdict[1]}, {"phi_or_not_phi", verdict[2]}};
        }
        j["verdicts"] = nodes;
        j["matches_pattern"] = r.matches_pattern();
        if (!r.matches_pattern()) {
            throw CheckFailed{j};
        }
        emit(cfg, j);
        return 0;
    }
    if (command == "selftest") {
        selftest::AcceptanceOptions options;
        options.seed = cfg.seed;
        options.jobs = cfg.jobs;
        options.only.insert(a.only.begin(), a.only.end());
        const auto results = selftest::run_acceptance(options, cfg.as_json() ? nullptr : &std::cout);
        bool ok = true;
        Json arr = Json::array();
        for (const auto& r : results) {
            ok = ok && r.pass;
            arr.push_back({{"criterion", r.id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}});
        }
        if (cfg.as_json()) {
            std::cout << arr.dump(2) << "\n";
        } else {
            const auto passed = std::count_if(results.begin(), results.end(), [](const auto& r) { return r.pass; });
            std::cout << passed << "/" << results.size() << " criteria passed\n";
        }
        return ok ? 0 : 1;
    }
    throw CLI::CallForHelp();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Kripke models for propositional and set-theoretic forcing"};
    app.require_subcommand(1);
    Config cfg;
    Args a;

    app.add_flag("--json", cfg.json, "JSON output");
    app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    app.add_option("--seed", cfg.seed, "Seed for sampled checks");
    app.add_option("--samples", cfg.samples, "Sample count for sampled checks")->check(CLI::PositiveNumber);
    app.add_option("--jobs", cfg.jobs, "Worker threads for valuation sweeps")->check(CLI::PositiveNumber);
    app.add_option("--rank", cfg.rank, "Rank cutoff R")->check(CLI::NonNegativeNumber);
    app.add_option("--budget", cfg.budget, "Element budget (default: KRIPKE_BLEND_BUDGET or 1000000)")
        ->check(CLI::PositiveNumber);
    app.add_option("--valuation-budget", cfg.valuation_budget, "Valuation sweep budget")->check(CLI::PositiveNumber);

    auto sub = [&](const std::string& name, const std::string& help) {
        auto* s = app.add_subcommand(name, help);
        s->fallthrough();
        return s;
    };
    auto* parse = sub("parse", "Parse and print a formula");
    parse->add_option("formula", a.formula)->required();
    parse->add_flag("--set", a.set, "Parse as a set-theoretic formula");

    auto* frame = sub("frame", "Validate, describe or enumerate frames");
    frame->add_option("--frame", a.frame, "Frame JSON file or fork, chain:N, star:N");
    frame->add_option("--enumerate", a.enumerate, "All trees with up to N nodes");
    frame->add_option("--class", a.klass, "Frame class: trees, linear, splitting:N, depth:N");
    frame->add_option("--bound", a.bound, "Bound for --class");

    auto* force = sub("force", "Propositional forcing");
    force->add_option("--frame", a.frame)->required();
    force->add_option("--valuation", a.valuation, "Valuation JSON file")->required();
    force->add_option("--formula", a.formula)->required();
    force->add_option("--node", a.node, "Node id");

    auto* valid = sub("valid", "Validity in a frame, with a countermodel if refuted");
    valid->add_option("--frame", a.frame)->required();
    valid->add_option("--formula", a.formula)->required();

    auto* ax = sub("axiom", "Characteristic axiom of a logic");
    ax->add_option("--logic", a.logic, "ipc, lc, t:N, bd:N")->required();

    auto* member = sub("logic-member", "Search a logic's frame class for a countermodel");
    member->add_option("--logic", a.logic)->required();
    member->add_option("--formula", a.formula)->required();
    member->add_option("--bound", a.bound);

    auto* universe = sub("universe", "Build or load a classical universe");
    auto* k_opt = universe->add_option("--k", a.k, "Build V_k");
    universe->add_option("--file", a.file, "Universe JSON file")->excludes(k_opt);
    universe->add_option("--formula", a.formula, "Sentence to evaluate");

    auto model_options = [&](CLI::App* s) {
        s->add_option("--frame", a.frame, "Frame JSON file or fork, chain:N, star:N");
        s->add_option("--universes", a.universes, "End universes: heights like 3,4 or JSON files (default V_{i+2})");
    };
    auto* blend = sub("blend", "Build a blended model and report on it");
    model_options(blend);
    blend->add_option("--formula", a.formula, "Sentence whose truth set to print");
    blend->add_flag("--persistence", a.persistence, "Sampled persistence check on random formulas");

    auto* izf = sub("izf-check", "Check an IZF axiom in truncated form");
    model_options(izf);
    izf->add_option("--axiom", a.axiom)->required();
    izf->add_option("--formula", a.formula, "Formula for separation, collection, set-induction");
    izf->add_option("--margin", a.margin);

    auto* ps = sub("psi", "Print psi_n and check upset counting in a model");
    ps->add_option("--n", a.n)->check(CLI::PositiveNumber);
    model_options(ps);

    auto* ch = sub("chi", "Node-identifying sentences and their truth sets");
    model_options(ch);
    ch->add_option("--node", a.node);

    auto* faithful = sub("faithful", "Faithful substitution and correspondence check");
    model_options(faithful);
    faithful->add_option("--valuation", a.valuation)->required();
    faithful->add_option("--formula", a.formula);
    faithful->add_option("--depth", a.depth)->check(CLI::Range(0, 3));

    auto* dj = sub("dejongh", "Countermodel certificate for a substitution instance");
    dj->add_option("--logic", a.logic)->required();
    dj->add_option("--formula", a.formula)->required();
    dj->add_option("--bound", a.bound);
    dj->add_option("--depth", a.depth, "Correspondence depth")->check(CLI::Range(0, 3));

    sub("em-demo", "Excluded middle fails at the root of a blended fork");

    auto* self = sub("selftest", "Run the acceptance suite");
    self->add_option("--only", a.only, "Criterion numbers")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, a, cfg);
    } catch (const CheckFailed& f) {
        emit(cfg, f.report);
        return 1;
    } catch (const InternalCheckFailure& e) {
        std::cerr << "internal check failed: " << e.what() << "\n";
        return 1;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
