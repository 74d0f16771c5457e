#include "CLI11.hpp"
#include "json.hpp"

#include "bracketlab/classify.hpp"
#include "bracketlab/errors.hpp"
#include "bracketlab/induced.hpp"
#include "bracketlab/io.hpp"
#include "bracketlab/model.hpp"
#include "bracketlab/power.hpp"
#include "bracketlab/simulate.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

using json = nlohmann::json;
using namespace bracketlab;

namespace {

struct CommonArgs {
    std::string design = "risk";
    std::string input;
    std::string out;
    std::string experiment; // defaults to the design's domain name
    int errors_cap = 3;
    int alpha_grid = 100;
    std::string pnb_mode = "ppe";
    std::string bbwarp_rule = "exact";
    int workers = 1;
    std::string cache;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool needs_input) {
    cmd->add_option("--design", a.design, "risk|social|shopping|file:<design json>");
    auto* in = cmd->add_option("--input", a.input, "choices CSV");
    if (needs_input) in->required();
    cmd->add_option("--out", a.out, "output path (default stdout)");
    cmd->add_option("--experiment", a.experiment,
                    "experiment column value to select (default: the design domain)");
    cmd->add_option("--errors-cap", a.errors_cap, "error-allowance cap")->check(CLI::Range(0, 10));
    cmd->add_option("--alpha-grid", a.alpha_grid, "alpha grid denominator")
        ->check(CLI::Range(1, 100000));
    cmd->add_option("--pnb-mode", a.pnb_mode, "ppe|per-subdecision")
        ->check(CLI::IsMember({"ppe", "per-subdecision"}));
    cmd->add_option("--bbwarp-rule", a.bbwarp_rule, "exact|a-coordinate")
        ->check(CLI::IsMember({"exact", "a-coordinate"}));
    cmd->add_option("--workers", a.workers, "worker threads")->check(CLI::Range(1, 64));
    cmd->add_option("--cache", a.cache, "predictive-area sidecar cache file");
}

void emit(const CommonArgs& a, const std::string& text) {
    if (a.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(a.out, std::ios::binary);
    if (!f) throw io::IoError("cannot write " + a.out);
    f << text;
}

std::string experiment_name(const CommonArgs& a, const model::ExperimentDesign& d) {
    return a.experiment.empty() ? model::domain_name(d.domain) : a.experiment;
}

errors::TestSuiteOptions suite_options(const CommonArgs& a) {
    errors::TestSuiteOptions o;
    o.bbwarp_rule = a.bbwarp_rule == "exact" ? revpref::BbWarpRule::exact
                                             : revpref::BbWarpRule::a_coordinate;
    o.pnb.mode = a.pnb_mode == "ppe" ? pnb::PnbOptions::Mode::ppe
                                     : pnb::PnbOptions::Mode::per_subdecision;
    o.alpha_denominator = a.alpha_grid;
    return o;
}

classify::AreaOptions area_options(const CommonArgs& a) {
    classify::AreaOptions o;
    o.alpha_denominator = a.alpha_grid;
    o.pnb = suite_options(a).pnb;
    o.cache_path = a.cache;
    return o;
}

json config_json(const CommonArgs& a) {
    json c;
    c["alpha_grid"] = a.alpha_grid;
    c["bbwarp_rule"] = a.bbwarp_rule;
    c["errors_cap"] = a.errors_cap;
    c["pnb_mode"] = a.pnb_mode;
    return c;
}

json design_stamp(const model::ExperimentDesign& d) {
    json j;
    j["domain"] = model::domain_name(d.domain);
    j["hash"] = io::design_hash(d);
    return j;
}

/// Per-subject analysis payload, built identically regardless of the worker
/// layout so reports are byte-deterministic.
json analyze_subject(const model::ExperimentDesign& design, const CommonArgs& args,
                     const std::vector<errors::NamedTest>& tests,
                     const classify::PnbMembership* pnb_membership,
                     const std::vector<induced::AlphaRange>* ranges,
                     const model::SubjectChoices& subject) {
    json tests_json;
    for (const auto& test : tests) {
        json t;
        t["passed"] = test.pass(subject.choices);
        const errors::NamedTest* counted = &test;
        errors::NamedTest fast;
        if (test.name == "pnb" && pnb_membership) {
            fast.name = test.name;
            fast.touched = test.touched;
            fast.pass = [pnb_membership](const model::Profile& p) {
                return pnb_membership->passes(p);
            };
            counted = &fast;
        }
        auto me = errors::min_errors_to_pass(design, subject.choices, *counted, args.errors_cap);
        t["min_errors"] = me.within_cap ? json(me.errors) : json();
        tests_json[test.name] = t;
    }

    json s;
    s["subject_id"] = subject.subject_id;
    s["tests"] = tests_json;

    if (design.domain != model::Domain::shopping) {
        auto r = pnb::pnb_test(design, subject.choices, args.alpha_grid,
                               suite_options(args).pnb);
        s["pnb_alphas"] = r.passing_alphas;
    }
    if (ranges) {
        auto est = induced::estimate_alpha(design, subject.choices, *ranges);
        json e;
        e["range_index"] = est.range_index;
        e["alpha_lower"] = rational_to_string(est.range.lower);
        e["alpha_upper"] = rational_to_string(est.range.upper);
        e["errors"] = est.errors;
        e["tie_broken"] = est.tie_broken;
        s["alpha"] = e;
    }
    return s;
}

template <class Fn>
void parallel_over(int workers, size_t n, Fn fn) {
    if (workers <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn((int)0, i);
        return;
    }
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w)
        threads.emplace_back([&, w] {
            for (size_t i = w; i < n; i += workers) fn(w, i);
        });
    for (auto& t : threads) t.join();
}

int run_analyze(const CommonArgs& args) {
    auto design = io::load_design(args.design);
    auto rows = io::read_choices_file(args.input);
    auto subjects = io::assemble_subjects(design, experiment_name(args, design), rows);

    std::vector<induced::AlphaRange> ranges;
    if (design.domain == model::Domain::shopping)
        ranges = induced::alpha_ranges(design, args.alpha_grid);

    std::vector<json> per_subject(subjects.size());
    // each worker gets its own battery: the pnb predicate memoizes internally
    parallel_over(args.workers, subjects.size(), [&](int, size_t i) {
        auto tests = errors::standard_tests(design, suite_options(args));
        std::optional<classify::PnbMembership> membership;
        if (design.domain != model::Domain::shopping)
            membership.emplace(design, area_options(args));
        per_subject[i] = analyze_subject(design, args, tests,
                                         membership ? &*membership : nullptr,
                                         ranges.empty() ? nullptr : &ranges, subjects[i]);
    });

    json report;
    report["command"] = "analyze";
    report["config"] = config_json(args);
    report["design"] = design_stamp(design);
    report["subjects"] = per_subject;
    emit(args, report.dump(2) + "\n");
    return io::exit_ok;
}

int run_validate(const CommonArgs& args) {
    auto design = io::load_design(args.design);
    auto rows = io::read_choices_file(args.input);
    auto subjects = io::assemble_subjects(design, experiment_name(args, design), rows);
    json report;
    report["command"] = "validate";
    report["design"] = design_stamp(design);
    report["rows"] = rows.size();
    report["subjects"] = subjects.size();
    emit(args, report.dump(2) + "\n");
    return io::exit_ok;
}

int run_design(const CommonArgs& args) {
    auto design = io::load_design(args.design);
    emit(args, io::design_to_json(design));
    return io::exit_ok;
}

int run_areas(const CommonArgs& args, const std::string& model_name, int max_errors) {
    auto design = io::load_design(args.design);
    auto model = induced::parse_bracketing(model_name);
    auto area = classify::predictive_area(design, model, max_errors, area_options(args));
    json report;
    report["command"] = "areas";
    report["design"] = design_stamp(design);
    report["model"] = model_name;
    report["total"] = classify::total_profiles(design);
    report["counts"] = area.counts;
    report["from_cache"] = area.from_cache;
    emit(args, report.dump(2) + "\n");
    return io::exit_ok;
}

int run_classify(const CommonArgs& args, const std::string& models_flag) {
    auto design = io::load_design(args.design);
    auto rows = io::read_choices_file(args.input);
    auto subjects = io::assemble_subjects(design, experiment_name(args, design), rows);

    std::map<induced::BracketingModel, classify::AreaResult> areas;
    std::stringstream ss(models_flag);
    std::string item;
    classify::ClassifyOptions copts;
    copts.max_errors = args.errors_cap;
    copts.area = area_options(args);
    while (std::getline(ss, item, ',')) {
        auto m = induced::parse_bracketing(item);
        areas[m] = classify::predictive_area(design, m, args.errors_cap, copts.area);
    }
    if (areas.empty()) throw io::ValidationError("no models requested");

    json out_subjects = json::array();
    for (const auto& subject : subjects) {
        auto cls = classify::selten_classify(design, subject, areas, copts);
        json s;
        s["subject_id"] = cls.subject_id;
        json fits;
        for (const auto& [name, fit] : cls.fits) {
            json f;
            f["errors"] = fit.errors;
            f["area"] = fit.area;
            f["selten_score"] = fit.selten_score;
            f["rationalizes"] = fit.rationalizes;
            fits[name] = f;
        }
        s["fits"] = fits;
        s["assigned"] = cls.assigned;
        s["tie_broken"] = cls.tie_broken;
        if (cls.alpha) {
            json a;
            a["range_index"] = cls.alpha->range_index;
            a["alpha_lower"] = rational_to_string(cls.alpha->range.lower);
            a["alpha_upper"] = rational_to_string(cls.alpha->range.upper);
            a["errors"] = cls.alpha->errors;
            s["alpha"] = a;
        }
        out_subjects.push_back(s);
    }

    json report;
    report["command"] = "classify";
    report["config"] = config_json(args);
    report["design"] = design_stamp(design);
    report["subjects"] = out_subjects;
    emit(args, report.dump(2) + "\n");
    return io::exit_ok;
}

std::vector<std::string> default_power_tests() {
    return {"nb_warp.d11_d5", "nb_warp.d12_d4", "nb_warp.d32_d5", "nb_warp.d11_d32",
            "nb_warp.all",    "bb_warp.d1_d2",  "bb_mon.d1",      "bb_mon.d3",
            "bb_mon.both"};
}

int run_power(const CommonArgs& args, std::string tests_flag, const std::string& method,
              long long samples, uint64_t seed, long long enum_budget) {
    auto design = io::load_design(args.design);
    auto battery = errors::standard_tests(design, suite_options(args));

    std::vector<std::string> names;
    if (tests_flag == "table") {
        // the small-product battery; absent entries (non-token designs) drop out
        for (const auto& name : default_power_tests())
            for (const auto& t : battery)
                if (t.name == name) names.push_back(name);
    } else if (tests_flag == "all") {
        for (const auto& t : battery) names.push_back(t.name);
    } else {
        std::stringstream ss(tests_flag);
        std::string item;
        while (std::getline(ss, item, ',')) names.push_back(item);
    }

    power::PowerOptions popts;
    popts.area = area_options(args);
    popts.enumeration_budget = enum_budget;

    std::ostringstream csv;
    csv << "test,errors,method,probability,std_error,numerator,denominator,samples,seed\n";
    char prob[64];
    for (const auto& name : names) {
        const auto& test = errors::find_test(battery, name);
        for (int e = 0; e <= args.errors_cap; ++e) {
            power::PowerResult r;
            if (method == "exact") {
                r = power::exact_pass_probability(design, test, e, popts);
                snprintf(prob, sizeof prob, "%.12g", r.probability);
                csv << r.test << ',' << e << ",exact," << prob << ",0,"
                    << r.pass_count << ',' << r.total << ",,\n";
            } else {
                r = power::mc_pass_probability(design, test, e, samples, seed, args.workers);
                snprintf(prob, sizeof prob, "%.12g", r.probability);
                csv << r.test << ',' << e << ",mc," << prob << ',';
                snprintf(prob, sizeof prob, "%.12g", r.std_error);
                csv << prob << ',' << r.pass_count << ',' << r.total << ',' << r.samples
                    << ',' << r.seed << "\n";
            }
        }
    }
    emit(args, csv.str());
    return io::exit_ok;
}

int run_predict(const CommonArgs& args, const std::string& model_name,
                const std::string& alpha_str) {
    auto design = io::load_design(args.design);
    auto model = induced::parse_bracketing(model_name);
    Rational alpha = parse_rational(alpha_str);
    auto preds = induced::point_predictions(design, model, alpha);

    json decisions = json::array();
    for (size_t t = 0; t < preds.size(); ++t) {
        json d;
        d["id"] = design.decisions[t].id;
        json combos = json::array();
        for (const auto& combo : preds[t].argmax_lines) {
            json c;
            c["lines"] = combo;
            json bundles = json::array();
            for (size_t k = 0; k < combo.size(); ++k)
                bundles.push_back(design.lines((int)t, (int)k)[combo[k]].to_string());
            c["bundles"] = bundles;
            combos.push_back(c);
        }
        d["argmax"] = combos;
        decisions.push_back(d);
    }
    json report;
    report["command"] = "predict";
    report["design"] = design_stamp(design);
    report["model"] = model_name;
    report["alpha"] = rational_to_string(alpha);
    report["decisions"] = decisions;
    emit(args, report.dump(2) + "\n");
    return io::exit_ok;
}

int run_estimate_alpha(const CommonArgs& args) {
    auto design = io::load_design(args.design);
    auto rows = io::read_choices_file(args.input);
    auto subjects = io::assemble_subjects(design, experiment_name(args, design), rows);
    auto ranges = induced::alpha_ranges(design, args.alpha_grid);

    json ranges_json = json::array();
    for (size_t i = 0; i < ranges.size(); ++i) {
        json r;
        r["index"] = i;
        r["alpha_lower"] = rational_to_string(ranges[i].lower);
        r["alpha_upper"] = rational_to_string(ranges[i].upper);
        json b;
        for (const auto& [label, bundle] : ranges[i].bundles) b[label] = bundle.to_string();
        r["bundles"] = b;
        ranges_json.push_back(r);
    }

    std::vector<long> histogram(ranges.size(), 0);
    json out_subjects = json::array();
    for (const auto& subject : subjects) {
        auto est = induced::estimate_alpha(design, subject.choices, ranges);
        histogram[est.range_index]++;
        json s;
        s["subject_id"] = subject.subject_id;
        s["range_index"] = est.range_index;
        s["alpha_lower"] = rational_to_string(est.range.lower);
        s["alpha_upper"] = rational_to_string(est.range.upper);
        s["errors"] = est.errors;
        s["tie_broken"] = est.tie_broken;
        out_subjects.push_back(s);
    }

    json report;
    report["command"] = "estimate-alpha";
    report["design"] = design_stamp(design);
    report["ranges"] = ranges_json;
    report["histogram"] = histogram;
    report["subjects"] = out_subjects;
    emit(args, report.dump(2) + "\n");
    return io::exit_ok;
}

simulate::AgentSpec agent_from_json(const json& j) {
    simulate::AgentSpec a;
    const auto& u = j.at("utility");
    const std::string kind = u.at("kind").get<std::string>();
    if (kind == "induced_sqrt") {
        a.utility = induced::UtilityModel::induced_sqrt();
    } else if (kind == "ces") {
        a.utility = induced::UtilityModel::ces(parse_rational(u.at("r").get<std::string>()));
    } else if (kind == "linear") {
        std::vector<Rational> w;
        for (const auto& x : u.at("weights")) w.push_back(parse_rational(x.get<std::string>()));
        a.utility = induced::UtilityModel::linear(std::move(w));
    } else {
        throw io::ValidationError("unknown utility kind '" + kind + "'");
    }
    a.bracketing = induced::parse_bracketing(j.at("bracketing").get<std::string>());
    if (j.contains("alpha")) a.alpha = parse_rational(j.at("alpha").get<std::string>());
    if (j.contains("tremble")) a.tremble = j.at("tremble").get<double>();
    if (j.contains("label")) a.label = j.at("label").get<std::string>();
    return a;
}

int run_simulate(const CommonArgs& args, const std::string& agents_path, uint64_t seed) {
    auto design = io::load_design(args.design);
    std::ifstream in(agents_path);
    if (!in) throw io::IoError("cannot open " + agents_path);
    json spec;
    try {
        spec = json::parse(in);
    } catch (const json::exception& e) {
        throw io::ValidationError(std::string("bad agents JSON: ") + e.what());
    }

    std::vector<model::SubjectChoices> subjects;
    long trial = 0;
    for (const auto& aj : spec) {
        auto base = agent_from_json(aj);
        const long count = aj.contains("count") ? aj.at("count").get<long>() : 1;
        for (long c = 0; c < count; ++c, ++trial) {
            simulate::AgentSpec agent = base;
            agent.seed = seed ^ (0x9E3779B97F4A7C15ULL * (uint64_t)(trial + 1));
            std::string label = agent.label.empty()
                                    ? agent.utility.name() + "-" +
                                          induced::bracketing_name(agent.bracketing)
                                    : agent.label;
            char id[24];
            snprintf(id, sizeof id, "%05ld", trial);
            agent.label = label + "#" + id;
            subjects.push_back(simulate::simulate_subject(agent, design).choices);
        }
    }

    std::ostringstream csv;
    io::write_choices_csv(csv, design, experiment_name(args, design), subjects);
    emit(args, csv.str());
    return io::exit_ok;
}

int run_payoff_table(const CommonArgs& args) {
    std::ostringstream csv;
    csv << "apples";
    for (int o = 0; o <= 10; ++o) csv << ",oranges_" << o;
    csv << "\n";
    for (int a = 0; a <= 10; ++a) {
        csv << a;
        for (int o = 0; o <= 10; ++o) {
            const double v = induced::pay(a, o).to_double();
            // display only: cents, half away from zero
            const long cents = std::llround(v * 100.0);
            char cell[32];
            snprintf(cell, sizeof cell, "%ld.%02ld", cents / 100, std::labs(cents % 100));
            csv << ',' << cell;
        }
        csv << "\n";
    }
    emit(args, csv.str());
    return io::exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"choice-bracketing analysis toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string model_name = "narrow", alpha_str = "1", tests_flag = "table";
    std::string method = "exact", agents_path, models_flag = "narrow,broad";
    long long samples = 10000;
    uint64_t seed = 1;
    int area_errors = 3;

    auto* c_design = app.add_subcommand("design", "emit the design as JSON");
    add_common(c_design, args, false);

    auto* c_validate = app.add_subcommand("validate", "check a choices CSV");
    add_common(c_validate, args, true);

    auto* c_analyze = app.add_subcommand("analyze", "test outcomes and min-errors per subject");
    add_common(c_analyze, args, true);

    auto* c_classify = app.add_subcommand("classify", "Selten-score model assignment");
    add_common(c_classify, args, true);
    c_classify->add_option("--models", models_flag, "comma list of narrow,broad,pnb");

    auto* c_areas = app.add_subcommand("areas", "predictive-area counts");
    add_common(c_areas, args, false);
    c_areas->add_option("--model", model_name, "narrow|broad|pnb")->required();
    c_areas->add_option("--errors", area_errors, "max error allowance");

    auto* c_power = app.add_subcommand("power", "pass probabilities under random choice");
    add_common(c_power, args, false);
    c_power->add_option("--tests", tests_flag, "table|all|comma list");
    c_power->add_option("--method", method, "exact|mc")->check(CLI::IsMember({"exact", "mc"}));
    c_power->add_option("--samples", samples, "monte carlo samples");
    c_power->add_option("--seed", seed, "monte carlo seed");
    long long enum_budget = 100'000'000;
    c_power->add_option("--enum-budget", enum_budget, "exact enumeration limit");

    auto* c_predict = app.add_subcommand("predict", "induced-payoff point predictions");
    add_common(c_predict, args, false);
    c_predict->add_option("--model", model_name, "narrow|broad|pnb");
    c_predict->add_option("--alpha", alpha_str, "pnb weight (rational)");

    auto* c_estimate = app.add_subcommand("estimate-alpha", "per-subject alpha ranges");
    add_common(c_estimate, args, true);

    auto* c_simulate = app.add_subcommand("simulate", "synthetic subjects to CSV");
    add_common(c_simulate, args, false);
    c_simulate->add_option("--agents", agents_path, "agent population JSON")->required();
    c_simulate->add_option("--seed", seed, "population seed");

    auto* c_payoff = app.add_subcommand("payoff-table", "induced payoff table as CSV");
    add_common(c_payoff, args, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_design->parsed()) return run_design(args);
        if (c_validate->parsed()) return run_validate(args);
        if (c_analyze->parsed()) return run_analyze(args);
        if (c_classify->parsed()) return run_classify(args, models_flag);
        if (c_areas->parsed()) return run_areas(args, model_name, area_errors);
        if (c_power->parsed())
            return run_power(args, tests_flag, method, samples, seed, enum_budget);
        if (c_predict->parsed()) return run_predict(args, model_name, alpha_str);
        if (c_estimate->parsed()) return run_estimate_alpha(args);
        if (c_simulate->parsed()) return run_simulate(args, agents_path, seed);
        if (c_payoff->parsed()) return run_payoff_table(args);
    } catch (const io::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return io::exit_io;
    } catch (const power::EnumerationBudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return io::exit_budget;
    } catch (const io::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return io::exit_validation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return io::exit_validation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return io::exit_usage;
    }
    return io::exit_usage;
}
