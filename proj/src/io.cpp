#include "bracketlab/io.hpp"

#include "json.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace bracketlab::io {

using json = nlohmann::json;
using model::Bundle;
using model::DiscreteBudget;
using model::ExperimentDesign;

namespace {

constexpr const char* kSchema = "bracketlab-design/1";

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

int parse_int(const std::string& s, const std::string& what, int line_no) {
    try {
        size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("line " + std::to_string(line_no) + ": bad " + what + " '" + s +
                              "'");
    }
}

} // namespace

std::vector<ChoiceRow> read_choices_csv(std::istream& in, const std::string& name) {
    std::vector<ChoiceRow> rows;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        for (auto& f : fields) f = trim(f);
        if (!header_seen) {
            if (fields.size() < 5 || fields[0] != "subject_id" || fields[1] != "experiment" ||
                fields[2] != "decision" || fields[3] != "subdecision" ||
                fields[4] != "line_index")
                throw ValidationError(name + " line " + std::to_string(line_no) +
                                      ": expected header "
                                      "subject_id,experiment,decision,subdecision,line_index"
                                      "[,qty_a,qty_b]");
            if (fields.size() >= 7 && (fields[5] != "qty_a" || fields[6] != "qty_b"))
                throw ValidationError(name + " line " + std::to_string(line_no) +
                                      ": optional columns must be qty_a,qty_b");
            header_seen = true;
            continue;
        }
        if (fields.size() != 5 && fields.size() != 7)
            throw ValidationError(name + " line " + std::to_string(line_no) +
                                  ": expected 5 or 7 fields, got " +
                                  std::to_string(fields.size()));
        ChoiceRow row;
        row.source_line = line_no;
        row.subject_id = fields[0];
        row.experiment = fields[1];
        std::string dec = fields[2];
        if (!dec.empty() && (dec[0] == 'd' || dec[0] == 'D')) dec = dec.substr(1);
        row.decision = parse_int(dec, "decision", line_no);
        row.subdecision = parse_int(fields[3], "subdecision", line_no);
        row.line_index = parse_int(fields[4], "line_index", line_no);
        if (fields.size() == 7 && !(fields[5].empty() && fields[6].empty())) {
            row.has_qty = true;
            try {
                row.qty_a = parse_rational(fields[5]);
                row.qty_b = parse_rational(fields[6]);
            } catch (const std::exception&) {
                throw ValidationError(name + " line " + std::to_string(line_no) +
                                      ": bad quantity");
            }
        }
        if (row.subject_id.empty())
            throw ValidationError(name + " line " + std::to_string(line_no) +
                                  ": empty subject_id");
        rows.push_back(std::move(row));
    }
    if (!header_seen) throw ValidationError(name + ": empty file");
    return rows;
}

std::vector<ChoiceRow> read_choices_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return read_choices_csv(in, path);
}

std::vector<model::SubjectChoices> assemble_subjects(const ExperimentDesign& design,
                                                     const std::string& experiment,
                                                     const std::vector<ChoiceRow>& rows) {
    const int n = design.subdecision_count();
    std::map<std::string, std::pair<model::Profile, std::vector<int>>> by_subject;
    for (const auto& row : rows) {
        if (row.experiment != experiment) continue;
        auto where = "line " + std::to_string(row.source_line) + ": ";
        if (row.decision < 1 || row.decision > (int)design.decisions.size())
            throw ValidationError(where + "decision out of range");
        const auto& dec = design.decisions[row.decision - 1];
        if (row.subdecision < 1 || row.subdecision > (int)dec.subdecisions.size())
            throw ValidationError(where + "subdecision out of range");
        const auto& lines = design.lines(row.decision - 1, row.subdecision - 1);
        if (row.line_index < 0 || row.line_index >= (int)lines.size())
            throw ValidationError(where + "line_index out of range (" +
                                  std::to_string(lines.size()) + " lines)");
        if (row.has_qty) {
            const Bundle& b = lines[row.line_index];
            if (b[0] != row.qty_a || b[1] != row.qty_b)
                throw ValidationError(where + "quantities (" + rational_to_string(row.qty_a) +
                                      "," + rational_to_string(row.qty_b) +
                                      ") do not match line " + std::to_string(row.line_index) +
                                      " = " + b.to_string());
        }
        auto& entry = by_subject[row.subject_id];
        if (entry.first.empty()) entry.first.assign(n, 0), entry.second.assign(n, 0);
        const int flat = design.flat_index(row.decision - 1, row.subdecision - 1);
        if (entry.second[flat]++)
            throw ValidationError(where + "duplicate choice for subject " + row.subject_id);
        entry.first[flat] = row.line_index;
    }
    std::vector<model::SubjectChoices> subjects;
    for (auto& [id, entry] : by_subject) {
        for (int flat = 0; flat < n; ++flat)
            if (!entry.second[flat]) {
                const auto ref = design.subdecisions()[flat];
                throw ValidationError("subject " + id + ": missing choice for " + ref.label);
            }
        subjects.push_back({id, std::move(entry.first)});
    }
    return subjects;
}

void write_choices_csv(std::ostream& out, const ExperimentDesign& design,
                       const std::string& experiment,
                       const std::vector<model::SubjectChoices>& subjects) {
    out << "subject_id,experiment,decision,subdecision,line_index,qty_a,qty_b\n";
    const auto refs = design.subdecisions();
    for (const auto& s : subjects) {
        model::validate_profile(design, s.choices);
        for (size_t flat = 0; flat < refs.size(); ++flat) {
            const auto& b = design.lines(refs[flat].decision, refs[flat].subdecision)
                                [s.choices[flat]];
            out << s.subject_id << ',' << experiment << ',' << refs[flat].decision + 1 << ','
                << refs[flat].subdecision + 1 << ',' << s.choices[flat] << ','
                << rational_to_string(b[0]) << ',' << rational_to_string(b[1]) << '\n';
        }
    }
}

namespace {

json budget_to_json(const DiscreteBudget& b) {
    json j;
    switch (b.kind) {
        case model::BudgetKind::walrasian:
            if (b.grid_rule == model::GridRule::token) {
                j["kind"] = "token";
                j["income_tokens"] = b.token_income;
                j["value_a"] = rational_to_string(b.value_per_token[0]);
                j["value_b"] = rational_to_string(b.value_per_token[1]);
            } else {
                j["kind"] = "shopping";
                j["price_apple"] = rational_to_string(b.prices[0]);
                j["price_orange"] = rational_to_string(b.prices[1]);
                j["income"] = rational_to_string(b.income);
            }
            break;
        case model::BudgetKind::piecewise:
            j["kind"] = "piecewise";
            j["price_apple"] = rational_to_string(b.prices[0]);
            j["cheap_oranges"] = b.threshold;
            j["orange_low"] = rational_to_string(b.low_price);
            j["orange_high"] = rational_to_string(b.high_price);
            j["income"] = rational_to_string(b.income);
            break;
        case model::BudgetKind::explicit_lines: {
            j["kind"] = "lines";
            json lines = json::array();
            for (const auto& l : b.explicit_bundles) {
                json coords = json::array();
                for (const auto& q : l.q) coords.push_back(rational_to_string(q));
                lines.push_back(coords);
            }
            j["lines"] = lines;
            break;
        }
    }
    return j;
}

DiscreteBudget budget_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "token")
        return DiscreteBudget::token_budget(
            j.at("income_tokens").get<long>(),
            parse_rational(j.at("value_a").get<std::string>()),
            parse_rational(j.at("value_b").get<std::string>()));
    if (kind == "shopping")
        return DiscreteBudget::shopping_budget(
            parse_rational(j.at("price_apple").get<std::string>()),
            parse_rational(j.at("price_orange").get<std::string>()),
            parse_rational(j.at("income").get<std::string>()));
    if (kind == "piecewise")
        return DiscreteBudget::shopping_piecewise(
            parse_rational(j.at("price_apple").get<std::string>()),
            j.at("cheap_oranges").get<long>(),
            parse_rational(j.at("orange_low").get<std::string>()),
            parse_rational(j.at("orange_high").get<std::string>()),
            parse_rational(j.at("income").get<std::string>()));
    if (kind == "lines") {
        std::vector<Bundle> lines;
        for (const auto& coords : j.at("lines")) {
            std::vector<Rational> q;
            for (const auto& c : coords) q.push_back(parse_rational(c.get<std::string>()));
            lines.emplace_back(std::move(q));
        }
        return DiscreteBudget::from_lines(std::move(lines));
    }
    throw ValidationError("unknown budget kind '" + kind + "'");
}

} // namespace

std::string design_to_json(const ExperimentDesign& design) {
    json j;
    j["schema"] = kSchema;
    j["domain"] = model::domain_name(design.domain);
    json decisions = json::array();
    for (const auto& dec : design.decisions) {
        json d;
        d["id"] = dec.id;
        json subs = json::array();
        for (const auto& sub : dec.subdecisions) subs.push_back(budget_to_json(sub));
        d["subdecisions"] = subs;
        decisions.push_back(d);
    }
    j["decisions"] = decisions;
    return j.dump(2) + "\n";
}

ExperimentDesign design_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad design JSON: ") + e.what());
    }
    try {
        if (j.at("schema").get<std::string>() != kSchema)
            throw ValidationError("unsupported design schema");
        ExperimentDesign d;
        d.domain = model::parse_domain(j.at("domain").get<std::string>());
        for (const auto& dj : j.at("decisions")) {
            model::Decision dec;
            dec.id = dj.at("id").get<std::string>();
            for (const auto& sj : dj.at("subdecisions"))
                dec.subdecisions.push_back(budget_from_json(sj));
            if (dec.subdecisions.empty())
                throw ValidationError("decision " + dec.id + " has no subdecisions");
            d.decisions.push_back(std::move(dec));
        }
        if (d.decisions.empty()) throw ValidationError("design has no decisions");
        return d;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad design JSON: ") + e.what());
    }
}

ExperimentDesign load_design(const std::string& spec) {
    if (spec.rfind("file:", 0) == 0) {
        const std::string path = spec.substr(5);
        std::ifstream in(path);
        if (!in) throw IoError("cannot open " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return design_from_json(ss.str());
    }
    try {
        return model::build_design(model::parse_domain(spec));
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
}

std::string design_hash(const ExperimentDesign& design) {
    const std::string text = design_to_json(design);
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return buf;
}

} // namespace bracketlab::io
